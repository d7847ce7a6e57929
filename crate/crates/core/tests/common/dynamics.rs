use std::collections::BTreeMap;

use super::*;
use chainforge::dynamics::{
    classify_engagement, detect_disengaged, disengagement_report, quarter_of, quarterly_trend,
    DisengageOptions, DisengagementRecord, DownloadsTable, Engagement, PopularityThreshold,
    UNKNOWN_QUARTER,
};
use chainforge::error::DynamicsError;
use chainforge::registry::parse_timestamp;

fn t(s: &str) -> Option<&str> {
    Some(s)
}

fn fixture() -> Vec<String> {
    vec![
        line("s", "1.0", t("2019-06-01T00:00:00Z"), &[]),
        line("s", "2.0", t("2020-01-15T00:00:00Z"), &[]),
        // Drops the dependency in 2.0.
        line("q", "1.0", t("2020-02-10T00:00:00Z"), &["s"]),
        line("q", "2.0", t("2020-05-03T12:00:00Z"), &[]),
        // Only release depends.
        line("c", "1.0", t("2020-03-01T00:00:00Z"), &["s"]),
        // Latest release still depends, on a newer seed version.
        line("k", "1.0", t("2019-07-01T00:00:00Z"), &["s==1.0"]),
        line("k", "2.0", t("2020-02-01T00:00:00Z"), &["s>=2"]),
        // Next release carries an earlier timestamp than the dropped one.
        line("w", "1.0", t("2021-03-01T00:00:00Z"), &["s"]),
        line("w", "1.1", t("2020-12-01T00:00:00Z"), &[]),
        line("w", "1.2", t("2021-09-01T00:00:00Z"), &[]),
        // Next release lacks a timestamp.
        line("u", "1.0", t("2020-01-20T00:00:00Z"), &["s"]),
        line("u", "2.0", None, &[]),
        // Newest release is a pre-release.
        line("pr", "1.0", t("2020-04-01T00:00:00Z"), &["s"]),
        line("pr", "2.0b1", t("2020-10-01T00:00:00Z"), &[]),
        // Pre-releases only.
        line("x", "1.0a1", t("2020-04-01T00:00:00Z"), &["s"]),
    ]
}

fn by_name(records: &[DisengagementRecord]) -> BTreeMap<&str, &DisengagementRecord> {
    records.iter().map(|r| (r.package.as_str(), r)).collect()
}

pub fn trichotomy_and_event_times() {
    let db = db(&fixture());
    let g = chain(&db, &["s"]);
    let status = classify_engagement(&g, db.registry(), DisengageOptions::default()).unwrap();
    assert_eq!(status.len(), 7);
    assert_eq!(status["c"], Engagement::Current);
    assert_eq!(status["k"], Engagement::Current);
    assert_eq!(status["x"], Engagement::Current);

    let records = detect_disengaged(&g, db.registry(), DisengageOptions::default()).unwrap();
    let recs = by_name(&records);
    assert_eq!(
        recs.keys().copied().collect::<Vec<_>>(),
        ["pr", "q", "u", "w"]
    );

    let q = recs["q"];
    assert_eq!((q.v_sc.clone(), q.v_pypi.clone()), (v("1.0"), v("2.0")));
    assert_eq!(q.event_time, parse_timestamp("2020-05-03T12:00:00Z"));
    assert_eq!(q.quarter, "2020Q2");

    let w = recs["w"];
    assert_eq!(w.v_pypi, v("1.2"));
    assert_eq!(w.event_time, parse_timestamp("2021-03-01T00:00:00Z"));
    assert_eq!(w.quarter, "2021Q1");

    let u = recs["u"];
    assert_eq!(u.event_time, None);
    assert_eq!(u.quarter, UNKNOWN_QUARTER);

    assert_eq!(recs["pr"].v_pypi, v("2.0b1"));
    assert_eq!(recs["pr"].quarter, "2020Q4");

    let report = disengagement_report(&g, db.registry(), DisengageOptions::default()).unwrap();
    assert_eq!(
        (
            report.summary.assessed,
            report.summary.disengaged,
            report.summary.current,
            report.summary.unassessed
        ),
        (7, 4, 3, 0)
    );
    let trend: BTreeMap<String, usize> = [
        ("2020Q2", 1),
        ("2020Q3", 0),
        ("2020Q4", 1),
        ("2021Q1", 1),
        ("unknown", 1),
    ]
    .into_iter()
    .map(|(k, n)| (k.to_string(), n))
    .collect();
    assert_eq!(report.trend, trend);
}

pub fn finals_only_mode() {
    let db = db(&fixture());
    let g = chain(&db, &["s"]);
    let options = DisengageOptions {
        include_prereleases: false,
    };
    let status = classify_engagement(&g, db.registry(), options).unwrap();
    assert_eq!(status["pr"], Engagement::Current);
    assert_eq!(status["x"], Engagement::Unassessed);
    let report = disengagement_report(&g, db.registry(), options).unwrap();
    assert_eq!(
        (
            report.summary.assessed,
            report.summary.disengaged,
            report.summary.current,
            report.summary.unassessed
        ),
        (6, 3, 3, 1)
    );
}

pub fn registry_mismatch_is_rejected() {
    let db1 = db(&fixture());
    let g = chain(&db1, &["s"]);
    let mut lines = fixture();
    lines.push(line("q", "3.0", None, &[]));
    let other = registry(&lines);
    assert!(matches!(
        detect_disengaged(&g, &other, DisengageOptions::default()),
        Err(DynamicsError::HashMismatch { .. })
    ));
}

fn record(quarter: &str) -> DisengagementRecord {
    DisengagementRecord {
        package: "p".into(),
        v_sc: v("1"),
        v_pypi: v("2"),
        event_time: None,
        quarter: quarter.into(),
    }
}

pub fn quarterly_histogram_hand_tally() {
    let quarters = [
        "2019Q4", "2020Q1", "2019Q4", "2020Q1", "2020Q1", "2020Q3", "2021Q1", "2021Q1", "unknown",
        "2021Q1",
    ];
    let records: Vec<_> = quarters.iter().map(|q| record(q)).collect();
    let expected: BTreeMap<String, usize> = [
        ("2019Q4", 2),
        ("2020Q1", 3),
        ("2020Q2", 0),
        ("2020Q3", 1),
        ("2020Q4", 0),
        ("2021Q1", 3),
        ("unknown", 1),
    ]
    .into_iter()
    .map(|(k, n)| (k.to_string(), n))
    .collect();
    let trend = quarterly_trend(&records);
    assert_eq!(trend, expected);
    assert_eq!(trend.values().sum::<usize>(), records.len());
    assert!(quarterly_trend(&[]).is_empty());
}

pub fn quarter_boundaries() {
    let q = |s: &str| quarter_of(&parse_timestamp(s).unwrap());
    assert_eq!(q("2020-03-31T23:59:59Z"), "2020Q1");
    assert_eq!(q("2020-04-01T00:00:00Z"), "2020Q2");
    assert_eq!(q("2020-12-31T23:59:59Z"), "2020Q4");
    assert_eq!(q("2021-01-01T00:00:00Z"), "2021Q1");
}

pub fn random_registries_follow_definition() {
    for seed in 0..100 {
        let db = db(&random_registry_lines(seed, 20, 10));
        let Some(first) = db.registry().package_names().next().map(String::from) else {
            continue;
        };
        let g = chain(&db, &[&first]);
        let status = classify_engagement(&g, db.registry(), DisengageOptions::default()).unwrap();
        for node in g.nodes.values().filter(|n| !n.is_seed) {
            let latest = db
                .registry()
                .get_all_versions(&node.name)
                .into_iter()
                .max()
                .unwrap();
            let newest_in_chain = node.vs.iter().max().unwrap();
            match &status[&node.name] {
                Engagement::Current => assert_eq!(newest_in_chain, &latest),
                Engagement::Disengaged(rec) => {
                    assert!(newest_in_chain < &latest);
                    assert!(!node.vs.contains(&latest), "latest release still depends");
                    assert_eq!((&rec.v_sc, &rec.v_pypi), (newest_in_chain, &latest));
                }
                Engagement::Unassessed => panic!("unassessed with pre-releases included"),
            }
        }
    }
}

pub fn downloads_threshold() {
    let csv = "package,downloads\nBig_Pkg,1000\nsmall,10\nmid,300\n";
    let table = DownloadsTable::from_csv(csv.as_bytes()).unwrap();
    assert_eq!(table.get("big-pkg"), 1000);
    assert_eq!(table.get("absent"), 0);
    assert!((table.mean() - 1310.0 / 3.0).abs() < 1e-9);
    let members: Vec<String> = ["big-pkg", "mid", "small", "absent"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let popular = popular_names(&members, &table, PopularityThreshold::EcosystemMean);
    assert_eq!(popular, ["big-pkg"]);
    let popular = popular_names(&members, &table, PopularityThreshold::Explicit(300.0));
    assert_eq!(popular, ["big-pkg"]);
    let popular = popular_names(&members, &table, PopularityThreshold::Explicit(0.0));
    assert_eq!(popular, ["big-pkg", "mid", "small"]);
    assert!(matches!(
        DownloadsTable::from_csv("package,downloads\np,abc\n".as_bytes()),
        Err(DynamicsError::Downloads { line: 2, .. })
    ));
}

fn popular_names(
    members: &[String],
    table: &DownloadsTable,
    mode: PopularityThreshold,
) -> Vec<String> {
    chainforge::dynamics::popular_packages(members.iter(), table, mode)
        .into_iter()
        .collect()
}
