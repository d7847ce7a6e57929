//! Set-level specifier behaviour against instances frozen from the
//! `packaging` reference implementation, plus `~=` expansion properties.

use chainforge::requirement::{satisfying_versions, SpecifierSet};
use chainforge::version::Version;
use proptest::prelude::*;
use serde::Deserialize;

use super::check_cases;

const SETS: &str = include_str!("../data/specifier_sets.jsonl");

#[derive(Deserialize)]
struct Instance {
    spec: String,
    candidates: Vec<String>,
    expected: Vec<String>,
}

fn parse_all(xs: &[String]) -> Vec<Version> {
    xs.iter().map(|s| Version::parse(s).unwrap()).collect()
}

pub fn frozen_instances() {
    let mut n = 0;
    for line in SETS.lines() {
        let inst: Instance = serde_json::from_str(line).unwrap();
        let set = SpecifierSet::parse(&inst.spec).unwrap();
        let got = satisfying_versions(&set, &parse_all(&inst.candidates));
        assert_eq!(got, parse_all(&inst.expected), "spec {:?}", inst.spec);
        n += 1;
    }
    assert_eq!(n, 500);
}

pub fn prereleases_need_opt_in() {
    let cands = parse_all(&["1.0".into(), "1.1rc1".into(), "2.0".into()]);
    let set = SpecifierSet::parse(">=1.0").unwrap();
    assert_eq!(
        satisfying_versions(&set, &cands),
        parse_all(&["1.0".into(), "2.0".into()])
    );
    let set = SpecifierSet::parse(">=1.1rc1").unwrap();
    assert_eq!(
        satisfying_versions(&set, &cands),
        parse_all(&["1.1rc1".into(), "2.0".into()])
    );
    let set = SpecifierSet::parse(">=1.0").unwrap().with_prereleases(true);
    assert_eq!(satisfying_versions(&set, &cands).len(), 3);
    let set = SpecifierSet::parse("").unwrap();
    assert_eq!(satisfying_versions(&set, &cands).len(), 2);
}

fn version() -> impl Strategy<Value = String> {
    (
        prop::collection::vec(0u64..6, 1..4),
        prop::option::weighted(0.25, (prop::sample::select(vec!["a", "b", "rc"]), 0u64..3)),
        prop::option::weighted(0.15, 0u64..3),
        prop::option::weighted(0.15, 0u64..3),
    )
        .prop_map(|(rel, pre, post, dev)| {
            let mut s = rel.iter().map(u64::to_string).collect::<Vec<_>>().join(".");
            if let Some((l, n)) = pre {
                s.push_str(&format!("{l}{n}"));
            }
            if let Some(n) = post {
                s.push_str(&format!(".post{n}"));
            }
            if let Some(n) = dev {
                s.push_str(&format!(".dev{n}"));
            }
            s
        })
}

pub const CASES: u32 = 2_000;

/// `~=X.Y.Z` is `>=X.Y.Z, ==X.Y.*` and the same pre-release gate.
pub fn compatible_release_expansion(cases: u32) {
    let strategy = (
        prop::collection::vec(0u64..6, 2..4),
        version(),
        any::<bool>(),
    );
    check_cases(cases, &strategy, |(base, cand, pre)| {
        let base_text = base
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(".");
        let prefix = base[..base.len() - 1]
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(".");
        let compat = SpecifierSet::parse(&format!("~={base_text}"))
            .unwrap()
            .with_prereleases(pre);
        let expanded = SpecifierSet::parse(&format!(">={base_text},=={prefix}.*"))
            .unwrap()
            .with_prereleases(pre);
        let v = Version::parse(&cand).unwrap();
        prop_assert_eq!(compat.matches(&v), expanded.matches(&v));
        Ok(())
    });
}

/// Filtering a list equals testing each element, sorted ascending.
pub fn satisfying_is_filter(cases: u32) {
    check_cases(
        cases,
        &(prop::collection::vec(version(), 0..20), version()),
        |(cands, bound)| {
            let set = SpecifierSet::parse(&format!(">={bound},!=2.0")).unwrap();
            let cands: Vec<Version> = cands.iter().map(|c| Version::parse(c).unwrap()).collect();
            let mut expected: Vec<Version> =
                cands.iter().filter(|c| set.matches(c)).cloned().collect();
            expected.sort();
            prop_assert_eq!(satisfying_versions(&set, &cands), expected);
            Ok(())
        },
    );
}
