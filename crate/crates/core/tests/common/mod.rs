//! Shared fixtures, random registry generators and brute-force oracles.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use chainforge::chain::{build_supply_chain, BuildOptions, SupplyChainGraph};
use chainforge::registry::{DbOptions, DependencyDb, Registry};
use chainforge::requirement::Requirement;
use chainforge::version::Version;
use proptest::prelude::*;
use proptest::test_runner::{TestCaseError, TestRunner};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub mod dynamics;
pub mod specifier_oracle;
pub mod stats;
pub mod version_props;

/// Runs `test` on `cases` generated inputs and panics with the shrunk
/// counterexample on failure.
pub fn check_cases<S: Strategy>(
    cases: u32,
    strategy: &S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) {
    let config = ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    };
    let mut runner = TestRunner::new(config);
    if let Err(e) = runner.run(strategy, test) {
        panic!("{e}");
    }
}

pub fn v(s: &str) -> Version {
    Version::parse(s).unwrap()
}

/// One JSON Lines metadata record.
pub fn line(name: &str, version: &str, upload: Option<&str>, requires: &[&str]) -> String {
    json!({
        "name": name,
        "version": version,
        "upload_time": upload,
        "requires_dist": requires,
    })
    .to_string()
}

pub fn registry(lines: &[String]) -> Registry {
    Registry::ingest(lines.join("\n").as_bytes()).unwrap()
}

pub fn db(lines: &[String]) -> DependencyDb {
    DependencyDb::build(&registry(lines), DbOptions::default())
}

pub fn chain(db: &DependencyDb, seeds: &[&str]) -> SupplyChainGraph {
    let seeds: Vec<String> = seeds.iter().map(|s| s.to_string()).collect();
    build_supply_chain(db, &seeds, BuildOptions::default()).unwrap()
}

/// Seed `pu` with three versions; `pd` 2 and 3 accept `pu` 2 or 3, `pd` 1
/// accepts only `pu` 3.
pub fn ranged_pair_lines() -> Vec<String> {
    vec![
        line("pu", "1", Some("2020-01-01T00:00:00"), &[]),
        line("pu", "2", Some("2020-02-01T00:00:00"), &[]),
        line("pu", "3", Some("2020-03-01T00:00:00"), &[]),
        line("pd", "1", Some("2020-04-01T00:00:00"), &["pu==3"]),
        line("pd", "2", Some("2020-05-01T00:00:00"), &["pu>=2"]),
        line("pd", "3", Some("2020-06-01T00:00:00"), &["pu (>=2,<4)"]),
    ]
}

/// s <- a <- c and s <- b <- c.
pub fn diamond_lines() -> Vec<String> {
    vec![
        line("s", "1.0", None, &[]),
        line("s", "2.0", None, &[]),
        line("a", "1.0", None, &["s>=1"]),
        line("b", "1.0", None, &["s==2.*"]),
        line("b", "1.1", None, &["s"]),
        line("c", "0.1", None, &["a", "b>=1.1"]),
    ]
}

const RELEASES: &[&str] = &[
    "0.1",
    "0.2",
    "0.9",
    "1.0a1",
    "1.0rc1",
    "1.0",
    "1.0.post1",
    "1.1",
    "1.1.dev0",
    "2.0b1",
    "2.0",
    "2.1",
    "3.0",
];

/// Random registry as JSON Lines: up to `max_pkgs` packages with up to
/// `max_versions` releases each and assorted requirement strings.
pub fn random_registry_lines(seed: u64, max_pkgs: usize, max_versions: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_pkgs);
    let names: Vec<String> = (0..n).map(|i| format!("pkg-{i}")).collect();
    let mut lines = Vec::new();
    for name in &names {
        let k = rng.gen_range(1..=max_versions.min(RELEASES.len()));
        let mut versions: Vec<&str> = RELEASES.choose_multiple(&mut rng, k).copied().collect();
        versions.sort();
        for ver in versions {
            let reqs: Vec<String> = (0..rng.gen_range(0..=3))
                .map(|_| random_requirement(&mut rng, &names))
                .collect();
            let reqs: Vec<&str> = reqs.iter().map(String::as_str).collect();
            let month = rng.gen_range(1..=12);
            let upload = format!("2020-{month:02}-01T00:00:00");
            lines.push(line(name, ver, Some(&upload), &reqs));
        }
    }
    lines
}

fn random_requirement(rng: &mut ChaCha8Rng, names: &[String]) -> String {
    if rng.gen_bool(0.05) {
        return "%% not a requirement".into();
    }
    let target = if rng.gen_bool(0.1) {
        "numpy".to_string()
    } else {
        // Exercise name normalization.
        names
            .choose(rng)
            .unwrap()
            .replace('-', if rng.gen_bool(0.3) { "_" } else { "-" })
            .to_uppercase()
    };
    let ver = RELEASES.choose(rng).unwrap();
    let spec = match rng.gen_range(0..9) {
        0 => String::new(),
        1 => format!(">={ver}"),
        2 => format!("<{ver}"),
        3 => "==1.*".into(),
        4 => "~=1.0".into(),
        5 => format!("!={ver}"),
        6 => format!(">{ver},<3"),
        7 => format!("=={ver}"),
        _ => format!("<={ver}"),
    };
    let marker = match rng.gen_range(0..10) {
        0 | 1 => "; extra == \"dev\"",
        2 => "; python_version >= \"3.6\"",
        _ => "",
    };
    let extras = if rng.gen_bool(0.1) { "[gpu]" } else { "" };
    format!("{target}{extras}{spec}{marker}")
}

pub type Record = (String, Version, String, Version, bool);

/// Every (upstream release, downstream release, requirement) triple checked
/// directly; an edge is extra-gated only if every requirement producing it is.
pub fn naive_db(r: &Registry, options: DbOptions) -> BTreeSet<Record> {
    let mut edges: BTreeMap<(String, Version, String, Version), bool> = BTreeMap::new();
    for up in r.package_names() {
        for up_rel in r.releases(up).unwrap() {
            for down in r.package_names() {
                for down_rel in r.releases(down).unwrap() {
                    for text in &down_rel.requires_dist {
                        let Ok(req) = Requirement::parse(text) else {
                            continue;
                        };
                        if req.name != up || !req.specifiers.matches(&up_rel.version) {
                            continue;
                        }
                        let gated = req.extra_gated();
                        if gated && !options.include_extra_gated {
                            continue;
                        }
                        let key = (
                            up.to_string(),
                            up_rel.version.clone(),
                            down.to_string(),
                            down_rel.version.clone(),
                        );
                        *edges.entry(key).or_insert(true) &= gated;
                    }
                }
            }
        }
    }
    edges
        .into_iter()
        .map(|((a, b, c, d), g)| (a, b, c, d, g))
        .collect()
}

pub fn db_records(db: &DependencyDb) -> BTreeSet<Record> {
    db.records()
        .map(|r| {
            (
                r.up_name,
                r.up_version,
                r.down_name,
                r.down_version,
                r.extra_gated,
            )
        })
        .collect()
}

/// Package-level closure under "depends on", starting from `seeds`, computed
/// from the naive record set.
pub fn naive_reachable(
    records: &BTreeSet<Record>,
    r: &Registry,
    seeds: &[&str],
) -> BTreeMap<String, BTreeSet<Version>> {
    let mut vs: BTreeMap<String, BTreeSet<Version>> = BTreeMap::new();
    for s in seeds {
        vs.insert(s.to_string(), r.get_all_versions(s).into_iter().collect());
    }
    loop {
        let mut changed = false;
        for (u, uv, d, dv, _) in records {
            if vs.get(u).is_some_and(|set| set.contains(uv))
                && vs.entry(d.clone()).or_default().insert(dv.clone())
            {
                changed = true;
            }
        }
        if !changed {
            return vs;
        }
    }
}
