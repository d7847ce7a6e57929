//! Version-sensitive supply-chain construction.
//!
//! Starting from seed packages with all their registry versions, each round
//! queries the direct dependents of every newly reached (package, version),
//! merges the version relations into the edge's `rels` map, and schedules the
//! (package, version) pairs not seen before. The loop stops when a round adds
//! nothing new.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ChainError;
use crate::registry::{DbOptions, DependencyDb};
use crate::requirement::normalize_name;
use crate::version::Version;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackageNode {
    pub name: String,
    /// Versions of this package that appear in the supply chain.
    pub vs: BTreeSet<Version>,
    pub is_seed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyEdge {
    pub up: String,
    pub down: String,
    /// Upstream version -> downstream versions depending on it.
    pub rels: BTreeMap<Version, BTreeSet<Version>>,
}

impl DependencyEdge {
    /// `(up_version, down_version)` pairs in rels order.
    pub fn pairs(&self) -> impl Iterator<Item = (&Version, &Version)> {
        self.rels
            .iter()
            .flat_map(|(u, downs)| downs.iter().map(move |d| (u, d)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "GraphFile", try_from = "GraphFile")]
pub struct SupplyChainGraph {
    pub nodes: BTreeMap<String, PackageNode>,
    pub edges: BTreeMap<(String, String), DependencyEdge>,
    pub seeds: Vec<String>,
    pub registry_hash: String,
    pub db_options: DbOptions,
    pub built_at: Option<DateTime<Utc>>,
}

/// On-disk JSON layout of a graph.
#[derive(Serialize, Deserialize)]
struct GraphFile {
    seeds: Vec<String>,
    registry_hash: String,
    db_options: DbOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    built_at: Option<DateTime<Utc>>,
    nodes: Vec<PackageNode>,
    edges: Vec<DependencyEdge>,
}

impl From<SupplyChainGraph> for GraphFile {
    fn from(g: SupplyChainGraph) -> Self {
        GraphFile {
            seeds: g.seeds,
            registry_hash: g.registry_hash,
            db_options: g.db_options,
            built_at: g.built_at,
            nodes: g.nodes.into_values().collect(),
            edges: g.edges.into_values().collect(),
        }
    }
}

impl TryFrom<GraphFile> for SupplyChainGraph {
    type Error = ChainError;

    fn try_from(f: GraphFile) -> Result<Self, Self::Error> {
        let g = SupplyChainGraph {
            nodes: f.nodes.into_iter().map(|n| (n.name.clone(), n)).collect(),
            edges: f
                .edges
                .into_iter()
                .map(|e| ((e.up.clone(), e.down.clone()), e))
                .collect(),
            seeds: f.seeds,
            registry_hash: f.registry_hash,
            db_options: f.db_options,
            built_at: f.built_at,
        };
        g.validate()?;
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub packages: usize,
    pub versions: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Drop seeds missing from the registry instead of failing.
    pub skip_unknown_seeds: bool,
}

type VersionMap = BTreeMap<String, BTreeSet<Version>>;

pub fn build_supply_chain(
    db: &DependencyDb,
    seeds: &[String],
    options: BuildOptions,
) -> Result<SupplyChainGraph, ChainError> {
    let registry = db.registry();
    let mut seed_names = BTreeSet::new();
    for s in seeds {
        let name = normalize_name(s).map_err(|_| ChainError::UnknownSeed(s.clone()))?;
        if registry.contains(&name) {
            seed_names.insert(name);
        } else if options.skip_unknown_seeds {
            log::warn!("seed {name} not in registry; skipped");
        } else {
            return Err(ChainError::UnknownSeed(s.clone()));
        }
    }
    if seed_names.is_empty() {
        return Err(ChainError::NoSeeds);
    }

    let mut packages: VersionMap = seed_names
        .iter()
        .map(|n| {
            (
                n.clone(),
                registry.get_all_versions(n).into_iter().collect(),
            )
        })
        .collect();
    let mut unvisited = packages.clone();
    let mut edges: BTreeMap<(String, String), DependencyEdge> = BTreeMap::new();

    while !unvisited.is_empty() {
        let queries: Vec<(&String, &Version)> = unvisited
            .iter()
            .flat_map(|(name, vs)| vs.iter().map(move |v| (name, v)))
            .collect();
        // Query order is fixed by the sorted maps; merging is a set union, so
        // the result does not depend on how rayon schedules the lookups.
        let answers: Vec<_> = queries
            .par_iter()
            .map(|&(name, v)| db.get_dependents(name, v))
            .collect();

        let mut dependents: VersionMap = BTreeMap::new();
        for ((up, up_version), dps) in queries.iter().zip(answers) {
            for (down, down_versions) in dps {
                edges
                    .entry(((*up).clone(), down.clone()))
                    .or_insert_with(|| DependencyEdge {
                        up: (*up).clone(),
                        down: down.clone(),
                        rels: BTreeMap::new(),
                    })
                    .rels
                    .entry((*up_version).clone())
                    .or_default()
                    .extend(down_versions.iter().cloned());
                dependents.entry(down).or_default().extend(down_versions);
            }
        }

        unvisited = BTreeMap::new();
        for (name, vs) in dependents {
            let known = packages.entry(name.clone()).or_default();
            let fresh: BTreeSet<Version> = vs.difference(known).cloned().collect();
            if !fresh.is_empty() {
                known.extend(fresh.iter().cloned());
                unvisited.insert(name, fresh);
            }
        }
    }

    let nodes = packages
        .into_iter()
        .map(|(name, vs)| {
            let is_seed = seed_names.contains(&name);
            (name.clone(), PackageNode { name, vs, is_seed })
        })
        .collect();
    let graph = SupplyChainGraph {
        nodes,
        edges,
        seeds: seed_names.into_iter().collect(),
        registry_hash: registry.hash().to_string(),
        db_options: db.manifest().options,
        built_at: None,
    };
    graph.validate()?;
    Ok(graph)
}

impl SupplyChainGraph {
    pub fn stats(&self) -> GraphStats {
        GraphStats {
            packages: self.nodes.len(),
            versions: self.nodes.values().map(|n| n.vs.len()).sum(),
            edges: self.edges.len(),
        }
    }

    pub fn is_seed(&self, name: &str) -> bool {
        self.nodes.get(name).is_some_and(|n| n.is_seed)
    }

    /// Checks the structural invariants every built graph satisfies: rels
    /// reference only known versions, every non-seed package is reachable
    /// from a seed, and a non-seed's `vs` is exactly the union of the
    /// downstream versions on its incoming edges.
    pub fn validate(&self) -> Result<(), ChainError> {
        let fail = |m: String| Err(ChainError::Invariant(m));
        for seed in &self.seeds {
            if !self.is_seed(seed) {
                return fail(format!("seed {seed} missing or unflagged"));
            }
        }
        let mut incoming: VersionMap = BTreeMap::new();
        for ((up, down), e) in &self.edges {
            if e.up != *up || e.down != *down {
                return fail(format!(
                    "edge key ({up}, {down}) disagrees with its endpoints"
                ));
            }
            let (Some(u), Some(d)) = (self.nodes.get(up), self.nodes.get(down)) else {
                return fail(format!("edge {up} -> {down} has an unknown endpoint"));
            };
            if e.rels.is_empty() {
                return fail(format!("edge {up} -> {down} has empty rels"));
            }
            for (uv, dvs) in &e.rels {
                if !u.vs.contains(uv) {
                    return fail(format!("{up} {uv} is a rels key but not in vs"));
                }
                if dvs.is_empty() || !dvs.is_subset(&d.vs) {
                    return fail(format!("{up} {uv} -> {down}: versions outside vs"));
                }
                incoming
                    .entry(down.clone())
                    .or_default()
                    .extend(dvs.iter().cloned());
            }
        }
        for (name, node) in &self.nodes {
            if node.name != *name || node.vs.is_empty() {
                return fail(format!("node {name} malformed"));
            }
            if node.is_seed != self.seeds.contains(name) {
                return fail(format!("node {name} seed flag disagrees with seed list"));
            }
            if !node.is_seed && incoming.get(name) != Some(&node.vs) {
                return fail(format!(
                    "vs of {name} is not the union of its incoming rels"
                ));
            }
        }

        let mut adjacency: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (up, down) in self.edges.keys() {
            adjacency.entry(up).or_default().push(down);
        }
        let mut seen: BTreeSet<&str> = self.seeds.iter().map(String::as_str).collect();
        let mut queue: VecDeque<&str> = seen.iter().copied().collect();
        while let Some(n) = queue.pop_front() {
            for &m in adjacency.get(n).into_iter().flatten() {
                if seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        if let Some(orphan) = self.nodes.keys().find(|n| !seen.contains(n.as_str())) {
            return fail(format!("{orphan} is not reachable from any seed"));
        }
        Ok(())
    }
}

pub fn graph_stats(g: &SupplyChainGraph) -> GraphStats {
    g.stats()
}
