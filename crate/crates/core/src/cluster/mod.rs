//! Package-level cluster analysis of a supply chain: seed pruning, community
//! detection, shape classification and per-cluster metrics.

mod leiden;
mod report;
mod shape;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::chain::SupplyChainGraph;
use crate::error::ClusterError;

pub use leiden::{detect_communities, modularity, LeidenParams, Partition};
pub use report::{shape_report, LargeCluster, ShapeReport, ShapeSummary, SizeTest};
pub use shape::{classify_shape, cluster_metrics, ClusterMetrics, Shape};

/// The supply chain without its seeds, collapsed to one directed edge per
/// (upstream, downstream) package pair.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrunedGraph {
    pub nodes: BTreeSet<String>,
    /// `(up, down)`: `down` depends on `up`. Self-edges mark packages whose
    /// later versions depend on earlier ones.
    pub edges: BTreeSet<(String, String)>,
    /// Nodes without any incident edge (self-edges count).
    pub isolated: BTreeSet<String>,
}

impl PrunedGraph {
    pub fn from_edges<I, S>(nodes: I, edges: &[(&str, &str)]) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut nodes: BTreeSet<String> = nodes.into_iter().map(Into::into).collect();
        let edges: BTreeSet<(String, String)> = edges
            .iter()
            .map(|(u, d)| (u.to_string(), d.to_string()))
            .collect();
        for (u, d) in &edges {
            nodes.insert(u.clone());
            nodes.insert(d.clone());
        }
        let mut g = PrunedGraph {
            nodes,
            edges,
            isolated: BTreeSet::new(),
        };
        g.isolated = g.compute_isolated();
        g
    }

    fn compute_isolated(&self) -> BTreeSet<String> {
        let touched: BTreeSet<&String> = self.edges.iter().flat_map(|(u, d)| [u, d]).collect();
        self.nodes
            .iter()
            .filter(|n| !touched.contains(n))
            .cloned()
            .collect()
    }

    /// Nodes with at least one incident edge.
    pub fn active_nodes(&self) -> impl Iterator<Item = &String> {
        self.nodes.iter().filter(|n| !self.isolated.contains(*n))
    }

    /// Edges whose endpoints both lie in `members`.
    pub fn induced_edges(&self, members: &BTreeSet<String>) -> BTreeSet<(String, String)> {
        self.edges
            .iter()
            .filter(|(u, d)| members.contains(u) && members.contains(d))
            .cloned()
            .collect()
    }
}

pub fn prune(g: &SupplyChainGraph) -> PrunedGraph {
    let nodes: BTreeSet<String> = g
        .nodes
        .values()
        .filter(|n| !n.is_seed)
        .map(|n| n.name.clone())
        .collect();
    let edges: BTreeSet<(String, String)> = g
        .edges
        .keys()
        .filter(|(u, d)| nodes.contains(u) && nodes.contains(d))
        .cloned()
        .collect();
    let mut out = PrunedGraph {
        nodes,
        edges,
        isolated: BTreeSet::new(),
    };
    out.isolated = out.compute_isolated();
    out
}

pub fn isolated_ratio(p: &PrunedGraph) -> Result<f64, ClusterError> {
    if p.nodes.is_empty() {
        return Err(ClusterError::EmptyGraph);
    }
    Ok(p.isolated.len() as f64 / p.nodes.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub id: usize,
    pub members: BTreeSet<String>,
    pub edges: BTreeSet<(String, String)>,
    pub shape: Shape,
    pub size: usize,
    pub avg_degree: f64,
    pub depth: usize,
    pub roots: Vec<String>,
    pub core: String,
}

/// Classifies and measures every community of `partition`.
///
/// A community that cannot be classified (an edgeless singleton, which a
/// modularity optimum never produces at resolution 1) is reported as
/// [`Shape::Other`].
pub fn build_clusters(p: &PrunedGraph, partition: &Partition) -> Vec<Cluster> {
    partition
        .communities
        .iter()
        .enumerate()
        .map(|(id, members)| {
            let edges = p.induced_edges(members);
            let shape = classify_shape(members, &edges).unwrap_or_else(|e| {
                log::warn!("community {id}: {e}; reported as Other");
                Shape::Other
            });
            let m = cluster_metrics(members, &edges, shape);
            Cluster {
                id,
                members: members.clone(),
                edges,
                shape,
                size: m.size,
                avg_degree: m.avg_degree,
                depth: m.depth,
                roots: m.roots,
                core: m.core,
            }
        })
        .collect()
}

/// Full cluster analysis result, the payload of the cluster report file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAnalysis {
    pub params: LeidenParams,
    pub registry_hash: String,
    pub pruned: PrunedSummary,
    pub isolated: IsolatedSummary,
    pub modularity: f64,
    pub quality_trace: Vec<f64>,
    pub clusters: Vec<ClusterEntry>,
    pub summary: ShapeReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrunedSummary {
    pub nodes: usize,
    pub active_nodes: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsolatedSummary {
    pub count: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEntry {
    pub id: usize,
    pub members: Vec<String>,
    pub shape: Shape,
    pub size: usize,
    pub avg_degree: f64,
    pub depth: usize,
    pub roots: Vec<String>,
    pub core: String,
    pub edges: Vec<(String, String)>,
}

impl From<&Cluster> for ClusterEntry {
    fn from(c: &Cluster) -> Self {
        ClusterEntry {
            id: c.id,
            members: c.members.iter().cloned().collect(),
            shape: c.shape,
            size: c.size,
            avg_degree: c.avg_degree,
            depth: c.depth,
            roots: c.roots.clone(),
            core: c.core.clone(),
            edges: c.edges.iter().cloned().collect(),
        }
    }
}

pub fn analyze(g: &SupplyChainGraph, params: LeidenParams) -> ClusterAnalysis {
    let pruned = prune(g);
    let partition = detect_communities(&pruned, &params);
    let clusters = build_clusters(&pruned, &partition);
    ClusterAnalysis {
        params,
        registry_hash: g.registry_hash.clone(),
        pruned: PrunedSummary {
            nodes: pruned.nodes.len(),
            active_nodes: pruned.active_nodes().count(),
            edges: pruned.edges.len(),
        },
        isolated: IsolatedSummary {
            count: pruned.isolated.len(),
            ratio: isolated_ratio(&pruned).unwrap_or(0.0),
        },
        modularity: partition.modularity,
        quality_trace: partition.quality_trace.clone(),
        summary: shape_report(&clusters),
        clusters: clusters.iter().map(ClusterEntry::from).collect(),
    }
}

/// DOT rendering of one cluster, roots drawn as boxes.
pub fn cluster_dot(c: &ClusterEntry) -> String {
    let roots: BTreeSet<&String> = c.roots.iter().collect();
    let mut out = format!(
        "digraph cluster_{} {{\n  label=\"{} ({} packages)\";\n",
        c.id,
        c.shape.as_str(),
        c.size
    );
    for m in &c.members {
        let attrs = if roots.contains(m) {
            " [shape=box]"
        } else {
            ""
        };
        out.push_str(&format!("  \"{m}\"{attrs};\n"));
    }
    for (u, d) in &c.edges {
        out.push_str(&format!("  \"{u}\" -> \"{d}\";\n"));
    }
    out.push_str("}\n");
    out
}

/// Per-shape count of clusters, keyed in taxonomy order.
pub fn shape_counts(clusters: &[Cluster]) -> BTreeMap<Shape, usize> {
    let mut out = BTreeMap::new();
    for c in clusters {
        *out.entry(c.shape).or_insert(0) += 1;
    }
    out
}
