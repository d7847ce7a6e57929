use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::ClusterError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Shape {
    Arrow,
    Star,
    Tree,
    Forest,
    Other,
}

impl Shape {
    pub const ALL: [Shape; 5] = [
        Shape::Arrow,
        Shape::Star,
        Shape::Tree,
        Shape::Forest,
        Shape::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Shape::Arrow => "Arrow",
            Shape::Star => "Star",
            Shape::Tree => "Tree",
            Shape::Forest => "Forest",
            Shape::Other => "Other",
        }
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Dense adjacency of a cluster's induced subgraph. Indices follow the sorted
/// member order.
struct Local<'a> {
    names: Vec<&'a String>,
    out: Vec<Vec<usize>>,
    indeg: Vec<usize>,
    self_loops: usize,
    edge_count: usize,
}

impl<'a> Local<'a> {
    fn new(members: &'a BTreeSet<String>, edges: &BTreeSet<(String, String)>) -> Self {
        let names: Vec<&String> = members.iter().collect();
        let index: BTreeMap<&String, usize> =
            names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut out = vec![Vec::new(); names.len()];
        let mut indeg = vec![0; names.len()];
        let mut self_loops = 0;
        let mut edge_count = 0;
        for (u, d) in edges {
            let (Some(&ui), Some(&di)) = (index.get(u), index.get(d)) else {
                continue;
            };
            edge_count += 1;
            if ui == di {
                self_loops += 1;
                continue;
            }
            out[ui].push(di);
            indeg[di] += 1;
        }
        Local {
            names,
            out,
            indeg,
            self_loops,
            edge_count,
        }
    }

    /// Topological order of the non-loop edges, or `None` if they contain a cycle.
    fn topo_order(&self) -> Option<Vec<usize>> {
        let mut indeg = self.indeg.clone();
        let mut queue: VecDeque<usize> = (0..self.names.len()).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(self.names.len());
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &self.out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        (order.len() == self.names.len()).then_some(order)
    }

    /// Number of members reachable from `v`, excluding `v` itself.
    fn reachable_from(&self, v: usize) -> usize {
        let mut seen = vec![false; self.names.len()];
        seen[v] = true;
        let mut stack = vec![v];
        let mut count = 0;
        while let Some(x) = stack.pop() {
            for &w in &self.out[x] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count
    }

    fn roots(&self) -> Vec<usize> {
        (0..self.names.len())
            .filter(|&i| self.indeg[i] == 0)
            .collect()
    }
}

pub fn classify_shape(
    members: &BTreeSet<String>,
    edges: &BTreeSet<(String, String)>,
) -> Result<Shape, ClusterError> {
    let g = Local::new(members, edges);
    if g.edge_count == 0 {
        return Err(ClusterError::DegenerateCluster(
            members.iter().cloned().collect(),
        ));
    }
    if g.self_loops > 0 || g.topo_order().is_none() {
        return Ok(Shape::Other);
    }
    let n = g.names.len();
    if n == 2 && g.edge_count == 1 {
        return Ok(Shape::Arrow);
    }
    let roots = g.roots();
    if roots.len() == 1 {
        let root = roots[0];
        let from_root = g.out[root].len();
        return Ok(if from_root == g.edge_count {
            Shape::Star
        } else {
            Shape::Tree
        });
    }
    let sinks: Vec<usize> = (0..n).filter(|&i| g.out[i].is_empty()).collect();
    let inverse_star = sinks.len() == 1 && g.edge_count == n - 1 && g.indeg[sinks[0]] == n - 1;
    Ok(if inverse_star {
        Shape::Other
    } else {
        Shape::Forest
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterMetrics {
    pub size: usize,
    pub avg_degree: f64,
    pub depth: usize,
    pub roots: Vec<String>,
    pub core: String,
}

/// Metrics of a classified cluster.
///
/// Self-edges count toward `avg_degree` but are ignored for roots, depth and
/// core selection. Depth is the longest directed path and is 0 for `Other`.
pub fn cluster_metrics(
    members: &BTreeSet<String>,
    edges: &BTreeSet<(String, String)>,
    shape: Shape,
) -> ClusterMetrics {
    let g = Local::new(members, edges);
    let size = g.names.len();
    let avg_degree = if size == 0 {
        0.0
    } else {
        g.edge_count as f64 / size as f64
    };
    let depth = match (shape, g.topo_order()) {
        (Shape::Other, _) | (_, None) => 0,
        (_, Some(order)) => {
            let mut dist = vec![0usize; size];
            for v in order {
                for &w in &g.out[v] {
                    dist[w] = dist[w].max(dist[v] + 1);
                }
            }
            dist.into_iter().max().unwrap_or(0)
        }
    };
    let roots = g.roots().into_iter().map(|i| g.names[i].clone()).collect();
    // Ranked by direct dependents, then transitive dependents; members are
    // name-sorted so the first maximum wins remaining ties.
    let key = |i: usize| (g.out[i].len(), g.reachable_from(i));
    let core = (0..size)
        .map(|i| (i, key(i)))
        .fold(None::<(usize, (usize, usize))>, |best, (i, k)| match best {
            Some((_, bk)) if bk >= k => best,
            _ => Some((i, k)),
        })
        .map(|(i, _)| g.names[i].clone())
        .unwrap_or_default();
    ClusterMetrics {
        size,
        avg_degree,
        depth,
        roots,
        core,
    }
}
