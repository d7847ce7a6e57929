//! Leiden community detection maximizing modularity on the undirected,
//! unweighted package graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PrunedGraph;

/// Randomness of the refinement merge choice.
const THETA: f64 = 0.01;
const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeidenParams {
    pub rng_seed: u64,
    pub resolution: f64,
    /// Upper bound on full Leiden iterations; iteration stops earlier once
    /// the partition is stable.
    pub max_passes: usize,
}

impl Default for LeidenParams {
    fn default() -> Self {
        LeidenParams {
            rng_seed: 0,
            resolution: 1.0,
            max_passes: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    /// Sorted by smallest member name.
    pub communities: Vec<BTreeSet<String>>,
    /// Modularity of the final partition.
    pub modularity: f64,
    /// Modularity after each pass; non-decreasing.
    pub quality_trace: Vec<f64>,
}

/// Weighted undirected graph. `adj` holds no self entries; `self_w` carries
/// loop weight with each loop counted once.
#[derive(Debug, Clone)]
struct Graph {
    adj: Vec<Vec<(usize, f64)>>,
    self_w: Vec<f64>,
    strength: Vec<f64>,
    total: f64,
}

impl Graph {
    fn new(adj: Vec<Vec<(usize, f64)>>, self_w: Vec<f64>) -> Self {
        let strength: Vec<f64> = adj
            .iter()
            .zip(&self_w)
            .map(|(a, s)| a.iter().map(|(_, w)| w).sum::<f64>() + 2.0 * s)
            .collect();
        let total = strength.iter().sum();
        Graph {
            adj,
            self_w,
            strength,
            total,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn quality(&self, comm: &[usize], gamma: f64) -> f64 {
        if self.total == 0.0 {
            return 0.0;
        }
        let n = self.len();
        let mut internal = vec![0.0; n];
        let mut k = vec![0.0; n];
        for v in 0..n {
            k[comm[v]] += self.strength[v];
            internal[comm[v]] += 2.0 * self.self_w[v];
            for &(u, w) in &self.adj[v] {
                if comm[u] == comm[v] {
                    internal[comm[v]] += w;
                }
            }
        }
        (0..n)
            .map(|c| internal[c] - gamma * k[c] * k[c] / self.total)
            .sum::<f64>()
            / self.total
    }
}

/// Relabels communities to `0..count` in order of first appearance.
fn relabel(comm: &[usize]) -> (Vec<usize>, usize) {
    let mut map = vec![usize::MAX; comm.len().max(comm.iter().max().map_or(0, |m| m + 1))];
    let mut next = 0;
    let out = comm
        .iter()
        .map(|&c| {
            if map[c] == usize::MAX {
                map[c] = next;
                next += 1;
            }
            map[c]
        })
        .collect();
    (out, next)
}

fn move_nodes(g: &Graph, comm: &mut [usize], gamma: f64, rng: &mut ChaCha8Rng) {
    let n = g.len();
    let mut k_comm = vec![0.0; n];
    let mut size = vec![0usize; n];
    for v in 0..n {
        k_comm[comm[v]] += g.strength[v];
        size[comm[v]] += 1;
    }
    let mut empty: Vec<usize> = (0..n).filter(|&c| size[c] == 0).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut queue: VecDeque<usize> = order.into();
    let mut queued = vec![true; n];
    let mut w_to = vec![0.0; n];
    let mut touched = Vec::new();

    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        let kv = g.strength[v];
        let cur = comm[v];
        k_comm[cur] -= kv;
        size[cur] -= 1;
        if size[cur] == 0 {
            empty.push(cur);
        }
        for &(u, w) in &g.adj[v] {
            let c = comm[u];
            if w_to[c] == 0.0 {
                touched.push(c);
            }
            w_to[c] += w;
        }
        let gain = |c: usize, w: f64| w - gamma * kv * k_comm[c] / g.total;
        let mut best = cur;
        let mut best_gain = gain(cur, w_to[cur]);
        for &c in &touched {
            let x = gain(c, w_to[c]);
            if x > best_gain + EPS {
                best = c;
                best_gain = x;
            }
        }
        if best_gain < -EPS {
            while let Some(&c) = empty.last() {
                if size[c] == 0 {
                    break;
                }
                empty.pop();
            }
            if let Some(&c) = empty.last() {
                best = c;
            }
        }
        for &c in &touched {
            w_to[c] = 0.0;
        }
        touched.clear();

        comm[v] = best;
        k_comm[best] += kv;
        size[best] += 1;
        if best != cur {
            for &(u, _) in &g.adj[v] {
                if !queued[u] && comm[u] != best {
                    queued[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
}

/// Merges singletons within each community of `comm` into well-connected
/// sub-communities.
fn refine(g: &Graph, comm: &[usize], gamma: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = g.len();
    let mut k_outer = vec![0.0; n];
    for v in 0..n {
        k_outer[comm[v]] += g.strength[v];
    }
    let mut refined: Vec<usize> = (0..n).collect();
    let mut k_ref = g.strength.clone();
    let mut size_ref = vec![1usize; n];
    // Weight from each refined community to the rest of its outer community.
    let mut ext: Vec<f64> = (0..n)
        .map(|v| {
            g.adj[v]
                .iter()
                .filter(|(u, _)| comm[*u] == comm[v])
                .map(|(_, w)| w)
                .sum()
        })
        .collect();
    let half = g.total / 2.0;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut w_to = vec![0.0; n];
    let mut touched = Vec::new();

    for v in order {
        let rv = refined[v];
        if size_ref[rv] != 1 {
            continue;
        }
        let kv = g.strength[v];
        let outer = k_outer[comm[v]];
        if ext[rv] + EPS < gamma * kv * (outer - kv) / g.total {
            continue;
        }
        for &(u, w) in &g.adj[v] {
            if comm[u] != comm[v] {
                continue;
            }
            let r = refined[u];
            if w_to[r] == 0.0 {
                touched.push(r);
            }
            w_to[r] += w;
        }
        k_ref[rv] -= kv;
        let mut candidates = vec![(rv, 0.0)];
        for &r in &touched {
            if r == rv {
                continue;
            }
            let well_connected = ext[r] + EPS >= gamma * k_ref[r] * (outer - k_ref[r]) / g.total;
            let gain = w_to[r] - gamma * kv * k_ref[r] / g.total;
            if well_connected && gain >= 0.0 {
                candidates.push((r, gain / half));
            }
        }
        let top = candidates.iter().map(|c| c.1).fold(f64::MIN, f64::max);
        let weights: Vec<f64> = candidates
            .iter()
            .map(|c| ((c.1 - top) / THETA).exp())
            .collect();
        let mut pick = rng.gen::<f64>() * weights.iter().sum::<f64>();
        let mut chosen = candidates[candidates.len() - 1].0;
        for (c, w) in candidates.iter().zip(&weights) {
            if pick < *w {
                chosen = c.0;
                break;
            }
            pick -= w;
        }
        if chosen != rv {
            refined[v] = chosen;
            size_ref[chosen] += 1;
            size_ref[rv] = 0;
            ext[chosen] += ext[rv] - 2.0 * w_to[chosen];
        }
        k_ref[refined[v]] += kv;
        for &r in &touched {
            w_to[r] = 0.0;
        }
        touched.clear();
    }
    refined
}

/// Collapses each community of `part` into one node.
fn aggregate(g: &Graph, part: &[usize], count: usize) -> Graph {
    let mut edges: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); count];
    let mut self_w = vec![0.0; count];
    for v in 0..g.len() {
        let a = part[v];
        self_w[a] += g.self_w[v];
        for &(u, w) in &g.adj[v] {
            let b = part[u];
            if a == b {
                self_w[a] += w / 2.0;
            } else {
                *edges[a].entry(b).or_insert(0.0) += w;
            }
        }
    }
    let adj = edges.into_iter().map(|m| m.into_iter().collect()).collect();
    Graph::new(adj, self_w)
}

/// One Leiden iteration on `g0` starting from `init`.
fn leiden_iteration(g0: &Graph, init: &[usize], gamma: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut g = g0.clone();
    let (mut comm, _) = relabel(init);
    let mut node_map: Vec<usize> = (0..g0.len()).collect();
    loop {
        move_nodes(&g, &mut comm, gamma, rng);
        let (moved, count) = relabel(&comm);
        comm = moved;
        if count == g.len() {
            break;
        }
        let (mut refined, mut refined_count) = relabel(&refine(&g, &comm, gamma, rng));
        if refined_count == g.len() {
            refined = comm.clone();
            refined_count = count;
        }
        let agg = aggregate(&g, &refined, refined_count);
        let mut next = vec![0; refined_count];
        for v in 0..g.len() {
            next[refined[v]] = comm[v];
        }
        for m in node_map.iter_mut() {
            *m = refined[*m];
        }
        g = agg;
        comm = next;
    }
    node_map.into_iter().map(|a| comm[a]).collect()
}

/// Splits every community into its connected components.
fn split_disconnected(g: &Graph, comm: &[usize]) -> Vec<usize> {
    let n = g.len();
    let mut out = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if out[s] != usize::MAX {
            continue;
        }
        out[s] = next;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &(u, _) in &g.adj[v] {
                if out[u] == usize::MAX && comm[u] == comm[s] {
                    out[u] = next;
                    stack.push(u);
                }
            }
        }
        next += 1;
    }
    out
}

fn run(g: &Graph, params: &LeidenParams) -> (Vec<usize>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut membership: Vec<usize> = (0..g.len()).collect();
    let mut trace: Vec<f64> = Vec::new();
    for _ in 0..params.max_passes.max(1) {
        let next = leiden_iteration(g, &membership, params.resolution, &mut rng);
        let (next, _) = relabel(&split_disconnected(g, &next));
        let q = g.quality(&next, params.resolution);
        if trace.last().is_some_and(|&prev| q < prev) {
            break;
        }
        trace.push(q);
        let stable = next == membership;
        membership = next;
        if stable {
            break;
        }
    }
    (membership, trace)
}

struct Indexed {
    names: Vec<String>,
    graph: Graph,
}

/// Undirected simple graph over nodes with at least one non-loop edge.
fn index(p: &PrunedGraph) -> Indexed {
    let pairs: BTreeSet<(&String, &String)> = p
        .edges
        .iter()
        .filter(|(u, d)| u != d)
        .map(|(u, d)| if u < d { (u, d) } else { (d, u) })
        .collect();
    let names: Vec<String> = pairs
        .iter()
        .flat_map(|(a, b)| [*a, *b])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .cloned()
        .collect();
    let id: BTreeMap<&String, usize> = names.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut adj = vec![Vec::new(); names.len()];
    for (a, b) in pairs {
        adj[id[a]].push((id[b], 1.0));
        adj[id[b]].push((id[a], 1.0));
    }
    for a in adj.iter_mut() {
        a.sort_by_key(|e| e.0);
    }
    let self_w = vec![0.0; names.len()];
    Indexed {
        graph: Graph::new(adj, self_w),
        names,
    }
}

pub fn detect_communities(p: &PrunedGraph, params: &LeidenParams) -> Partition {
    let Indexed { names, graph } = index(p);
    let (membership, quality_trace) = run(&graph, params);
    let modularity = graph.quality(&membership, params.resolution);
    let mut groups: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (i, c) in membership.iter().enumerate() {
        groups.entry(*c).or_default().insert(names[i].clone());
    }
    let clustered: BTreeSet<&String> = names.iter().collect();
    let mut communities: Vec<BTreeSet<String>> = groups.into_values().collect();
    // Packages whose only edge is a self-edge form their own communities.
    for (u, d) in &p.edges {
        if u == d && !clustered.contains(u) {
            communities.push([u.clone()].into());
        }
    }
    communities.sort_by(|a, b| a.first().cmp(&b.first()));
    Partition {
        communities,
        modularity,
        quality_trace,
    }
}

/// Modularity of `communities` on the undirected simple view of `p`.
/// Self-edges are ignored and nodes outside every community are treated as
/// singletons.
pub fn modularity(p: &PrunedGraph, communities: &[BTreeSet<String>], resolution: f64) -> f64 {
    let Indexed { names, graph } = index(p);
    let mut comm: Vec<usize> = (0..names.len()).collect();
    let offset = names.len();
    for (c, members) in communities.iter().enumerate() {
        for m in members {
            if let Ok(i) = names.binary_search(m) {
                comm[i] = offset + c;
            }
        }
    }
    let (comm, _) = relabel(&comm);
    graph.quality(&comm, resolution)
}
