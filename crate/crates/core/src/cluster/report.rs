use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Cluster, Shape};
use crate::stats::{holm_bonferroni, mann_whitney_u, Alternative};

/// Clusters with more members than this are listed individually.
pub const LARGE_CLUSTER: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeSummary {
    pub shape: Shape,
    pub clusters: usize,
    pub cluster_pct: f64,
    pub packages: usize,
    pub package_pct: f64,
    pub median_avg_degree: Option<f64>,
    /// Only reported for Tree and Forest.
    pub mean_depth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LargeCluster {
    pub id: usize,
    pub shape: Shape,
    pub size: usize,
    pub core: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeTest {
    pub metric: String,
    pub a: Shape,
    pub b: Shape,
    pub alternative: Alternative,
    pub u: f64,
    pub p_value: f64,
    pub p_adjusted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub total_clusters: usize,
    pub total_packages: usize,
    /// One entry per shape in taxonomy order, including empty ones.
    pub shapes: Vec<ShapeSummary>,
    pub large_clusters: Vec<LargeCluster>,
    /// Pairwise Mann-Whitney comparisons, Holm-adjusted within each metric.
    pub tests: Vec<SizeTest>,
}

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    Some(if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    })
}

fn pct(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

const SIZE_PAIRS: [(Shape, Shape, Alternative); 3] = [
    (Shape::Forest, Shape::Tree, Alternative::Greater),
    (Shape::Star, Shape::Arrow, Alternative::Greater),
    (Shape::Tree, Shape::Star, Alternative::TwoSided),
];

const DEGREE_PAIRS: [(Shape, Shape, Alternative); 3] = [
    (Shape::Star, Shape::Arrow, Alternative::Greater),
    (Shape::Tree, Shape::Star, Alternative::Greater),
    (Shape::Forest, Shape::Tree, Alternative::Greater),
];

fn family(
    metric: &str,
    by_shape: &BTreeMap<Shape, Vec<&Cluster>>,
    pairs: &[(Shape, Shape, Alternative)],
    value: fn(&Cluster) -> f64,
) -> Vec<SizeTest> {
    let sample = |s: Shape| -> Vec<f64> {
        by_shape
            .get(&s)
            .map_or_else(Vec::new, |cs| cs.iter().map(|c| value(c)).collect())
    };
    let mut tests: Vec<SizeTest> = pairs
        .iter()
        .filter_map(|&(a, b, alternative)| {
            let r = mann_whitney_u(&sample(a), &sample(b), alternative).ok()?;
            Some(SizeTest {
                metric: metric.to_string(),
                a,
                b,
                alternative,
                u: r.u_a,
                p_value: r.p_value,
                p_adjusted: r.p_value,
            })
        })
        .collect();
    let raw: Vec<f64> = tests.iter().map(|t| t.p_value).collect();
    if let Ok(adj) = holm_bonferroni(&raw) {
        for (t, p) in tests.iter_mut().zip(adj) {
            t.p_adjusted = p;
        }
    }
    tests
}

pub fn shape_report(clusters: &[Cluster]) -> ShapeReport {
    let mut by_shape: BTreeMap<Shape, Vec<&Cluster>> = BTreeMap::new();
    for c in clusters {
        by_shape.entry(c.shape).or_default().push(c);
    }
    let total_clusters = clusters.len();
    let total_packages: usize = clusters.iter().map(|c| c.size).sum();
    let shapes = Shape::ALL
        .iter()
        .map(|&shape| {
            let cs = by_shape.get(&shape).map(Vec::as_slice).unwrap_or(&[]);
            let packages: usize = cs.iter().map(|c| c.size).sum();
            let mean_depth = match shape {
                Shape::Tree | Shape::Forest if !cs.is_empty() => {
                    Some(cs.iter().map(|c| c.depth as f64).sum::<f64>() / cs.len() as f64)
                }
                _ => None,
            };
            ShapeSummary {
                shape,
                clusters: cs.len(),
                cluster_pct: pct(cs.len(), total_clusters),
                packages,
                package_pct: pct(packages, total_packages),
                median_avg_degree: median(cs.iter().map(|c| c.avg_degree).collect()),
                mean_depth,
            }
        })
        .collect();
    let mut large_clusters: Vec<LargeCluster> = clusters
        .iter()
        .filter(|c| c.size > LARGE_CLUSTER)
        .map(|c| LargeCluster {
            id: c.id,
            shape: c.shape,
            size: c.size,
            core: c.core.clone(),
        })
        .collect();
    large_clusters.sort_by(|a, b| b.size.cmp(&a.size).then(a.id.cmp(&b.id)));
    let mut tests = family("size", &by_shape, &SIZE_PAIRS, |c| c.size as f64);
    tests.extend(family("avg_degree", &by_shape, &DEGREE_PAIRS, |c| {
        c.avg_degree
    }));
    ShapeReport {
        total_clusters,
        total_packages,
        shapes,
        large_clusters,
        tests,
    }
}
