//! Nonparametric and proportion tests with family-wise p-value adjustment.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::StatsError;

/// Exact Mann-Whitney p-values are enumerated up to this `n_a * n_b`.
pub const EXACT_LIMIT: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    TwoSided,
    /// The first sample tends to be larger.
    Greater,
    /// The first sample tends to be smaller.
    Less,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    pub u_a: f64,
    pub u_b: f64,
    pub p_value: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZTest {
    pub z: f64,
    pub p_value: f64,
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Mid-ranks (1-based) of `values`, plus the tie group sizes.
fn mid_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && values[idx[j]] == values[idx[i]] {
            j += 1;
        }
        let rank = (i + 1 + j) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = rank;
        }
        ties.push(j - i);
        i = j;
    }
    (ranks, ties)
}

/// Tail probabilities `(P(S <= s), P(S >= s))` of the sum of `k` values drawn
/// without replacement from `doubled` (all equally likely subsets).
fn subset_sum_tails(doubled: &[usize], k: usize, s: usize) -> (f64, f64) {
    let max: usize = doubled.iter().sum();
    // ways[j][t]: number of j-subsets with sum t.
    let mut ways = vec![vec![0f64; max + 1]; k + 1];
    ways[0][0] = 1.0;
    let mut reach = 0;
    for &r in doubled {
        reach += r;
        for j in (1..=k).rev() {
            for t in (r..=reach).rev() {
                let add = ways[j - 1][t - r];
                if add != 0.0 {
                    ways[j][t] += add;
                }
            }
        }
    }
    let total: f64 = ways[k].iter().sum();
    let le: f64 = ways[k][..=s.min(max)].iter().sum();
    let ge: f64 = if s > max {
        0.0
    } else {
        ways[k][s..].iter().sum()
    };
    (le / total, ge / total)
}

pub fn mann_whitney_u(
    a: &[f64],
    b: &[f64],
    alternative: Alternative,
) -> Result<MannWhitney, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let (na, nb) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = mid_ranks(&pooled);
    let r_a: f64 = ranks[..na].iter().sum();
    let u_a = r_a - (na * (na + 1)) as f64 / 2.0;
    let u_b = (na * nb) as f64 - u_a;

    let exact = na * nb <= EXACT_LIMIT;
    let (p_le, p_ge) = if exact {
        // Doubled mid-ranks are integral; enumerate the smaller side.
        let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
        let (k, own, flip) = if na <= nb {
            (na, &doubled[..na], false)
        } else {
            (nb, &doubled[na..], true)
        };
        let s: usize = own.iter().sum();
        let (le, ge) = subset_sum_tails(&doubled, k, s);
        // A large rank sum for b means a small one for a.
        if flip {
            (ge, le)
        } else {
            (le, ge)
        }
    } else {
        let n = (na + nb) as f64;
        let tie_term: f64 =
            ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1.0));
        let sigma = ((na * nb) as f64 / 12.0 * ((n + 1.0) - tie_term)).sqrt();
        let mu = (na * nb) as f64 / 2.0;
        if sigma == 0.0 {
            (1.0, 1.0)
        } else {
            let normal = std_normal();
            (
                normal.cdf((u_a - mu + 0.5) / sigma),
                normal.sf((u_a - mu - 0.5) / sigma),
            )
        }
    };
    let p_value = match alternative {
        Alternative::Greater => p_ge,
        Alternative::Less => p_le,
        Alternative::TwoSided => (2.0 * p_le.min(p_ge)).min(1.0),
    };
    Ok(MannWhitney {
        u_a,
        u_b,
        p_value: p_value.clamp(0.0, 1.0),
        exact,
    })
}

/// Holm step-down adjustment; results are in input order.
pub fn holm_bonferroni(p_values: &[f64]) -> Result<Vec<f64>, StatsError> {
    if let Some(&p) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(StatsError::InvalidP(p));
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| p_values[i].total_cmp(&p_values[j]));
    let mut out = vec![0.0; m];
    let mut running: f64 = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        running = running.max(((m - rank) as f64 * p_values[i]).min(1.0));
        out[i] = running;
    }
    Ok(out)
}

/// Pooled two-proportion z-test of `x1/n1` against `x2/n2`.
pub fn proportion_z_test(
    x1: u64,
    n1: u64,
    x2: u64,
    n2: u64,
    alternative: Alternative,
) -> Result<ZTest, StatsError> {
    for (x, n) in [(x1, n1), (x2, n2)] {
        if n == 0 || x > n {
            return Err(StatsError::InvalidCounts { x, n });
        }
    }
    let (p1, p2) = (x1 as f64 / n1 as f64, x2 as f64 / n2 as f64);
    let pooled = (x1 + x2) as f64 / (n1 + n2) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    let z = if se == 0.0 { 0.0 } else { (p1 - p2) / se };
    let normal = std_normal();
    let p_value = match alternative {
        Alternative::Greater => normal.sf(z),
        Alternative::Less => normal.cdf(z),
        Alternative::TwoSided => (2.0 * normal.sf(z.abs())).min(1.0),
    };
    Ok(ZTest { z, p_value })
}
