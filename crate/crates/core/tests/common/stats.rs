use chainforge::error::StatsError;
use chainforge::stats::{holm_bonferroni, mann_whitney_u, proportion_z_test, Alternative};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// U of the first group by pairwise counting, ties worth one half.
fn pairwise_u(a: &[f64], b: &[f64]) -> f64 {
    let mut u = 0.0;
    for x in a {
        for y in b {
            if x > y {
                u += 1.0;
            } else if x == y {
                u += 0.5;
            }
        }
    }
    u
}

/// Tail probabilities of U over every way to split the pooled sample.
fn enumerate_tails(a: &[f64], b: &[f64]) -> (f64, f64) {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let observed = pairwise_u(a, b);
    let (mut le, mut ge, mut total) = (0u64, 0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        let (ga, gb): (Vec<_>, Vec<_>) = (0..n).partition(|&i| mask & (1 << i) != 0);
        let ga: Vec<f64> = ga.iter().map(|&i| pooled[i]).collect();
        let gb: Vec<f64> = gb.iter().map(|&i| pooled[i]).collect();
        let u = pairwise_u(&ga, &gb);
        total += 1;
        le += u64::from(u <= observed);
        ge += u64::from(u >= observed);
    }
    (le as f64 / total as f64, ge as f64 / total as f64)
}

pub fn mann_whitney_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for na in 1..=5 {
        for nb in 1..=5 {
            for trial in 0..20 {
                // Narrow value ranges force ties on most trials.
                let hi = if trial % 2 == 0 { 4 } else { 50 };
                let a: Vec<f64> = (0..na).map(|_| rng.gen_range(0..hi) as f64).collect();
                let b: Vec<f64> = (0..nb).map(|_| rng.gen_range(0..hi) as f64).collect();
                let (le, ge) = enumerate_tails(&a, &b);
                let expect = [
                    (Alternative::Less, le),
                    (Alternative::Greater, ge),
                    (Alternative::TwoSided, (2.0 * le.min(ge)).min(1.0)),
                ];
                for (alt, p) in expect {
                    let r = mann_whitney_u(&a, &b, alt).unwrap();
                    assert!(r.exact);
                    assert_eq!(r.u_a, pairwise_u(&a, &b));
                    assert_eq!(r.u_a + r.u_b, (na * nb) as f64);
                    assert!(
                        (r.p_value - p).abs() < 1e-9,
                        "{a:?} vs {b:?} {alt:?}: {} != {p}",
                        r.p_value
                    );
                }
            }
        }
    }
}

pub fn mann_whitney_large_samples_use_normal_approximation() {
    let a: Vec<f64> = (0..30).map(f64::from).collect();
    let b: Vec<f64> = (10..40).map(f64::from).collect();
    let r = mann_whitney_u(&a, &b, Alternative::Less).unwrap();
    assert!(!r.exact);
    assert!(r.p_value < 0.01);
    let r = mann_whitney_u(&b, &a, Alternative::Greater).unwrap();
    assert!(r.p_value < 0.01);
    assert_eq!(
        mann_whitney_u(&[], &a, Alternative::Less),
        Err(StatsError::EmptySample)
    );
}

/// Step-down written from its definition: the adjusted value of the i-th
/// smallest p is the largest (m - j) * p_(j) over j <= i, capped at 1.
fn holm_by_hand(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut sorted: Vec<(f64, usize)> = p.iter().copied().zip(0..).collect();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut out = vec![0.0; m];
    for i in 0..m {
        let mut worst: f64 = 0.0;
        for (j, (pj, _)) in sorted.iter().enumerate().take(i + 1) {
            worst = worst.max((m - j) as f64 * pj);
        }
        out[sorted[i].1] = worst.min(1.0);
    }
    out
}

pub fn holm_matches_hand_step_down() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let m = rng.gen_range(1..12);
        let p: Vec<f64> = (0..m).map(|_| rng.gen::<f64>().powi(3)).collect();
        let got = holm_bonferroni(&p).unwrap();
        let want = holm_by_hand(&p);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12, "{p:?}: {got:?} vs {want:?}");
        }
    }
    let got = holm_bonferroni(&[0.01, 0.04, 0.03]).unwrap();
    let want = [0.03, 0.06, 0.06];
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() < 1e-12);
    }
    assert_eq!(holm_bonferroni(&[0.5, 1.5]), Err(StatsError::InvalidP(1.5)));
}

pub fn z_test_values() {
    let r = proportion_z_test(30, 100, 30, 100, Alternative::Greater).unwrap();
    assert_eq!(r.z, 0.0);
    assert!((r.p_value - 0.5).abs() < 1e-12);
    let r = proportion_z_test(30, 100, 30, 100, Alternative::TwoSided).unwrap();
    assert!((r.p_value - 1.0).abs() < 1e-12);

    let r = proportion_z_test(30, 100, 20, 100, Alternative::TwoSided).unwrap();
    assert!((r.z - 1.632_993_161_855_452_3).abs() < 1e-9);
    assert!((r.p_value - 0.102_470_434_859_749_38).abs() < 1e-9);
    let r = proportion_z_test(30, 100, 20, 100, Alternative::Greater).unwrap();
    assert!((r.p_value - 0.051_235_217_429_874_69).abs() < 1e-9);
    let r = proportion_z_test(20, 100, 30, 100, Alternative::Less).unwrap();
    assert!((r.p_value - 0.051_235_217_429_874_69).abs() < 1e-9);

    assert!(proportion_z_test(5, 4, 1, 2, Alternative::Greater).is_err());
    assert!(proportion_z_test(0, 0, 1, 2, Alternative::Greater).is_err());
}
