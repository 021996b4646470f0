//! Fixtures shared by the criterion benchmarks in `benches/`.

use klball::DiscreteDistribution;

/// A deterministic, mildly skewed distribution on `k` atoms with no two
/// subsets of equal mass in general.
pub fn zipf_like(k: usize) -> DiscreteDistribution {
    let weights = (0..k)
        .map(|i| 1.0 / (i as f64 + 1.0).powf(0.8) + 0.01 * (i as f64).sin().abs())
        .collect();
    DiscreteDistribution::renormalized(weights).expect("positive weights")
}

/// `k` atoms with one carrying `heavy`, so the closed form applies for small v.
pub fn one_heavy(k: usize, heavy: f64) -> DiscreteDistribution {
    let mut weights = vec![(1.0 - heavy) / (k - 1) as f64; k];
    weights[0] = heavy;
    DiscreteDistribution::renormalized(weights).expect("positive weights")
}
