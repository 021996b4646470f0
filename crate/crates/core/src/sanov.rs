//! Deviation of the empirical distribution: `J_n = V(Q, Q̂_n)`.
//!
//! Monte Carlo estimates of `Pr(J_n ≥ ε)` are compared against the large
//! deviations rate `D*(ε, Q)`, McDiarmid's concentration bound and the
//! `Λ_n` envelope for `E J_n`. For binary `Q` the tail is also available
//! exactly.
//!
//! Every trial draws from its own ChaCha stream keyed by `(seed, trial)`, and
//! aggregation runs sequentially over the stored samples, so estimates are
//! bitwise reproducible for any thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::binary::BinaryDistribution;
use crate::distribution::{DiscreteDistribution, ExtendedReal};
use crate::error::{domain, input, Result};

/// Slack used when comparing lattice-valued `J_n` against `ε`.
const THRESHOLD_SLACK: f64 = 1e-12;

/// z-value for the reported 95% normal-approximation half-widths.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub q: DiscreteDistribution,
    pub n: u64,
    pub epsilon: f64,
    pub trials: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(q: DiscreteDistribution, n: u64, epsilon: f64, trials: u64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(input("sample size n must be at least 1"));
        }
        if trials == 0 {
            return Err(input("trials must be at least 1"));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(input(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(SimConfig {
            q,
            n,
            epsilon,
            trials,
            seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SanovEstimate {
    /// Estimate of `Pr(J_n ≥ ε)`.
    pub p_hat_ge_eps: f64,
    /// Estimate of `Pr(|J_n − Ê J_n| > ε)`, centered at the sample mean.
    pub p_hat_centered: f64,
    /// `−ln(p_hat_ge_eps)/n`; `+∞` when no trial reached `ε`.
    pub rate_estimate: ExtendedReal,
    /// Set when `p_hat_ge_eps = 0`, so the rate is not informative.
    pub insufficient_trials: bool,
    pub e_jn_hat: f64,
    /// Standard error of `e_jn_hat`.
    pub e_jn_std_error: f64,
    /// 95% half-width for `p_hat_ge_eps`.
    pub ci_halfwidth: f64,
    /// 95% half-width for `p_hat_centered`.
    pub ci_halfwidth_centered: f64,
}

/// The random stream of trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws `n` i.i.d. atoms from `q` and returns `V(Q, Q̂_n)`. Counts are drawn
/// as a multinomial through successive conditional binomials.
pub fn sample_jn<R: rand::Rng + ?Sized>(q: &DiscreteDistribution, n: u64, rng: &mut R) -> f64 {
    let w = q.weights();
    let nf = n as f64;
    let mut remaining_n = n;
    let mut remaining_mass = 1.0;
    let mut jn = 0.0;
    for (i, &qi) in w.iter().enumerate() {
        let count = if i + 1 == w.len() || remaining_n == 0 {
            remaining_n
        } else if qi <= 0.0 {
            0
        } else {
            let p = (qi / remaining_mass).clamp(0.0, 1.0);
            Binomial::new(remaining_n, p)
                .expect("binomial parameter clamped to [0,1]")
                .sample(rng)
        };
        remaining_n -= count;
        remaining_mass -= qi;
        jn += (count as f64 / nf - qi).abs();
    }
    jn
}

/// All `J_n` samples of a run, in trial order.
pub fn sample_jn_trials(config: &SimConfig) -> Vec<f64> {
    (0..config.trials)
        .into_par_iter()
        .map(|t| sample_jn(&config.q, config.n, &mut trial_rng(config.seed, t)))
        .collect()
}

fn half_width(p: f64, trials: f64) -> f64 {
    Z_95 * (p * (1.0 - p) / trials).sqrt()
}

pub fn monte_carlo(config: &SimConfig) -> SanovEstimate {
    let samples = sample_jn_trials(config);
    summarize(config, &samples)
}

/// Aggregates stored samples in a fixed order.
pub fn summarize(config: &SimConfig, samples: &[f64]) -> SanovEstimate {
    let trials = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / trials;
    let var = if samples.len() > 1 {
        samples.iter().map(|j| (j - mean) * (j - mean)).sum::<f64>() / (trials - 1.0)
    } else {
        0.0
    };
    let eps = config.epsilon;
    let hits = samples.iter().filter(|&&j| j >= eps - THRESHOLD_SLACK).count() as f64;
    let centered = samples.iter().filter(|&&j| (j - mean).abs() > eps).count() as f64;
    let p_ge = hits / trials;
    let p_centered = centered / trials;
    let rate = if hits == 0.0 {
        ExtendedReal::INFINITY
    } else {
        ExtendedReal::new(-p_ge.ln() / config.n as f64)
    };
    SanovEstimate {
        p_hat_ge_eps: p_ge,
        p_hat_centered: p_centered,
        rate_estimate: rate,
        insufficient_trials: hits == 0.0,
        e_jn_hat: mean,
        e_jn_std_error: (var / trials).sqrt(),
        ci_halfwidth: half_width(p_ge, trials),
        ci_halfwidth_centered: half_width(p_centered, trials),
    }
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `ln Pr(|p̂ − q0| ≥ ε/2)` for `p̂ = K/n`, `K ~ Bin(n, q0)`; for binary `Q`
/// this is `ln Pr(J_n ≥ ε)`.
pub fn binary_tail_exact_ln(q: BinaryDistribution, n: u64, epsilon: f64) -> Result<f64> {
    let q0 = q.q0();
    if !(q0 > 0.0 && q0 < 1.0) {
        return Err(domain(format!("exact tail needs 0 < q0 < 1, got {q0}")));
    }
    if n == 0 {
        return Err(domain("sample size n must be at least 1"));
    }
    if epsilon.is_nan() {
        return Err(domain("epsilon is NaN"));
    }
    if epsilon <= 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let half = epsilon / 2.0;
    let log_odds = q0.ln() - (-q0).ln_1p();

    let mut log_pmf = CompensatedSum::default();
    log_pmf.add(nf * (-q0).ln_1p());
    let mut selected = Vec::new();
    for k in 0..=n {
        if k > 0 {
            let kf = k as f64;
            log_pmf.add((nf - kf + 1.0).ln() - kf.ln() + log_odds);
        }
        if (k as f64 / nf - q0).abs() >= half - THRESHOLD_SLACK {
            selected.push(log_pmf.value());
        }
    }
    if selected.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    let max = selected.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tail: f64 = selected.iter().map(|lp| (lp - max).exp()).sum();
    Ok((max + tail.ln()).min(0.0))
}

/// `Pr(J_n ≥ ε)` exactly for binary `Q`.
pub fn binary_tail_exact(q: BinaryDistribution, n: u64, epsilon: f64) -> Result<f64> {
    Ok(binary_tail_exact_ln(q, n, epsilon)?.exp())
}

/// McDiarmid: `Pr(|J_n − E J_n| > ε) ≤ 2·exp(−nε²/2)`, capped at 1.
pub fn mcdiarmid_bound(n: u64, epsilon: f64) -> f64 {
    (2.0 * (-(n as f64) * epsilon * epsilon / 2.0).exp()).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaEnvelope {
    /// `Λ_n = n^{−1/2}·Σ_{q_j ≥ 1/n} √q_j + 2·Σ_{q_j < 1/n} q_j`.
    pub lambda: f64,
    /// `(Λ_n − n^{−1/2})/4 ≤ E J_n`.
    pub lower: f64,
    /// `E J_n ≤ √(k/n)` with `k` the number of positive atoms.
    pub upper_sqrt_k: f64,
    /// `E J_n ≤ n^{−1/2}·Σ √q_j`.
    pub upper_sum_sqrt: f64,
}

/// Envelope for `E J_n`, valid for `n ≥ 2`. Atoms with `q_j = 1/n` count as
/// heavy.
pub fn lambda_n(q: &DiscreteDistribution, n: u64) -> Result<LambdaEnvelope> {
    if n < 2 {
        return Err(domain(format!("the E J_n envelope holds for n ≥ 2, got {n}")));
    }
    let nf = n as f64;
    let inv_sqrt_n = 1.0 / nf.sqrt();
    let threshold = 1.0 / nf;
    let (mut heavy, mut light, mut all_sqrt) = (0.0, 0.0, 0.0);
    for &qj in q.weights() {
        all_sqrt += qj.sqrt();
        if qj >= threshold {
            heavy += qj.sqrt();
        } else {
            light += qj;
        }
    }
    let lambda = inv_sqrt_n * heavy + 2.0 * light;
    let support = q.weights().iter().filter(|&&w| w > 0.0).count() as f64;
    Ok(LambdaEnvelope {
        lambda,
        lower: (lambda - inv_sqrt_n) / 4.0,
        upper_sqrt_k: (support / nf).sqrt(),
        upper_sum_sqrt: inv_sqrt_n * all_sqrt,
    })
}
