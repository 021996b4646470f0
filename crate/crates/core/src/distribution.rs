//! Finite discrete distributions, total variation and KL divergence.
//!
//! Total variation here is the full L1 norm `V(P,Q) = Σ|p_i − q_i|`, taking
//! values in `[0, 2]`. It is *not* the half-L1 convention used by some
//! texts. All divergences are in nats.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{input, Result};

/// Tolerance on `|Σ w − 1|` accepted at construction.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// A nonnegative real number or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtendedReal(f64);

impl ExtendedReal {
    pub const INFINITY: ExtendedReal = ExtendedReal(f64::INFINITY);
    pub const ZERO: ExtendedReal = ExtendedReal(0.0);

    /// Wraps a finite nonnegative value or `+∞`. Tiny negative values
    /// produced by rounding are clamped to zero.
    pub fn new(value: f64) -> Self {
        debug_assert!(!value.is_nan(), "ExtendedReal from NaN");
        debug_assert!(value >= -1e-9, "ExtendedReal from negative {value}");
        ExtendedReal(value.max(0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn finite(self) -> Option<f64> {
        if self.0.is_finite() {
            Some(self.0)
        } else {
            None
        }
    }
}

impl From<ExtendedReal> for f64 {
    fn from(x: ExtendedReal) -> f64 {
        x.0
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            fmt::Display::fmt(&self.0, f)
        }
    }
}

/// `+∞` serializes as the string `"inf"`, finite values as numbers.
impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

/// A probability vector over `k ≥ 1` atoms. Zero atoms are retained so that
/// subset indices stay stable.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DiscreteDistribution {
    weights: Vec<f64>,
}

impl DiscreteDistribution {
    /// Validates weights: finite, nonnegative, at least one, summing to one
    /// within [`SUM_TOLERANCE`].
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights)?;
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(input(format!(
                "weights sum to {sum}, not 1 (use renormalize to rescale)"
            )));
        }
        Ok(DiscreteDistribution { weights })
    }

    /// Rescales nonnegative weights to sum to one.
    pub fn renormalized(weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights)?;
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(input("weights sum to zero"));
        }
        Ok(DiscreteDistribution {
            weights: weights.into_iter().map(|w| w / sum).collect(),
        })
    }

    /// Skips validation; for weights produced by exact-mass constructions.
    pub(crate) fn from_trusted(weights: Vec<f64>) -> Self {
        DiscreteDistribution { weights }
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(input("support size must be at least 1"));
        }
        Ok(DiscreteDistribution {
            weights: vec![1.0 / k as f64; k],
        })
    }

    /// Point mass on atom `index` of a `k`-atom support.
    pub fn point_mass(k: usize, index: usize) -> Result<Self> {
        if index >= k {
            return Err(input(format!("atom {index} outside support of size {k}")));
        }
        let mut weights = vec![0.0; k];
        weights[index] = 1.0;
        Ok(DiscreteDistribution { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// Mass of the atoms listed in `subset`.
    pub fn mass(&self, subset: &[usize]) -> f64 {
        subset.iter().map(|&i| self.weights[i]).sum()
    }

    /// Appends zero atoms up to support size `k`.
    pub fn padded(&self, k: usize) -> Self {
        let mut weights = self.weights.clone();
        if weights.len() < k {
            weights.resize(k, 0.0);
        }
        DiscreteDistribution { weights }
    }

    /// `δ·self + (1 − δ)·other`, for `δ ∈ [0, 1]`.
    pub fn mix(&self, other: &Self, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(input(format!("mixture weight {delta} outside [0,1]")));
        }
        let (a, b) = aligned(self, other);
        Ok(DiscreteDistribution {
            weights: a
                .iter()
                .zip(b.iter())
                .map(|(p, q)| delta * p + (1.0 - delta) * q)
                .collect(),
        })
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(input("distribution needs at least one weight"));
    }
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() {
            return Err(input(format!("weight {i} is not finite")));
        }
        if w < 0.0 {
            return Err(input(format!("weight {i} is negative ({w})")));
        }
    }
    Ok(())
}

/// Zero-pads the shorter of the two so both share a support.
fn aligned(p: &DiscreteDistribution, q: &DiscreteDistribution) -> (Vec<f64>, Vec<f64>) {
    let k = p.len().max(q.len());
    (p.padded(k).weights, q.padded(k).weights)
}

/// `V(P,Q) = Σ|p_i − q_i|`, in `[0, 2]`. Shorter supports are zero-padded.
pub fn total_variation(p: &DiscreteDistribution, q: &DiscreteDistribution) -> f64 {
    let (p, q) = aligned(p, q);
    p.iter().zip(q.iter()).map(|(a, b)| (a - b).abs()).sum()
}

/// `y·h(x/y − 1)` written through `e = (x − y)/y` with
/// `h(e) = (1+e)ln(1+e) − e ≥ 0`; equals `x ln(x/y) − x + y`.
pub(crate) fn bregman_term(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        return if x > 0.0 { f64::INFINITY } else { 0.0 };
    }
    if x == 0.0 {
        return y;
    }
    y * entropic_h((x - y) / y)
}

/// `h(e) = (1+e)·ln(1+e) − e` for `e ≥ −1`, accurate near `e = 0`.
pub(crate) fn entropic_h(e: f64) -> f64 {
    if e <= -1.0 {
        return 1.0;
    }
    if e.abs() < 1e-2 {
        // Σ_{k≥2} (−1)^k e^k / (k(k−1))
        let mut term = e * e;
        let mut sum = 0.0;
        for k in 2..14u32 {
            let kf = k as f64;
            sum += term / (kf * (kf - 1.0));
            term *= -e;
        }
        sum
    } else {
        (1.0 + e) * e.ln_1p() - e
    }
}

/// `D(P‖Q) = Σ p_i ln(p_i/q_i)` in nats, with `0·ln(0/q) = 0` and
/// `+∞` when some `p_i > 0 = q_i`.
pub fn kl_divergence(p: &DiscreteDistribution, q: &DiscreteDistribution) -> ExtendedReal {
    let (p, q) = aligned(p, q);
    let mut sum = 0.0;
    let mut drift = 0.0;
    for (&a, &b) in p.iter().zip(q.iter()) {
        let t = bregman_term(a, b);
        if t.is_infinite() {
            return ExtendedReal::INFINITY;
        }
        sum += t;
        drift += a - b;
    }
    // Σ(p_i − q_i) vanishes for exact distributions; keep it for weights
    // that are normalized only to within SUM_TOLERANCE.
    ExtendedReal::new((sum + drift).max(0.0))
}

/// Parses weights from text: a JSON array, a comma-separated list, or one
/// weight per line (blank lines and `#` comments ignored).
pub fn parse_weights(text: &str) -> Result<Vec<f64>> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        return serde_json::from_str::<Vec<f64>>(trimmed).map_err(|e| input(format!("bad JSON weight array: {e}")));
    }
    let mut weights = Vec::new();
    for line in trimmed.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        for field in line.split(',') {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let w: f64 = field
                .parse()
                .map_err(|_| input(format!("cannot parse weight {field:?}")))?;
            weights.push(w);
        }
    }
    if weights.is_empty() {
        return Err(input("no weights found"));
    }
    Ok(weights)
}
