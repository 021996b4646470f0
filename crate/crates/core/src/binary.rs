//! Two-point divergence `KL₂(p, q)` and the binary extremal results.

use serde::Serialize;

use crate::distribution::{bregman_term, DiscreteDistribution, ExtendedReal};
use crate::error::{domain, Result};

/// Bernoulli-type distribution `(q0, 1 − q0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinaryDistribution {
    q0: f64,
}

impl BinaryDistribution {
    pub fn new(q0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q0) {
            return Err(domain(format!("binary mass {q0} outside [0,1]")));
        }
        Ok(BinaryDistribution { q0 })
    }

    pub fn q0(self) -> f64 {
        self.q0
    }

    pub fn q1(self) -> f64 {
        1.0 - self.q0
    }

    pub fn swapped(self) -> Self {
        BinaryDistribution { q0: 1.0 - self.q0 }
    }

    pub fn to_distribution(self) -> DiscreteDistribution {
        DiscreteDistribution::new(vec![self.q0, 1.0 - self.q0]).expect("binary masses always form a distribution")
    }
}

/// `KL₂(p, q) = p ln(p/q) + (1−p) ln((1−p)/(1−q))` on `[0,1]²`.
///
/// Boundary values follow the continuity limits: `kl2(0,q) = −ln(1−q)`,
/// `kl2(1,q) = −ln q`, and `+∞` whenever mass sits where `q` has none.
/// Evaluated as a sum of two nonnegative Bregman terms so that `p ≈ q` does
/// not cancel.
pub fn kl2(p: f64, q: f64) -> Result<ExtendedReal> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(domain(format!("kl2({p}, {q}) outside [0,1]²")));
    }
    Ok(kl2_unchecked(p, q))
}

pub(crate) fn kl2_unchecked(p: f64, q: f64) -> ExtendedReal {
    if p == q {
        return ExtendedReal::ZERO;
    }
    let d = p - q;
    let first = if q == 0.0 {
        bregman_term(p, 0.0)
    } else if p == 0.0 {
        q
    } else {
        q * crate::distribution::entropic_h(d / q)
    };
    let rest = 1.0 - q;
    let second = if rest == 0.0 {
        bregman_term(1.0 - p, 0.0)
    } else if p == 1.0 {
        rest
    } else {
        rest * crate::distribution::entropic_h(-d / rest)
    };
    ExtendedReal::new(first + second)
}

/// `π(P) = (P(A), P(Aᶜ))`: coarsens `P` onto the two cells `A`, `Aᶜ`.
pub fn binary_coarsen(p: &DiscreteDistribution, subset: &[usize]) -> Result<BinaryDistribution> {
    let mut inside = vec![false; p.len()];
    for &i in subset {
        if i >= p.len() {
            return Err(domain(format!("atom {i} outside support of size {}", p.len())));
        }
        inside[i] = true;
    }
    let (mut mass_in, mut mass_out) = (0.0, 0.0);
    for (&w, &is_in) in p.weights().iter().zip(&inside) {
        if is_in {
            mass_in += w;
        } else {
            mass_out += w;
        }
    }
    // an empty cell stays exactly empty
    BinaryDistribution::new(mass_in / (mass_in + mass_out))
}

/// Minimizer of `D(·‖Q)` at distance `v` from a binary `Q = (q0, 1−q0)` with
/// `q0 > 1/2`: mass `v/2` moves off the heavy outcome, giving
/// `P* = (q0 − v/2, 1 − q0 + v/2)` and `D* = KL₂(q0 − v/2, q0)`.
pub fn extremal_binary(q: BinaryDistribution, v: f64) -> Result<(BinaryDistribution, ExtendedReal)> {
    let q0 = q.q0();
    if q0 <= 0.5 {
        return Err(domain(format!("extremal_binary needs q0 > 1/2, got {q0}")));
    }
    if !(v > 0.0 && v <= 2.0 * q0) {
        return Err(domain(format!("v = {v} outside (0, 2·q0] = (0, {}]", 2.0 * q0)));
    }
    let p0 = (q0 - v / 2.0).max(0.0);
    let star = BinaryDistribution { q0: p0 };
    Ok((star, kl2_unchecked(p0, q0)))
}

/// True iff `x ↦ KL₂(x − δ, x)` is strictly increasing across the sorted
/// grid, which must lie in `[1/2 + δ/2, 1]`.
pub fn kl2_shift_increasing_check(delta: f64, grid: &[f64]) -> Result<bool> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(domain(format!("delta = {delta} outside (0, 1/2)")));
    }
    let lo = 0.5 + delta / 2.0;
    if let Some(&x) = grid.iter().find(|&&x| x < lo - 1e-15 || x > 1.0) {
        return Err(domain(format!("grid point {x} outside [{lo}, 1]")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(domain("grid must be strictly ascending"));
    }
    let values: Vec<f64> = grid.iter().map(|&x| kl2_unchecked(x - delta, x).value()).collect();
    Ok(values.windows(2).all(|w| w[0] < w[1]))
}
