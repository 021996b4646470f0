//! Exhaustive subset-mass enumeration shared by the balance and D* solvers.
//!
//! Masses are `lo[mask & lo_mask] + hi[mask >> lo_bits]`, so memory stays at
//! `O(2^(k/2))` while every one of the `2^k` masks is visited.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest support handled by exhaustive enumeration unless overridden.
pub const DEFAULT_K_MAX: usize = 24;

/// Hard ceiling for any override (masks are `u64` and runtime is `2^k`).
pub const HARD_K_MAX: usize = 40;

pub(crate) fn check_capacity(k: usize, limit: usize, hint: &'static str) -> Result<()> {
    let limit = limit.min(HARD_K_MAX);
    if k > limit {
        return Err(Error::Capacity { size: k, limit, hint });
    }
    Ok(())
}

pub(crate) struct SubsetMasses {
    lo: Vec<f64>,
    hi: Vec<f64>,
    lo_bits: u32,
    k: u32,
}

fn partial_sums(weights: &[f64]) -> Vec<f64> {
    let mut sums = vec![0.0; 1usize << weights.len()];
    for mask in 1..sums.len() {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + weights[low];
    }
    sums
}

impl SubsetMasses {
    pub fn new(weights: &[f64]) -> Self {
        let k = weights.len();
        let lo_bits = k / 2;
        SubsetMasses {
            lo: partial_sums(&weights[..lo_bits]),
            hi: partial_sums(&weights[lo_bits..]),
            lo_bits: lo_bits as u32,
            k: k as u32,
        }
    }

    pub fn mass(&self, mask: u64) -> f64 {
        let lo_mask = (1u64 << self.lo_bits) - 1;
        self.lo[(mask & lo_mask) as usize] + self.hi[(mask >> self.lo_bits) as usize]
    }

    fn masks(&self) -> impl ParallelIterator<Item = u64> + '_ {
        let lo_len = self.lo.len() as u64;
        (0..self.hi.len() as u64)
            .into_par_iter()
            .flat_map_iter(move |h| (0..lo_len).map(move |l| (h << self.lo_bits) | l))
    }

    /// Minimizes `objective(mass)` over all masks with a finite score (`None`
    /// excludes a mask). Scores within `tie_tol` of the minimum are treated as
    /// ties and resolved by fewest atoms, then lexicographically smallest
    /// index list. Returns `(score, mask)`.
    pub fn argmin<F>(&self, objective: F, tie_tol: impl Fn(f64) -> f64) -> Option<(f64, u64)>
    where
        F: Fn(f64) -> Option<f64> + Sync,
    {
        let best = self
            .masks()
            .filter_map(|m| objective(self.mass(m)))
            .reduce(|| f64::INFINITY, f64::min);
        if best.is_infinite() {
            // only +∞ or nothing: report the first subset attaining +∞, if any
            return self
                .masks()
                .filter(|&m| objective(self.mass(m)).is_some())
                .reduce_with(prefer)
                .map(|m| (f64::INFINITY, m));
        }
        let cutoff = best + tie_tol(best);
        self.masks()
            .filter(|&m| matches!(objective(self.mass(m)), Some(s) if s <= cutoff))
            .reduce_with(prefer)
            .map(|m| (best, m))
    }

    pub fn indices(&self, mask: u64) -> Vec<usize> {
        (0..self.k as usize).filter(|&i| mask >> i & 1 == 1).collect()
    }
}

/// Deterministic preference: fewer atoms, then lexicographically smaller
/// ascending index list.
fn prefer(a: u64, b: u64) -> u64 {
    match a.count_ones().cmp(&b.count_ones()) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal => {
            let diff = a ^ b;
            if diff == 0 {
                return a;
            }
            // the mask owning the lowest differing atom lists it first
            let lowest = diff & diff.wrapping_neg();
            if a & lowest != 0 {
                a
            } else {
                b
            }
        }
    }
}
