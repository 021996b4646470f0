//! Balance coefficient `β = min{Q(A) : Q(A) ≥ 1/2}` and the
//! Ordentlich–Weinberger coefficient `φ(Q)`.

use serde::Serialize;

use crate::distribution::DiscreteDistribution;
use crate::error::{domain, Result};
use crate::subsets::{check_capacity, SubsetMasses, DEFAULT_K_MAX};

/// Subset masses within this distance of 1/2 count as reaching 1/2.
pub const HALF_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BalanceMethod {
    Exact,
    GreedyBound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceReport {
    /// Exact `β`, or the greedy upper bound when `method` is `GreedyBound`.
    pub beta: f64,
    /// Present only for exact reports.
    pub achieving_subset: Option<Vec<usize>>,
    pub method: BalanceMethod,
    /// A valid upper bound on `β` (equal to `beta` for exact reports).
    pub upper_bound: f64,
    /// The a-priori bound `1/2 + q_max/2`.
    pub q_max_bound: f64,
    /// `φ(β)`; `None` when `β = 1` (point mass), where it is undefined.
    pub phi: Option<f64>,
}

impl BalanceReport {
    pub fn is_balanced(&self) -> bool {
        self.method == BalanceMethod::Exact && self.beta == 0.5
    }
}

fn q_max_bound(q: &DiscreteDistribution) -> f64 {
    0.5 + q.max_weight() / 2.0
}

/// Exact `β` by scanning all `2^k` subset masses (`k ≤ DEFAULT_K_MAX`).
pub fn balance_exact(q: &DiscreteDistribution) -> Result<BalanceReport> {
    balance_exact_with_limit(q, DEFAULT_K_MAX)
}

pub fn balance_exact_with_limit(q: &DiscreteDistribution, k_max: usize) -> Result<BalanceReport> {
    let (beta, subset) = exact_beta(q, k_max)?;
    Ok(BalanceReport {
        beta,
        achieving_subset: Some(subset),
        method: BalanceMethod::Exact,
        upper_bound: beta,
        q_max_bound: q_max_bound(q),
        phi: phi_coefficient(beta).ok(),
    })
}

/// Exact `β` and an achieving subset. Ties go to the fewest atoms, then the
/// lexicographically smallest index list.
pub(crate) fn exact_beta(q: &DiscreteDistribution, k_max: usize) -> Result<(f64, Vec<usize>)> {
    check_capacity(q.len(), k_max, "use balance_greedy for an upper bound")?;
    let masses = SubsetMasses::new(q.weights());
    let (best, mask) = masses
        .argmin(|m| (m >= 0.5 - HALF_TOLERANCE).then_some(m), |_| HALF_TOLERANCE)
        .expect("the full support always reaches mass 1/2");
    Ok((best.clamp(0.5, 1.0), masses.indices(mask)))
}

/// Greedy bound on `β`: add atoms heaviest-first while the mass stays below
/// 1/2; at the first atom `ω` that would cross, return the smaller of
/// `Q(A ∪ {ω})` and `Q(Ω ∖ A)`. Equal weights are taken in index order.
pub fn balance_greedy(q: &DiscreteDistribution) -> BalanceReport {
    let (bound, _) = greedy_split(q);
    BalanceReport {
        beta: bound,
        achieving_subset: None,
        method: BalanceMethod::GreedyBound,
        upper_bound: bound,
        q_max_bound: q_max_bound(q),
        phi: phi_coefficient(bound).ok(),
    }
}

/// The greedy bound together with the subset whose mass it is.
pub(crate) fn greedy_split(q: &DiscreteDistribution) -> (f64, Vec<usize>) {
    let w = q.weights();
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]));

    let heaviest = order[0];
    if w[heaviest] >= 0.5 - HALF_TOLERANCE {
        return (w[heaviest].max(0.5), vec![heaviest]);
    }

    let mut taken = vec![false; w.len()];
    let mut mass = 0.0;
    for &i in &order {
        if mass + w[i] < 0.5 - HALF_TOLERANCE {
            mass += w[i];
            taken[i] = true;
            continue;
        }
        let with_atom = mass + w[i];
        let complement = 1.0 - mass;
        return if with_atom <= complement {
            taken[i] = true;
            let subset = (0..w.len()).filter(|&j| taken[j]).collect();
            (with_atom.max(0.5), subset)
        } else {
            let subset = (0..w.len()).filter(|&j| !taken[j]).collect();
            (complement.max(0.5), subset)
        };
    }
    unreachable!("weights sum to one, so some atom crosses 1/2")
}

/// `φ(β) = ln(β/(1−β)) / (2β − 1)`, with `φ(1/2) = 2`.
pub fn phi_coefficient(beta: f64) -> Result<f64> {
    if !(0.5..1.0).contains(&beta) {
        return Err(domain(format!("phi needs beta in [1/2, 1), got {beta}")));
    }
    // x = 2β − 1 gives φ = 2·atanh(x)/x
    let x = 2.0 * beta - 1.0;
    if x < 1e-4 {
        let x2 = x * x;
        Ok(2.0 * (1.0 + x2 / 3.0 + x2 * x2 / 5.0))
    } else {
        Ok(2.0 * x.atanh() / x)
    }
}
