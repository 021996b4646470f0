//! `D*(v, Q) = inf{D(P‖Q) : V(P,Q) ≥ v}`: the smallest divergence from `Q`
//! among distributions at least `v` away in total variation.
//!
//! Three exact routes and one bound:
//!
//! * **closed form**: for `β > 1/2` and `v < 4(β − 1/2)`,
//!   `D* = KL₂(β − v/2, β)`;
//! * **enumeration**: `D* = min_A KL₂(Q(A) + v/2, Q(A))` over subsets with
//!   `Q(A) ≤ 1 − v/2`, exact for any finite `Q` small enough to enumerate;
//! * **full range**: for non-atomic `Q`, `D* = L(v)`;
//! * **upper bound**: `L(v) ≤ D* ≤ KL₂(β − v/2, β)` for `v < 1`, used when the
//!   support is too large to enumerate.

use serde::Serialize;

use crate::balance::{exact_beta, greedy_split, phi_coefficient};
use crate::binary::kl2_unchecked;
use crate::distribution::{DiscreteDistribution, ExtendedReal};
use crate::error::{domain, Error, Result};
use crate::subsets::{check_capacity, SubsetMasses, DEFAULT_K_MAX};
use crate::vajda::vajda_l;

/// Slack on the closed feasibility constraint `Q(A) ≤ 1 − v/2`.
const FEASIBILITY_TOLERANCE: f64 = 1e-12;

/// How a [`DStarResult`] was obtained. Serialized names are part of the CLI
/// output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DStarMethod {
    #[serde(rename = "closed_form_thm1b")]
    ClosedForm,
    /// `value` is an upper bound only; `lower_bound` holds `L(v)`.
    #[serde(rename = "upper_bound_thm1a")]
    UpperBound,
    #[serde(rename = "enumeration")]
    Enumeration,
    #[serde(rename = "full_range_thm2")]
    FullRange,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DStarResult {
    pub value: ExtendedReal,
    pub method: DStarMethod,
    /// The minimizing `P*`, when one exists and is known.
    pub extremal: Option<DiscreteDistribution>,
    /// For enumeration: the subset receiving the extra mass `v/2`.
    pub achieving_subset: Option<Vec<usize>>,
    /// Lower end of the reported interval when `method` is `UpperBound`.
    pub lower_bound: Option<f64>,
    /// Balance coefficient used by the closed form or bound, if computed.
    pub beta: Option<f64>,
}

impl DStarResult {
    pub fn is_exact(&self) -> bool {
        self.method != DStarMethod::UpperBound
    }
}

/// Which route the dispatcher may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    /// Closed form when valid, else enumeration, else the bound.
    #[default]
    Auto,
    Enumerate,
    /// Closed form, or the bound when the closed form does not apply.
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DStarOptions {
    pub full_range: bool,
    pub method: MethodChoice,
    pub k_max: usize,
}

impl Default for DStarOptions {
    fn default() -> Self {
        DStarOptions {
            full_range: false,
            method: MethodChoice::Auto,
            k_max: DEFAULT_K_MAX,
        }
    }
}

fn check_v(v: f64) -> Result<()> {
    if !(v > 0.0 && v < 2.0) {
        return Err(domain(format!("v = {v} outside (0, 2)")));
    }
    Ok(())
}

fn check_subset(q: &DiscreteDistribution, subset: &[usize]) -> Result<()> {
    let mut seen = vec![false; q.len()];
    for &i in subset {
        if i >= q.len() {
            return Err(domain(format!("atom {i} outside support of size {}", q.len())));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(domain(format!("atom {i} repeated in subset")));
        }
    }
    Ok(())
}

/// The unique minimizer of `D(·‖Q)` among `P` with `V(P,Q) = v` that gain
/// mass exactly on `subset`: `p_i = a·q_i` on the subset and `b·q_i` off it,
/// with `a = 1 + v/(2Q(A))` and `b = 1 − v/(2(1 − Q(A)))`.
pub fn extremal_tilt(q: &DiscreteDistribution, subset: &[usize], v: f64) -> Result<DiscreteDistribution> {
    check_subset(q, subset)?;
    let mass = q.mass(subset);
    if !(mass > 0.0 && mass < 1.0) {
        return Err(domain(format!("tilt needs 0 < Q(A) < 1, got {mass}")));
    }
    let rest = 1.0 - mass;
    if !(v > 0.0 && v <= 2.0 * rest + FEASIBILITY_TOLERANCE) {
        return Err(domain(format!(
            "v = {v} outside (0, 2(1 − Q(A))] = (0, {}]",
            2.0 * rest
        )));
    }
    let (a, b) = tilt_factors(mass, v);
    let mut inside = vec![false; q.len()];
    for &i in subset {
        inside[i] = true;
    }
    let weights = q
        .weights()
        .iter()
        .zip(&inside)
        .map(|(&w, &up)| if up { a * w } else { b * w })
        .collect();
    Ok(DiscreteDistribution::from_trusted(weights))
}

/// `(a, b)` for a tilt onto a set of mass `mass`.
pub fn tilt_factors(mass: f64, v: f64) -> (f64, f64) {
    let a = 1.0 + v / (2.0 * mass);
    let b = (1.0 - v / (2.0 * (1.0 - mass))).max(0.0);
    (a, b)
}

/// Exact `D*(v, Q)` by minimizing `KL₂(Q(A) + v/2, Q(A))` over every subset
/// `A` with `Q(A) ≤ 1 − v/2`.
pub fn dstar_enumerate(q: &DiscreteDistribution, v: f64) -> Result<DStarResult> {
    dstar_enumerate_with_limit(q, v, DEFAULT_K_MAX)
}

pub fn dstar_enumerate_with_limit(q: &DiscreteDistribution, v: f64, k_max: usize) -> Result<DStarResult> {
    check_v(v)?;
    check_capacity(q.len(), k_max, "use the closed form or the upper bound")?;
    let half = v / 2.0;
    let ceiling = 1.0 - half + FEASIBILITY_TOLERANCE;
    let masses = SubsetMasses::new(q.weights());
    let (best, mask) = masses
        .argmin(
            |x| (x <= ceiling).then(|| kl2_unchecked((x + half).min(1.0), x).value()),
            |best| best * 1e-14,
        )
        .expect("the empty subset is always feasible");
    let subset = masses.indices(mask);
    let extremal = if best.is_finite() {
        Some(extremal_tilt(q, &subset, v)?)
    } else {
        None
    };
    Ok(DStarResult {
        value: ExtendedReal::new(best),
        method: DStarMethod::Enumeration,
        extremal,
        achieving_subset: Some(subset),
        lower_bound: None,
        beta: None,
    })
}

/// `D*(v, Q)` with default options; `full_range` treats `Q` as non-atomic.
pub fn dstar(q: &DiscreteDistribution, v: f64, full_range: bool) -> Result<DStarResult> {
    dstar_with(
        q,
        v,
        &DStarOptions {
            full_range,
            ..DStarOptions::default()
        },
    )
}

pub fn dstar_with(q: &DiscreteDistribution, v: f64, options: &DStarOptions) -> Result<DStarResult> {
    check_v(v)?;
    if options.full_range {
        return Ok(DStarResult {
            value: ExtendedReal::new(vajda_l(v)?),
            method: DStarMethod::FullRange,
            extremal: None,
            achieving_subset: None,
            lower_bound: None,
            beta: None,
        });
    }
    if options.method == MethodChoice::Enumerate {
        return dstar_enumerate_with_limit(q, v, options.k_max);
    }

    let exact = if q.len() <= options.k_max {
        Some(exact_beta(q, options.k_max)?)
    } else {
        None
    };
    if let Some((beta, ref heavy)) = exact {
        if beta > 0.5 && v < 4.0 * (beta - 0.5) {
            return Ok(closed_form(q, v, beta, heavy));
        }
        if options.method == MethodChoice::Auto {
            return dstar_enumerate_with_limit(q, v, options.k_max);
        }
    }

    if v >= 1.0 {
        return Err(match exact {
            Some(_) => domain(format!(
                "no closed form for v = {v}: the bound needs v < 1; use enumeration"
            )),
            None => Error::Capacity {
                size: q.len(),
                limit: options.k_max,
                hint: "the upper bound needs v < 1",
            },
        });
    }
    let (beta, heavy) = exact.unwrap_or_else(|| greedy_split(q));
    let mut result = closed_form(q, v, beta, &heavy);
    result.method = DStarMethod::UpperBound;
    result.lower_bound = Some(vajda_l(v)?);
    Ok(result)
}

/// `KL₂(β − v/2, β)` with `P*` obtained by tilting mass onto the complement
/// of the heavy subset.
fn closed_form(q: &DiscreteDistribution, v: f64, beta: f64, heavy: &[usize]) -> DStarResult {
    let value = kl2_unchecked((beta - v / 2.0).max(0.0), beta);
    let mut is_heavy = vec![false; q.len()];
    for &i in heavy {
        is_heavy[i] = true;
    }
    let light: Vec<usize> = (0..q.len()).filter(|&i| !is_heavy[i]).collect();
    let extremal = if value.is_infinite() {
        None
    } else {
        extremal_tilt(q, &light, v).ok()
    };
    DStarResult {
        value,
        method: DStarMethod::ClosedForm,
        extremal,
        achieving_subset: None,
        lower_bound: None,
        beta: Some(beta),
    }
}

/// Pinsker's bound `D ≥ V²/2`.
pub fn pinsker_lower(v: f64) -> f64 {
    v * v / 2.0
}

/// The distribution-dependent bound `D ≥ (φ(Q)/4)·V²` at `V = v`. Needs the
/// exact balance coefficient, so it is limited to enumerable supports.
pub fn ow_lower(q: &DiscreteDistribution, v: f64) -> Result<f64> {
    let (beta, _) = exact_beta(q, DEFAULT_K_MAX)?;
    ow_lower_from_beta(beta, v)
}

pub fn ow_lower_from_beta(beta: f64, v: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&v) {
        return Err(domain(format!("v = {v} outside [0, 2]")));
    }
    Ok(phi_coefficient(beta)? / 4.0 * v * v)
}

/// Partial sums of the small-`v` expansion of `KL₂(β − v/2, β)`:
/// `v²/(8β(1−β))` at order 2, minus `(2β−1)v³/(48β²(1−β)²)` at order 3.
pub fn kl2_shift_expansion(beta: f64, v: f64, order: u32) -> Result<f64> {
    if !(0.5..1.0).contains(&beta) {
        return Err(domain(format!("beta = {beta} outside [1/2, 1)")));
    }
    let var = beta * (1.0 - beta);
    let second = v * v / (8.0 * var);
    match order {
        2 => Ok(second),
        3 => Ok(second - (2.0 * beta - 1.0) * v.powi(3) / (48.0 * var * var)),
        _ => Err(domain(format!("expansion order must be 2 or 3, got {order}"))),
    }
}
