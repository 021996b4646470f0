//! Vajda's tight lower bound `L(v) = inf{D(P‖Q) : V(P,Q) = v}`.
//!
//! Two independent routes are provided: inversion of the parametric curve
//!
//! ```text
//! v(t) = t·[1 − (coth t − 1/t)²]
//! L(t) = ln(t / sinh t) + t·coth t − (t / sinh t)²
//! ```
//!
//! and direct minimization of `x ↦ KL₂(x + v/2, x)` over `0 < x < 1 − v/2`.

use serde::Serialize;

use crate::binary::kl2_unchecked;
use crate::error::{domain, Error, Result};

/// Below this parameter the curve is evaluated from its Taylor series.
pub const SERIES_SWITCHOVER: f64 = 1e-3;

const BISECTION_MAX_ITER: usize = 200;
const ROOT_TOLERANCE: f64 = 1e-12;

/// Default number of grid cells for [`vajda_by_minimization`].
pub const MINIMIZATION_GRID: usize = 10_000;

/// A point `(v(t), L(v(t)))` of the parametric curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VajdaPoint {
    pub t: f64,
    pub v: f64,
    pub value: f64,
}

/// `ln(sinh t)` without overflow for large `t`.
fn ln_sinh(t: f64) -> f64 {
    if t > 20.0 {
        t - std::f64::consts::LN_2 + (-(-2.0 * t).exp()).ln_1p()
    } else {
        t.sinh().ln()
    }
}

fn curve_series(t: f64) -> (f64, f64) {
    let t2 = t * t;
    let v = t * (1.0 + t2 * (-1.0 / 9.0 + t2 * (2.0 / 135.0 + t2 * (-1.0 / 525.0 + t2 * 2.0 / 8505.0))));
    let l = t2 * (0.5 + t2 * (-1.0 / 12.0 + t2 * (1.0 / 81.0 + t2 * (-1.0 / 600.0 + t2 / 4725.0))));
    (v, l)
}

fn curve_direct(t: f64) -> (f64, f64) {
    let coth = 1.0 / t.tanh();
    let c = coth - 1.0 / t;
    let v = t * (1.0 - c * c);
    let ln_ratio = t.ln() - ln_sinh(t);
    let ratio = ln_ratio.exp();
    let l = ln_ratio + t * coth - ratio * ratio;
    (v, l)
}

fn curve(t: f64) -> (f64, f64) {
    if t < SERIES_SWITCHOVER {
        curve_series(t)
    } else {
        curve_direct(t)
    }
}

/// Evaluates the parametric curve at `t > 0`.
pub fn vajda_parametric(t: f64) -> Result<VajdaPoint> {
    if !(t.is_finite() && t > 0.0) {
        return Err(domain(format!("curve parameter must be positive and finite, got {t}")));
    }
    let (v, value) = curve(t);
    Ok(VajdaPoint { t, v, value })
}

/// `L(v)` for `0 < v < 2` by bisection on `t` over `[v/2, max(4, 2/(2−v))]`.
pub fn vajda_l(v: f64) -> Result<f64> {
    Ok(vajda_invert(v)?.value)
}

/// The curve point with `v(t) = v`.
pub fn vajda_invert(v: f64) -> Result<VajdaPoint> {
    if !(v > 0.0 && v < 2.0) {
        return Err(domain(format!("v = {v} outside (0, 2)")));
    }
    let mut lo = v / 2.0;
    let mut hi = f64::max(4.0, 2.0 / (2.0 - v));
    if !(curve(lo).0 <= v && curve(hi).0 >= v) {
        return Err(Error::Internal(format!("failed to bracket v = {v} in [{lo}, {hi}]")));
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if curve(mid).0 < v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let (vt, value) = curve(t);
    if (vt - v).abs() > ROOT_TOLERANCE {
        return Err(Error::Internal(format!(
            "bisection stalled at |v(t) − v| = {}",
            (vt - v).abs()
        )));
    }
    Ok(VajdaPoint { t, v: vt, value })
}

/// `L(v) = inf_{0<x<1−v/2} KL₂(x + v/2, x)`, by a grid scan followed by
/// golden-section refinement on the bracketing cells.
pub fn vajda_by_minimization(v: f64) -> Result<f64> {
    Ok(minimize_shifted_kl2(v, MINIMIZATION_GRID)?.1)
}

/// Returns `(argmin x, min value)`.
pub fn minimize_shifted_kl2(v: f64, grid: usize) -> Result<(f64, f64)> {
    if !(v > 0.0 && v < 2.0) {
        return Err(domain(format!("v = {v} outside (0, 2)")));
    }
    let grid = grid.max(3);
    let half = v / 2.0;
    let lo = 1e-12;
    let hi = 1.0 - half - 1e-12;
    let g = |x: f64| kl2_unchecked((x + half).min(1.0), x).value();

    let step = (hi - lo) / grid as f64;
    let point = |i: usize| if i == grid { hi } else { lo + step * i as f64 };
    let best = (0..=grid)
        .map(|i| (i, g(point(i))))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut a = point(best.saturating_sub(1));
    let mut b = point((best + 1).min(grid));

    // g is convex (KL is jointly convex and x ↦ (x+v/2, x) is affine)
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > 1e-13 * (1.0 + a.abs()) {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, g(x).min(gc).min(gd)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_at_one() {
        let p = vajda_parametric(1.0).unwrap();
        assert!((p.v - 0.902_008_910_032_352).abs() < 1e-14);
        assert!((p.value - 0.427_534_262_961_825).abs() < 1e-14);
    }

    #[test]
    fn curve_limits() {
        let p = vajda_parametric(1e-9).unwrap();
        assert!(p.v < 2e-9 && p.value < 1e-17);
        let t = 1e3;
        let p = vajda_parametric(t).unwrap();
        assert!((p.v - (2.0 - 1.0 / t)).abs() < 1e-3);
        assert!(p.value.is_finite());
        assert!(vajda_parametric(1e6).unwrap().value.is_finite());
        assert!(vajda_parametric(0.0).is_err());
        assert!(vajda_parametric(-1.0).is_err());
    }

    #[test]
    fn series_and_direct_agree_at_switchover() {
        let (vs, ls) = curve_series(SERIES_SWITCHOVER);
        let (vd, ld) = curve_direct(SERIES_SWITCHOVER);
        assert!(((vs - vd) / vs).abs() < 1e-14);
        // the direct L form loses ~1e-16 absolute to cancellation of O(1) terms
        assert!(((ls - ld) / ls).abs() < 1e-9, "{ls} vs {ld}");
    }

    #[test]
    fn v_of_t_strictly_increasing() {
        // inversion by bisection relies on this
        let mut prev = vajda_parametric(1e-6).unwrap().v;
        let steps = 20_000;
        for i in 1..=steps {
            let t = 1e-6 * 1e9f64.powf(i as f64 / steps as f64);
            let v = vajda_parametric(t).unwrap().v;
            assert!(v > prev || (v == prev && v > 2.0 - 1e-8), "t = {t}");
            assert!(v < 2.0);
            prev = v;
        }
    }

    #[test]
    fn l_examples() {
        let l = vajda_l(0.2).unwrap();
        assert!((l - 0.020_044_683_157_953).abs() < 1e-14, "{l}");
        // series v²/2 + v⁴/36
        assert!((l - (0.02 + 0.0016 / 36.0)).abs() < 1e-6);
        let l = vajda_l(0.902_008_910_032_352).unwrap();
        assert!((l - 0.427_534_262_961_825).abs() < 1e-11);
        assert!((vajda_l(1.0).unwrap() - 0.532_297_908_892).abs() < 1e-11);
        assert!((vajda_l(1.5).unwrap() - 1.339_702_162_868_71).abs() < 1e-11);
        let (a, b, c) = (vajda_l(1.5).unwrap(), vajda_l(1.9).unwrap(), vajda_l(1.99).unwrap());
        assert!(a < b && b < c);
        assert!((c - 5.298_317_366_548_04).abs() < 1e-9);
        assert!(vajda_l(0.0).is_err());
        assert!(vajda_l(2.0).is_err());
    }

    #[test]
    fn minimization_examples() {
        let m = vajda_by_minimization(0.2).unwrap();
        assert!((m - vajda_l(0.2).unwrap()).abs() < 1e-8);
        assert!((vajda_by_minimization(1.0).unwrap() - vajda_l(1.0).unwrap()).abs() < 1e-8);
        let (x, _) = minimize_shifted_kl2(1e-3, MINIMIZATION_GRID).unwrap();
        assert!((x - 0.5).abs() < 1e-3, "{x}");
    }
}
