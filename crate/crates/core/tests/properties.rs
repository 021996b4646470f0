use klball::*;
use proptest::prelude::*;

/// Random distribution with `k` atoms, some possibly zero.
fn distribution(k: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = DiscreteDistribution> {
    prop::collection::vec(prop_oneof![9 => 0.01f64..1.0, 1 => Just(0.0)], k)
        .prop_filter("needs positive mass", |w| w.iter().sum::<f64>() > 0.0)
        .prop_map(|w| DiscreteDistribution::renormalized(w).unwrap())
}

fn pair(k: usize) -> impl Strategy<Value = (DiscreteDistribution, DiscreteDistribution)> {
    (distribution(k..=k), distribution(k..=k))
}

/// Naive subset scan, independent of the library's split-table enumeration.
fn naive_dstar(q: &DiscreteDistribution, v: f64) -> f64 {
    let w = q.weights();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << w.len()) {
        let x: f64 = (0..w.len()).filter(|i| mask >> i & 1 == 1).map(|i| w[i]).sum();
        if x <= 1.0 - v / 2.0 + 1e-12 {
            let val = kl2((x + v / 2.0).min(1.0), x).unwrap().value();
            best = best.min(val);
        }
    }
    best
}

fn naive_beta(q: &DiscreteDistribution) -> f64 {
    let w = q.weights();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << w.len()) {
        let x: f64 = (0..w.len()).filter(|i| mask >> i & 1 == 1).map(|i| w[i]).sum();
        if x >= 0.5 - 1e-12 {
            best = best.min(x);
        }
    }
    best.max(0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kl_nonnegative_and_pinsker((p, q) in (2usize..8).prop_flat_map(pair)) {
        let d = kl_divergence(&p, &q);
        prop_assert!(d.value() >= 0.0);
        let v = total_variation(&p, &q);
        if let Some(d) = d.finite() {
            prop_assert!(d >= v * v / 2.0 - 1e-15);
        }
        prop_assert_eq!(kl_divergence(&q, &q).value(), 0.0);
    }

    #[test]
    fn tv_is_a_metric(
        (p, q, r) in (2usize..8).prop_flat_map(|k| (distribution(k..=k), distribution(k..=k), distribution(k..=k)))
    ) {
        let pq = total_variation(&p, &q);
        prop_assert!((0.0..=2.0 + 1e-12).contains(&pq));
        prop_assert_eq!(pq, total_variation(&q, &p));
        prop_assert!(pq <= total_variation(&p, &r) + total_variation(&r, &q) + 1e-12);
        prop_assert_eq!(total_variation(&p, &p), 0.0);
    }

    #[test]
    fn mixture_scales_distance((p, q) in (2usize..8).prop_flat_map(pair), delta in 0.0f64..=1.0) {
        let mix = p.mix(&q, delta).unwrap();
        let lhs = total_variation(&mix, &q);
        prop_assert!((lhs - delta * total_variation(&p, &q)).abs() <= 1e-12);
    }

    #[test]
    fn coarsening_never_increases_divergence(
        (p, q) in (2usize..8).prop_flat_map(pair),
        bits in any::<u32>(),
    ) {
        let subset: Vec<usize> = (0..p.len()).filter(|i| bits >> i & 1 == 1).collect();
        let pc = binary_coarsen(&p, &subset).unwrap().to_distribution();
        let qc = binary_coarsen(&q, &subset).unwrap().to_distribution();
        let fine = kl_divergence(&p, &q).value();
        prop_assert!(kl_divergence(&pc, &qc).value() <= fine + 1e-12);
    }

    #[test]
    fn binary_pinsker(p in 0.0f64..=1.0, q in 0.001f64..0.999) {
        let d = kl2(p, q).unwrap().value();
        prop_assert!(d >= 2.0 * (p - q) * (p - q) - 1e-15);
    }

    #[test]
    fn removing_mass_from_heavy_side_is_cheaper(q0 in 0.5001f64..0.999, frac in 0.001f64..=1.0) {
        let v = frac * 2.0 * (1.0 - q0);
        let down = kl2(q0 - v / 2.0, q0).unwrap().value();
        let up = kl2((q0 + v / 2.0).min(1.0), q0).unwrap().value();
        prop_assert!(down < up);
        let (star, value) = extremal_binary(BinaryDistribution::new(q0).unwrap(), v).unwrap();
        prop_assert_eq!(value.value(), down);
        prop_assert!((2.0 * (q0 - star.q0()) - v).abs() < 1e-15);
    }

    #[test]
    fn enumeration_matches_naive_scan(q in distribution(1..=10), v in 0.001f64..1.999) {
        let r = dstar_enumerate(&q, v).unwrap();
        let naive = naive_dstar(&q, v);
        if naive.is_infinite() {
            prop_assert!(r.value.is_infinite());
        } else {
            prop_assert!((r.value.value() - naive).abs() <= 1e-12 * (1.0 + naive));
            let p = r.extremal.unwrap();
            prop_assert!((total_variation(&p, &q) - v).abs() < 1e-9);
            prop_assert!((kl_divergence(&p, &q).value() - r.value.value()).abs() < 1e-9);
        }
    }

    #[test]
    fn dstar_lower_bounds_every_far_distribution(
        (p, q) in (2usize..7).prop_flat_map(pair),
    ) {
        let v = total_variation(&p, &q);
        prop_assume!(v > 1e-6 && v < 2.0 - 1e-9);
        let r = dstar_enumerate(&q, v).unwrap();
        prop_assert!(r.value.value() <= kl_divergence(&p, &q).value() + 1e-12);
    }

    #[test]
    fn closed_form_equals_enumeration(q in distribution(2..=12), frac in 0.001f64..0.999) {
        let beta = balance_exact(&q).unwrap().beta;
        prop_assume!(beta > 0.51 && beta < 1.0);
        let v = frac * 4.0 * (beta - 0.5);
        let closed = kl2(beta - v / 2.0, beta).unwrap().value();
        let r = dstar_enumerate(&q, v).unwrap();
        prop_assert!((r.value.value() - closed).abs() <= 1e-12);
        let auto = dstar(&q, v, false).unwrap();
        prop_assert_eq!(auto.method, DStarMethod::ClosedForm);
        prop_assert!((auto.value.value() - r.value.value()).abs() <= 1e-12);
    }

    #[test]
    fn sandwich_and_lower_bound_ordering(q in distribution(2..=12), v in 0.001f64..0.999) {
        let r = dstar_enumerate(&q, v).unwrap();
        let report = balance_exact(&q).unwrap();
        let beta = report.beta;
        prop_assume!(beta < 1.0);
        let value = r.value.value();
        prop_assert!(vajda_l(v).unwrap() - 1e-9 <= value);
        prop_assert!(value <= kl2(beta - v / 2.0, beta).unwrap().value() + 1e-12);
        let ow = ow_lower(&q, v).unwrap();
        prop_assert!(pinsker_lower(v) <= ow + 1e-16);
        prop_assert!(ow <= value + 1e-12);
    }

    #[test]
    fn binary_symmetry(a in 0.0f64..=1.0, v in 0.001f64..1.999) {
        let q = DiscreteDistribution::new(vec![a, 1.0 - a]).unwrap();
        let s = DiscreteDistribution::new(vec![1.0 - a, a]).unwrap();
        prop_assert_eq!(dstar_enumerate(&q, v).unwrap().value, dstar_enumerate(&s, v).unwrap().value);
    }

    #[test]
    fn balance_matches_naive_and_greedy_bounds(q in distribution(1..=12)) {
        let exact = balance_exact(&q).unwrap();
        prop_assert!((exact.beta - naive_beta(&q)).abs() <= 1e-12);
        let subset = exact.achieving_subset.clone().unwrap();
        prop_assert!((q.mass(&subset).max(0.5) - exact.beta).abs() <= 1e-12);
        let greedy = balance_greedy(&q);
        prop_assert!(exact.beta <= greedy.upper_bound + 1e-12);
        prop_assert!(greedy.upper_bound <= 0.5 + q.max_weight() / 2.0 + 1e-12);
    }
}

/// Builds a random member of the class of distributions at distance `v` from
/// `q` that gain mass exactly on `subset`.
fn random_class_member(
    q: &DiscreteDistribution,
    subset: &[usize],
    v: f64,
    gain: &[f64],
    loss: &[f64],
    theta: f64,
) -> DiscreteDistribution {
    let w = q.weights();
    let inside: Vec<bool> = (0..w.len()).map(|i| subset.contains(&i)).collect();
    let half = v / 2.0;

    let gain_total: f64 = (0..w.len()).filter(|&i| inside[i]).map(|i| gain[i]).sum();
    let rest: f64 = (0..w.len()).filter(|&i| !inside[i]).map(|i| w[i]).sum();
    // off the subset remove a fraction s_i of q_i, with Σ q_i s_i = v/2 and
    // every s_i strictly inside (0, 1)
    let base = half / rest;
    let mean_loss = (0..w.len())
        .filter(|&i| !inside[i])
        .map(|i| w[i] * loss[i])
        .sum::<f64>()
        / rest;
    let spread = (0..w.len())
        .filter(|&i| !inside[i])
        .map(|i| (loss[i] - mean_loss).abs())
        .fold(0.0, f64::max);
    let room = base.min(1.0 - base);
    let scale = if spread > 1e-9 { theta * room / spread } else { 0.0 };

    let weights = (0..w.len())
        .map(|i| {
            if inside[i] {
                w[i] + half * gain[i] / gain_total
            } else {
                let s = base + scale * (loss[i] - mean_loss);
                w[i] * (1.0 - s)
            }
        })
        .collect();
    DiscreteDistribution::renormalized(weights).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pythagorean_identity_and_minimality(
        raw in prop::collection::vec(0.05f64..1.0, 3..8),
        bits in any::<u32>(),
        frac in 0.01f64..0.99,
        gain in prop::collection::vec(0.05f64..1.0, 8),
        loss in prop::collection::vec(0.0f64..1.0, 8),
        theta in 0.0f64..0.9,
    ) {
        let q = DiscreteDistribution::renormalized(raw).unwrap();
        let k = q.len();
        let subset: Vec<usize> = (0..k).filter(|i| bits >> i & 1 == 1).collect();
        prop_assume!(!subset.is_empty() && subset.len() < k);
        let mass = q.mass(&subset);
        let v = frac * 2.0 * (1.0 - mass);
        let star = extremal_tilt(&q, &subset, v).unwrap();
        let p = random_class_member(&q, &subset, v, &gain, &loss, theta);
        prop_assert!((total_variation(&p, &q) - v).abs() < 1e-9);

        let lhs = kl_divergence(&p, &q).value();
        let rhs = kl_divergence(&p, &star).value() + kl_divergence(&star, &q).value();
        prop_assert!((lhs - rhs).abs() <= 1e-10, "{} vs {}", lhs, rhs);
        prop_assert!(kl_divergence(&star, &q).value() <= lhs + 1e-15);
        if total_variation(&p, &star) > 1e-6 {
            prop_assert!(kl_divergence(&star, &q).value() < lhs);
        }
    }
}

#[test]
fn shift_monotonicity_for_all_deltas() {
    for i in 1..=9 {
        let delta = 0.05 * i as f64;
        let lo = 0.5 + delta / 2.0;
        let grid: Vec<f64> = (0..=2000).map(|j| lo + (1.0 - lo) * j as f64 / 2000.0).collect();
        assert!(kl2_shift_increasing_check(delta, &grid).unwrap(), "delta {delta}");
    }
}

#[test]
fn second_order_taylor_remainder_is_cubic() {
    for &q0 in &[0.55, 0.7, 0.9] {
        let mut worst: f64 = 0.0;
        for j in 1..100 {
            let x = (j as f64 - 50.0) * 1e-3;
            let exact = kl2(q0 + x, q0).unwrap().value();
            let quad = x * x / (2.0 * q0 * (1.0 - q0));
            if x != 0.0 {
                worst = worst.max((exact - quad).abs() / x.abs().powi(3));
            }
        }
        assert!(worst.is_finite() && worst < 100.0, "q0 {q0}: C = {worst}");
    }
}

#[test]
fn expansion_remainder_is_quartic() {
    for &beta in &[0.55, 0.7, 0.9] {
        let ratios: Vec<f64> = (3..=12)
            .map(|j| {
                let v = 2f64.powi(-j);
                let exact = kl2(beta - v / 2.0, beta).unwrap().value();
                (exact - kl2_shift_expansion(beta, v, 3).unwrap()) / v.powi(4)
            })
            .collect();
        let max = ratios.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        assert!(max < 10.0, "beta {beta}: {ratios:?}");
    }
}

#[test]
fn vajda_cross_validation_grid() {
    for i in 1..200 {
        let v = i as f64 * 0.01;
        let param = vajda_l(v).unwrap();
        let direct = vajda_by_minimization(v).unwrap();
        assert!((param - direct).abs() <= 1e-8, "v = {v}: {param} vs {direct}");
        assert!(param >= v * v / 2.0);
    }
}

#[test]
fn vajda_round_trip_log_grid() {
    for i in 0..=80 {
        let t = 1e-3 * 10f64.powf(i as f64 * 4.0 / 80.0);
        let point = vajda_parametric(t).unwrap();
        let back = vajda_l(point.v).unwrap();
        assert!((back - point.value).abs() <= 1e-9, "t = {t}");
    }
}

#[test]
fn vajda_increasing_and_convex() {
    let values: Vec<f64> = (1..200).map(|i| vajda_l(i as f64 * 0.01).unwrap()).collect();
    for w in values.windows(2) {
        assert!(w[1] > w[0]);
    }
    for w in values.windows(3) {
        assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-9);
    }
    let v: f64 = 0.01;
    let ratio = (vajda_l(v).unwrap() - v * v / 2.0) / v.powi(4);
    assert!((ratio - 1.0 / 36.0).abs() <= 0.05 / 36.0, "{ratio}");
}

#[test]
fn balanced_rate_matches_mcdiarmid_constant() {
    // D*(ε, (1/2,1/2)) = KL₂(1/2 − ε/2, 1/2) = ε²/2 + ε⁴/12 + ε⁶/30 + …
    let q = DiscreteDistribution::new(vec![0.5, 0.5]).unwrap();
    for i in 1..=30 {
        let eps = i as f64 * 0.01;
        let d = dstar(&q, eps, false).unwrap().value.value();
        assert!(d <= eps * eps / 2.0 + eps.powi(4), "eps {eps}");
        assert!(d >= eps * eps / 2.0 + eps.powi(4) / 12.0);
        assert!(
            d <= eps * eps / 2.0 + eps.powi(4) / 12.0 + eps.powi(6) / 15.0,
            "eps {eps}"
        );
    }
}
