//! Minimum KL divergence on the complement of a total-variation ball.
//!
//! For a finite discrete distribution `Q` and `0 < v < 2`, this crate computes
//!
//! ```text
//! D*(v, Q) = inf { D(P‖Q) : V(P, Q) ≥ v },   V(P, Q) = Σ|p_i − q_i|
//! ```
//!
//! exactly, together with the classical lower bounds (Pinsker, the
//! balance-dependent coefficient `φ(Q)/4`, Vajda's curve `L(v)`), the
//! extremal distributions that attain `D*`, and a simulation harness for the
//! large-deviation behaviour of the empirical distribution.
//!
//! Total variation uses the full L1 norm (range `[0, 2]`), and every
//! divergence is in nats.
//!
//! ```
//! use klball::{dstar, DiscreteDistribution, DStarMethod};
//!
//! let q = DiscreteDistribution::new(vec![0.7, 0.3]).unwrap();
//! let r = dstar(&q, 0.2, false).unwrap();
//! assert_eq!(r.method, DStarMethod::ClosedForm);
//! assert!((r.value.value() - 0.0225824210843574).abs() < 1e-15);
//! ```

pub mod balance;
pub mod binary;
pub mod distribution;
pub mod dstar;
mod error;
pub mod sanov;
mod subsets;
pub mod vajda;

pub use balance::{
    balance_exact, balance_exact_with_limit, balance_greedy, phi_coefficient, BalanceMethod, BalanceReport,
};
pub use binary::{binary_coarsen, extremal_binary, kl2, kl2_shift_increasing_check, BinaryDistribution};
pub use distribution::{kl_divergence, parse_weights, total_variation, DiscreteDistribution, ExtendedReal};
pub use dstar::{
    dstar, dstar_enumerate, dstar_enumerate_with_limit, dstar_with, extremal_tilt, kl2_shift_expansion, ow_lower,
    ow_lower_from_beta, pinsker_lower, tilt_factors, DStarMethod, DStarOptions, DStarResult, MethodChoice,
};
pub use error::{Error, Result};
pub use sanov::{
    binary_tail_exact, binary_tail_exact_ln, lambda_n, mcdiarmid_bound, monte_carlo, sample_jn, sample_jn_trials,
    summarize, trial_rng, LambdaEnvelope, SanovEstimate, SimConfig,
};
pub use subsets::{DEFAULT_K_MAX, HARD_K_MAX};
pub use vajda::{vajda_by_minimization, vajda_invert, vajda_l, vajda_parametric, VajdaPoint};
