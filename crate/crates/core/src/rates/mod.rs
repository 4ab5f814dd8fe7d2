//! Large-deviation rate functions of the scheme and the thresholds derived
//! from them. All rates are in nats per round.

mod appendix_b;
mod kernel;
mod markov;
mod rate;
pub mod search;

pub use appendix_b::{appendix_b_rate, ConstrainedRate};
pub use kernel::{ln_mix, rho_minus, rho_plus, rho_plus_neg_limit, LdpKernel};
pub use markov::{j_scaled, legendre_transform, lemma3_gap, Legendre, MarkovLogMgf};
pub use rate::{
    optimize_over_p, phi, phi_prime, rate_c, rate_cg, rate_d, rate_point, Optimum, RateKind,
    RatePoint, RateValue, DEFAULT_P_GRID,
};

/// Clamp on the tilt parameter of every one-dimensional search.
pub const LAMBDA_MAX: f64 = 50.0;
