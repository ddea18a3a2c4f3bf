//! Closed-form bounds: sign-error probabilities, binomial sums and
//! convergence-rate right-hand sides.

mod binom;
mod conv;
mod perr;

pub use binom::{
    binom_f, binom_f_bound, binom_g, binom_g_bound, binomial_pmf, CompensatedSum,
};
pub use conv::{
    conv_bound, scaling_terms, BoundReport, BoundScenario, LandscapeConstants, ScenarioParams,
};
pub use perr::{
    as_probability, csi_error_factor, fail_prob_bound, grad_snr, perr_bound_awgn,
    perr_bound_fading, perr_bound_fading_conditional, perr_bound_imperfect, sign_advantage,
};
