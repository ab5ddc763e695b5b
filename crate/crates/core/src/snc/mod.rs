//! Stochastic network calculus for the leftover flow: the compound Poisson
//! arrival envelope, per-scheme leftover service curves, the stability-limited
//! choice of theta and the resulting delay bounds.

mod bound;
mod curve;

pub use bound::{
    arrival_rate, bound_for_curve, convolve_bounds, delay_bound, delay_bound_with,
    horizontal_distance, max_theta, violation_probability, DelayBound, OutageConvention,
    THETA_BACKOFF, THETA_TOLERANCE,
};
pub use curve::{
    beta_lo, effective_bandwidth, invert_beta, long_run_rate, ArrivalCurve, ServiceCurve,
};
