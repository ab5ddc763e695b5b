use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::curve::{effective_bandwidth, long_run_rate, ArrivalCurve, ServiceCurve};
use crate::error::{Error, Result};
use crate::radio::{RadioConfig, SchedulingScheme};
use crate::traffic::{HapticTrafficModel, LeftoverTrafficModel};

/// Relative back-off applied to the stability root so the inequality is strict.
pub const THETA_BACKOFF: f64 = 1e-9;
/// Relative bisection tolerance on the stability root.
pub const THETA_TOLERANCE: f64 = 1e-12;

/// How the outage probability enters the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum OutageConvention {
    /// `P{d > d0} <= eps`: solve `e^(-theta * beta(d0)) = eps`.
    #[default]
    Violation,
    /// Solve `e^(-theta * beta(d0)) = 1 - eps`.
    Complement,
}

impl FromStr for OutageConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "violation" => Ok(OutageConvention::Violation),
            "complement" | "paper_literal" => Ok(OutageConvention::Complement),
            other => Err(Error::config(
                "snc.outage_convention",
                format!("unknown convention {other:?} (expected violation or paper_literal)"),
            )),
        }
    }
}

impl fmt::Display for OutageConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutageConvention::Violation => "violation",
            OutageConvention::Complement => "paper_literal",
        })
    }
}

impl OutageConvention {
    /// Target value of the bounding function at `d0`.
    pub fn target(self, epsilon: f64) -> f64 {
        match self {
            OutageConvention::Violation => epsilon,
            OutageConvention::Complement => 1.0 - epsilon,
        }
    }
}

/// Largest theta keeping the effective bandwidth strictly below
/// `service_rate`, backed off by [`THETA_BACKOFF`].
pub fn max_theta(arrival: &LeftoverTrafficModel, service_rate: f64) -> Result<f64> {
    let mean_rate = arrival.mean_rate();
    // negated so that NaN rates land here too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(service_rate > mean_rate) {
        return Err(Error::Infeasible {
            service_rate,
            mean_rate,
        });
    }
    // with y = theta * sigma, solve (e^y - 1) / y = service_rate / mean_rate
    let target = service_rate / mean_rate;
    let g = |y: f64| y.exp_m1() / y;
    let mut hi = 1.0;
    while g(hi) <= target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > THETA_TOLERANCE * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo / arrival.sigma * (1.0 - THETA_BACKOFF))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayBound {
    pub scheme: SchedulingScheme,
    pub epsilon: f64,
    pub theta: f64,
    pub x_bits: f64,
    /// Delay bound in seconds.
    pub d0: f64,
    pub long_run_rate: f64,
}

impl DelayBound {
    pub const CSV_HEADER: &'static str =
        "scheme,tti_s,t_ib_s,epsilon,theta,x_bits,d0_s,long_run_rate_bps";

    pub fn csv_row(&self, radio: &RadioConfig, haptic: &HapticTrafficModel) -> String {
        format!(
            "{},{},{},{:e},{:.9e},{:.6},{:.9},{:.6}",
            self.scheme,
            radio.tti.fmt_secs(),
            haptic.t_ib.fmt_secs(),
            self.epsilon,
            self.theta,
            self.x_bits,
            self.d0,
            self.long_run_rate
        )
    }
}

/// Leftover delay bound at outage probability `epsilon`
/// (`P{d > d0} <= epsilon`).
pub fn delay_bound(
    scheme: SchedulingScheme,
    radio: &RadioConfig,
    haptic: &HapticTrafficModel,
    leftover: &LeftoverTrafficModel,
    epsilon: f64,
) -> Result<DelayBound> {
    delay_bound_with(
        scheme,
        radio,
        haptic,
        leftover,
        epsilon,
        OutageConvention::Violation,
    )
}

pub fn delay_bound_with(
    scheme: SchedulingScheme,
    radio: &RadioConfig,
    haptic: &HapticTrafficModel,
    leftover: &LeftoverTrafficModel,
    epsilon: f64,
    convention: OutageConvention,
) -> Result<DelayBound> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::config(
            "snc.epsilon",
            "must lie strictly between 0 and 1",
        ));
    }
    leftover.validate()?;
    let curve = ServiceCurve::new(scheme, radio, haptic)?;
    bound_for_curve(&curve, leftover, epsilon, convention)
}

pub fn bound_for_curve(
    curve: &ServiceCurve,
    leftover: &LeftoverTrafficModel,
    epsilon: f64,
    convention: OutageConvention,
) -> Result<DelayBound> {
    let rate = long_run_rate(curve)?;
    let theta = max_theta(leftover, rate)?;
    let x_bits = (1.0 / convention.target(epsilon)).ln() / theta;
    Ok(DelayBound {
        scheme: curve.scheme,
        epsilon,
        theta,
        x_bits,
        d0: curve.invert(x_bits),
        long_run_rate: rate,
    })
}

/// `e^(-theta * beta(d0))`, the violation probability guaranteed at `d0`.
pub fn violation_probability(theta: f64, curve: &ServiceCurve, d0: f64) -> f64 {
    (-theta * curve.eval(d0)).exp()
}

/// Min-plus convolution of two bounding functions, evaluated on a uniform
/// grid of `steps` intervals over `[0, x]`.
pub fn convolve_bounds(
    f: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
    x: f64,
    steps: usize,
) -> f64 {
    let steps = steps.max(1);
    (0..=steps)
        .map(|i| {
            let y = x * i as f64 / steps as f64;
            f(y) + g(x - y)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Sup over `tau` of the conservative delay needed for `beta` to catch up
/// with `alpha(tau) + x`, scanned over `[0, horizon]` at a quarter-TTI grid
/// plus every period boundary and every jump of the inner inverse.
pub fn horizontal_distance(
    arrival: &ArrivalCurve,
    x: f64,
    curve: &ServiceCurve,
    horizon: f64,
) -> Result<f64> {
    let rate = arrival.rate();
    let slope = curve.long_run_slope();
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(rate < slope) {
        return Err(Error::Divergence { horizon_s: horizon });
    }
    let inner = |tau: f64| (curve.invert(arrival.eval(tau) + x) - tau).max(0.0);

    let step = curve.radio.tti.as_secs_f64() / 4.0;
    let tp = curve.period();
    let mut taus: Vec<f64> = Vec::new();
    let n = (horizon / step).floor() as i64;
    taus.extend((0..=n).map(|i| i as f64 * step));
    let mut k = 1;
    while k as f64 * tp <= horizon {
        taus.push(k as f64 * tp);
        k += 1;
    }
    // the inverse jumps when the level crosses a segment minimum
    if rate > 0.0 {
        let mut k = 0i64;
        loop {
            let seg_min = curve.eval(k as f64 * tp);
            let tau = (seg_min - x) / rate;
            if tau > horizon {
                break;
            }
            if tau >= 0.0 {
                taus.push(tau);
                taus.push(tau * (1.0 + 1e-12) + 1e-15);
            }
            k += 1;
        }
    }
    taus.retain(|t| *t <= horizon);

    let cut = 0.8 * horizon;
    let mut early = 0.0f64;
    let mut late = 0.0f64;
    for &tau in &taus {
        let d = inner(tau);
        if tau <= cut {
            early = early.max(d);
        } else {
            late = late.max(d);
        }
    }
    if late > early + 1e-9 * early.max(1e-9) {
        return Err(Error::Divergence { horizon_s: horizon });
    }
    Ok(early.max(late))
}

/// Mean rate of the arrival envelope for a given theta.
pub fn arrival_rate(leftover: &LeftoverTrafficModel, theta: f64) -> f64 {
    effective_bandwidth(leftover.lambda_rate, leftover.sigma, theta)
}
