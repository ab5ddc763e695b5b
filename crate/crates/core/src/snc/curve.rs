use serde::Serialize;

use crate::analysis::{ds_effective_burst_count, fa_effective_burst_count};
use crate::error::{Error, Result};
use crate::radio::{m_blocks, RadioConfig, SchedulingScheme};
use crate::time::Time;
use crate::traffic::{counters, HapticTrafficModel, LeftoverTrafficModel};

/// Effective-bandwidth arrival envelope of compound Poisson traffic,
/// `alpha(t) = lambda * t * (e^(theta*sigma) - 1) / theta`, with bounding
/// function `f(x) = e^(-theta*x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArrivalCurve {
    pub theta: f64,
    pub lambda_rate: f64,
    pub sigma: f64,
}

impl ArrivalCurve {
    pub fn new(leftover: &LeftoverTrafficModel, theta: f64) -> Self {
        Self {
            theta,
            lambda_rate: leftover.lambda_rate,
            sigma: leftover.sigma,
        }
    }

    pub fn rate(&self) -> f64 {
        effective_bandwidth(self.lambda_rate, self.sigma, self.theta)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.rate() * t
    }

    pub fn bound(&self, x: f64) -> f64 {
        (-self.theta * x).exp()
    }
}

/// `lambda * (e^(theta*sigma) - 1) / theta`; tends to `lambda * sigma` as
/// theta goes to zero.
pub fn effective_bandwidth(lambda_rate: f64, sigma: f64, theta: f64) -> f64 {
    let y = theta * sigma;
    if y == 0.0 {
        lambda_rate * sigma
    } else {
        lambda_rate * sigma * y.exp_m1() / y
    }
}

/// Service left over for background traffic once the haptic flow has taken
/// its blocks:
///
/// `beta(u) = C*u - (m*C/N) * TTI * (n_p(u) * R_period + R_excess + 2)`
///
/// with `n_p(u) = floor(u / t_p)`. There is no positive-part clamp, so the
/// curve is negative for small `u` and drops at every multiple of `t_p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ServiceCurve {
    pub scheme: SchedulingScheme,
    pub radio: RadioConfig,
    pub haptic: HapticTrafficModel,
    pub m: u32,
    /// Haptic transmissions charged per whole period.
    pub period_count: i64,
    /// Transmissions charged for the excess burst.
    pub excess_count: i64,
}

/// Two boundary TTIs lost to worst-case interval placement.
const EDGE_TTIS: i64 = 2;

impl ServiceCurve {
    pub fn new(
        scheme: SchedulingScheme,
        radio: &RadioConfig,
        haptic: &HapticTrafficModel,
    ) -> Result<Self> {
        let m = m_blocks(radio)?;
        haptic.validate()?;
        let r_nb = counters(haptic, Time::ZERO).r_nb;
        let r_bg = haptic.t_b.div_floor(radio.t_pg);
        let (period_count, excess_count) = match scheme {
            SchedulingScheme::DynamicScheduling => {
                let r_b = ds_effective_burst_count(radio, haptic);
                (r_b + r_nb, r_b)
            }
            SchedulingScheme::FastUplink => {
                let r_b = fa_effective_burst_count(radio, haptic);
                (r_b + r_nb, r_b)
            }
            SchedulingScheme::SemiPersistent => (haptic.t_p.div_floor(radio.t_pg), r_bg),
            SchedulingScheme::SoftResourceReservation => (r_bg + r_nb, r_bg),
        };
        Ok(Self {
            scheme,
            radio: *radio,
            haptic: *haptic,
            m,
            period_count,
            excess_count,
        })
    }

    /// Same curve with the block count overridden (`0` models no haptic load).
    pub fn with_blocks(mut self, m: u32) -> Self {
        self.m = m;
        self
    }

    pub fn capacity(&self) -> f64 {
        self.radio.total_rate
    }

    /// Bits one haptic transmission removes from the leftover service.
    pub fn bits_per_haptic_slot(&self) -> f64 {
        f64::from(self.m) * self.radio.channel_rate() * self.radio.tti.as_secs_f64()
    }

    pub fn period(&self) -> f64 {
        self.haptic.t_p.as_secs_f64()
    }

    /// Whole periods in `u` seconds.
    pub fn periods_in(&self, u: f64) -> i64 {
        let tp = self.period();
        let mut n = (u / tp).floor() as i64;
        if (n + 1) as f64 * tp <= u {
            n += 1;
        } else if n > 0 && n as f64 * tp > u {
            n -= 1;
        }
        n.max(0)
    }

    fn offset(&self, periods: i64) -> f64 {
        self.bits_per_haptic_slot()
            * (periods * self.period_count + self.excess_count + EDGE_TTIS) as f64
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.capacity() * u - self.offset(self.periods_in(u))
    }

    /// Asymptotic slope `C - (m*C/N) * TTI * R_period / t_p`.
    pub fn long_run_slope(&self) -> f64 {
        self.capacity() - self.bits_per_haptic_slot() * self.period_count as f64 / self.period()
    }

    /// Minimum of the curve on segment `k`, attained at `u = k * t_p`.
    fn segment_min(&self, k: i64) -> f64 {
        self.capacity() * k as f64 * self.period() - self.offset(k)
    }

    /// Conservative inverse: the first `s >= 0` with `beta(u) >= x` for every
    /// `u >= s`. Infinite when the long-run slope is not positive.
    pub fn invert(&self, x: f64) -> f64 {
        let slope = self.long_run_slope();
        if slope <= 0.0 {
            return f64::INFINITY;
        }
        let tp = self.period();
        let excess = self.offset(0);
        let guess = ((x + excess) / (slope * tp)).ceil();
        let mut k = if guess.is_finite() {
            guess.max(0.0) as i64
        } else {
            0
        };
        while k > 0 && self.segment_min(k - 1) >= x {
            k -= 1;
        }
        while self.segment_min(k) < x {
            k += 1;
        }
        if k == 0 {
            return 0.0;
        }
        // segment k-1 starts below x; it is linear with slope C
        let j = k - 1;
        let crossing = (x + self.offset(j)) / self.capacity();
        let seg_end = k as f64 * tp;
        if crossing < seg_end {
            crossing.max(j as f64 * tp)
        } else {
            seg_end
        }
    }
}

/// Leftover service curve value `beta_lo(u)` in bits.
pub fn beta_lo(
    scheme: SchedulingScheme,
    radio: &RadioConfig,
    haptic: &HapticTrafficModel,
    u: f64,
) -> Result<f64> {
    Ok(ServiceCurve::new(scheme, radio, haptic)?.eval(u))
}

/// Long-run service rate available to leftover traffic, in bits per second.
pub fn long_run_rate(curve: &ServiceCurve) -> Result<f64> {
    let rate = curve.long_run_slope();
    if rate > 0.0 {
        Ok(rate)
    } else {
        Err(Error::Saturated(rate))
    }
}

pub fn invert_beta(curve: &ServiceCurve, x: f64) -> f64 {
    curve.invert(x)
}
