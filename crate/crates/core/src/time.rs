//! Integer-nanosecond time values.
//!
//! Scheduling boundaries are non-strict (an inter-arrival time equal to the
//! grant latency is schedulable), so every time quantity that takes part in a
//! comparison is kept as an exact integer count of nanoseconds.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

const NANOS_PER_SEC: i64 = 1_000_000_000;

/// A point in time or a time span, in nanoseconds.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Time(i64);

impl Time {
    pub const ZERO: Time = Time(0);

    pub const fn from_nanos(ns: i64) -> Self {
        Time(ns)
    }

    pub const fn from_micros(us: i64) -> Self {
        Time(us * 1_000)
    }

    pub const fn from_millis(ms: i64) -> Self {
        Time(ms * 1_000_000)
    }

    /// Rounds to the nearest nanosecond.
    pub fn from_secs_f64(secs: f64) -> Self {
        Time((secs * NANOS_PER_SEC as f64).round() as i64)
    }

    pub fn from_millis_f64(ms: f64) -> Self {
        Time((ms * 1e6).round() as i64)
    }

    pub const fn as_nanos(self) -> i64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / NANOS_PER_SEC as f64
    }

    pub fn as_millis_f64(self) -> f64 {
        self.0 as f64 / 1e6
    }

    pub const fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Number of whole `unit`s in `self` (floor division, `unit` > 0).
    pub fn div_floor(self, unit: Time) -> i64 {
        self.0.div_euclid(unit.0)
    }

    /// Smallest integer `k` with `k * unit >= self` (`unit` > 0).
    pub fn div_ceil(self, unit: Time) -> i64 {
        -(-self.0).div_euclid(unit.0)
    }

    pub fn is_multiple_of(self, unit: Time) -> bool {
        self.0.rem_euclid(unit.0) == 0
    }

    /// Fixed nine-decimal rendering in seconds, stable across platforms.
    pub fn fmt_secs(self) -> String {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        format!(
            "{sign}{}.{:09}",
            abs / NANOS_PER_SEC as u64,
            abs % NANOS_PER_SEC as u64
        )
    }
}

impl Add for Time {
    type Output = Time;
    fn add(self, rhs: Time) -> Time {
        Time(self.0 + rhs.0)
    }
}

impl AddAssign for Time {
    fn add_assign(&mut self, rhs: Time) {
        self.0 += rhs.0;
    }
}

impl Sub for Time {
    type Output = Time;
    fn sub(self, rhs: Time) -> Time {
        Time(self.0 - rhs.0)
    }
}

impl Mul<i64> for Time {
    type Output = Time;
    fn mul(self, rhs: i64) -> Time {
        Time(self.0 * rhs)
    }
}

impl Mul<Time> for i64 {
    type Output = Time;
    fn mul(self, rhs: Time) -> Time {
        Time(self * rhs.0)
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 != 0 && self.0.abs() < 1_000_000 {
            write!(f, "{}us", self.0 as f64 / 1e3)
        } else if self.0.abs() < NANOS_PER_SEC {
            write!(f, "{}ms", self.as_millis_f64())
        } else {
            write!(f, "{}s", self.as_secs_f64())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error(
    "invalid time value {0:?} (expected a number of seconds or a value with an s/ms/us suffix)"
)]
pub struct ParseTimeError(pub String);

impl FromStr for Time {
    type Err = ParseTimeError;

    /// Accepts `"0.5ms"`, `"2 s"`, `"125us"` or a bare number of seconds.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || ParseTimeError(s.to_string());
        let (num, scale) = if let Some(v) = t.strip_suffix("ms") {
            (v, 1e-3)
        } else if let Some(v) = t.strip_suffix("us") {
            (v, 1e-6)
        } else if let Some(v) = t.strip_suffix('s') {
            (v, 1.0)
        } else {
            (t, 1.0)
        };
        let value: f64 = num.trim().parse().map_err(|_| err())?;
        if !value.is_finite() {
            return Err(err());
        }
        // scale in integer nanoseconds to keep "0.125ms" exact
        let ns = (value * scale * 1e9).round();
        Ok(Time(ns as i64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_suffixes() {
        assert_eq!("0.5ms".parse::<Time>().unwrap(), Time::from_micros(500));
        assert_eq!(
            "0.125 ms".parse::<Time>().unwrap(),
            Time::from_nanos(125_000)
        );
        assert_eq!("1s".parse::<Time>().unwrap(), Time::from_millis(1000));
        assert_eq!("0.002".parse::<Time>().unwrap(), Time::from_millis(2));
        assert_eq!("250us".parse::<Time>().unwrap(), Time::from_micros(250));
        assert!("abc".parse::<Time>().is_err());
        assert!("ms".parse::<Time>().is_err());
    }

    #[test]
    fn floor_and_ceil_division() {
        let tb = Time::from_millis(200);
        assert_eq!(tb.div_floor(Time::from_micros(1500)), 133);
        assert_eq!(tb.div_ceil(Time::from_micros(1500)), 134);
        assert_eq!(tb.div_ceil(Time::from_millis(2)), 100);
        assert_eq!(Time::ZERO.div_ceil(Time::from_millis(2)), 0);
    }

    #[test]
    fn fixed_point_seconds() {
        assert_eq!(Time::from_micros(500).fmt_secs(), "0.000500000");
        assert_eq!(Time::from_millis(1500).fmt_secs(), "1.500000000");
        assert_eq!(Time::from_nanos(-5).fmt_secs(), "-0.000000005");
    }
}
