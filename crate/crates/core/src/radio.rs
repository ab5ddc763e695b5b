//! Radio-layer configuration, resource-block occupation and the closed-form
//! haptic access delays of the four uplink scheduling schemes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigIssue, Error, Result};
use crate::time::Time;

/// Processing and transmission steps are one TTI each.
const DS_STEPS_AFTER_SR: i64 = 6;
const DS_STEPS_BEFORE_GRANT: i64 = 3;
const GRANTED_STEPS: i64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioConfig {
    /// Number of frequency channels N.
    pub n_channels: u32,
    /// Total transmission rate C in bits per second.
    pub total_rate: f64,
    pub tti: Time,
    /// Scheduling-request opportunity period.
    pub t_sr: Time,
    /// Period of the pre-allocated uplink grant (SPS and SRR).
    pub t_pg: Time,
    /// Per-packet haptic resource demand divided by the total rate.
    pub haptic_demand_norm: Time,
}

impl Default for RadioConfig {
    fn default() -> Self {
        let tti = Time::from_micros(500);
        Self {
            n_channels: 10,
            total_rate: 1e6,
            tti,
            t_sr: tti,
            t_pg: tti * 10,
            haptic_demand_norm: Time::from_micros(100),
        }
    }
}

impl RadioConfig {
    /// Checks every invariant and returns all violations at once.
    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut issues = Vec::new();
        if self.n_channels == 0 {
            issues.push(ConfigIssue::new("radio.n_channels", "must be at least 1"));
        }
        if !(self.total_rate.is_finite() && self.total_rate > 0.0) {
            issues.push(ConfigIssue::new(
                "radio.total_rate",
                "must be a positive rate",
            ));
        }
        for (name, value) in [
            ("radio.tti", self.tti),
            ("radio.t_sr", self.t_sr),
            ("radio.t_pg", self.t_pg),
            ("radio.haptic_demand_norm", self.haptic_demand_norm),
        ] {
            if !value.is_positive() {
                issues.push(ConfigIssue::new(name, "must be positive"));
            }
        }
        if self.tti.is_positive() && self.t_pg < self.tti {
            issues.push(ConfigIssue::new(
                "radio.t_pg",
                format!(
                    "grant period {} is shorter than tti {}",
                    self.t_pg, self.tti
                ),
            ));
        }
        if issues.is_empty() {
            let m = self.blocks_unchecked();
            if m > i64::from(self.n_channels) {
                issues.push(ConfigIssue::new(
                    "radio.haptic_demand_norm",
                    format!(
                        "haptic packet needs {m} blocks but only {} channels exist",
                        self.n_channels
                    ),
                ));
            }
        }
        issues
    }

    pub fn validate(&self) -> Result<()> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(issues))
        }
    }

    fn blocks_unchecked(&self) -> i64 {
        (i64::from(self.n_channels) * self.haptic_demand_norm).div_ceil(self.tti)
    }

    /// Rate of a single channel, C/N.
    pub fn channel_rate(&self) -> f64 {
        self.total_rate / f64::from(self.n_channels)
    }
}

/// Number of frequency blocks a haptic packet occupies in its single TTI:
/// `ceil(N * (rho / C) / TTI)`.
pub fn m_blocks(config: &RadioConfig) -> Result<u32> {
    config.validate()?;
    Ok(config.blocks_unchecked() as u32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchedulingScheme {
    DynamicScheduling,
    SemiPersistent,
    SoftResourceReservation,
    FastUplink,
}

impl SchedulingScheme {
    pub const ALL: [SchedulingScheme; 4] = [
        SchedulingScheme::DynamicScheduling,
        SchedulingScheme::SemiPersistent,
        SchedulingScheme::SoftResourceReservation,
        SchedulingScheme::FastUplink,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            SchedulingScheme::DynamicScheduling => "DS",
            SchedulingScheme::SemiPersistent => "SPS",
            SchedulingScheme::SoftResourceReservation => "SRR",
            SchedulingScheme::FastUplink => "FA",
        }
    }
}

impl fmt::Display for SchedulingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.short_name())
    }
}

impl FromStr for SchedulingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ds" | "dynamic" | "dynamicscheduling" | "dynamic_scheduling" => {
                Ok(SchedulingScheme::DynamicScheduling)
            }
            "sps" | "semipersistent" | "semi_persistent" => Ok(SchedulingScheme::SemiPersistent),
            "srr" | "softresourcereservation" | "soft_resource_reservation" => {
                Ok(SchedulingScheme::SoftResourceReservation)
            }
            "fa" | "fastuplink" | "fast_uplink" => Ok(SchedulingScheme::FastUplink),
            other => Err(Error::config(
                "scheme",
                format!("unknown scheme {other:?} (expected DS, SPS, SRR or FA)"),
            )),
        }
    }
}

/// Worst-case uplink access delay of one haptic packet.
///
/// `in_burst` only matters for soft-resource reservation, which uses the
/// pre-allocated grant inside bursts and a scheduling request outside them.
pub fn haptic_access_delay(scheme: SchedulingScheme, config: &RadioConfig, in_burst: bool) -> Time {
    let tti = config.tti;
    let dynamic = config.t_sr + tti * DS_STEPS_AFTER_SR;
    let granted = config.t_pg + tti * GRANTED_STEPS;
    match scheme {
        SchedulingScheme::DynamicScheduling => dynamic,
        SchedulingScheme::SemiPersistent => granted,
        SchedulingScheme::FastUplink => tti * GRANTED_STEPS,
        SchedulingScheme::SoftResourceReservation => {
            if in_burst {
                granted
            } else {
                dynamic
            }
        }
    }
}

/// Time from packet arrival until the UE holds a dynamic grant:
/// SR wait, SR transmission, eNB processing and grant transmission.
pub fn ds_grant_latency(config: &RadioConfig) -> Time {
    config.t_sr + config.tti * DS_STEPS_BEFORE_GRANT
}

/// Fast uplink waits at most one TTI before it may transmit.
pub fn fa_grant_latency(config: &RadioConfig) -> Time {
    config.tti
}
