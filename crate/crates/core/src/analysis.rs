//! Per-scheme grant mechanics at the analytic level: an exact walk over one
//! haptic traffic period that decides which packets are transmitted and which
//! are dropped, and the resulting remainder of service.
//!
//! Haptic packets are never buffered. A packet that cannot be scheduled on
//! arrival is superseded by the next update and counts as dropped.
//!
//! * Dynamic scheduling and fast uplink accept a packet only if the UE is
//!   idle; acceptance keeps it busy for the grant latency. An arrival exactly
//!   at the end of the busy interval is accepted.
//! * Semi-persistent grants sit at multiples of `t_pg`. A packet is carried by
//!   the first grant strictly after its arrival; when several packets wait for
//!   the same grant only the latest is sent.
//! * Soft-resource reservation behaves like semi-persistent scheduling inside
//!   the burst window and like dynamic scheduling outside it.

use serde::Serialize;

use crate::error::Result;
use crate::radio::{
    ds_grant_latency, fa_grant_latency, haptic_access_delay, m_blocks, RadioConfig,
    SchedulingScheme,
};
use crate::time::Time;
use crate::traffic::{counters, HapticTrafficModel};

/// Access delay added after a pre-allocated grant: read, process, transmit,
/// decode, one TTI each.
const GRANTED_TAIL_TTIS: i64 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrantPattern {
    pub scheme: SchedulingScheme,
    pub instants: Vec<Time>,
    pub hyperperiod: Time,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DropReport {
    pub scheme: SchedulingScheme,
    pub arrivals: u64,
    pub transmitted: u64,
    pub dropped: u64,
    pub drop_rate: f64,
    /// Transmitted packets that arrived inside the burst window.
    pub burst_transmitted: u64,
    pub per_packet_delays: Vec<Time>,
}

impl DropReport {
    pub fn max_access_delay(&self) -> Time {
        self.per_packet_delays
            .iter()
            .copied()
            .max()
            .unwrap_or(Time::ZERO)
    }

    pub const CSV_HEADER: &'static str =
        "scheme,tti_s,t_ib_s,arrivals,transmitted,dropped,drop_rate,max_access_delay_s";

    pub fn csv_row(&self, radio: &RadioConfig, haptic: &HapticTrafficModel) -> String {
        format!(
            "{},{},{},{},{},{},{:.9},{}",
            self.scheme,
            radio.tti.fmt_secs(),
            haptic.t_ib.fmt_secs(),
            self.arrivals,
            self.transmitted,
            self.dropped,
            self.drop_rate,
            self.max_access_delay().fmt_secs()
        )
    }
}

#[derive(Clone, Copy)]
enum Path {
    Dynamic(Time),
    Granted,
}

fn path_for(scheme: SchedulingScheme, radio: &RadioConfig, in_burst: bool) -> Path {
    match scheme {
        SchedulingScheme::DynamicScheduling => Path::Dynamic(ds_grant_latency(radio)),
        SchedulingScheme::FastUplink => Path::Dynamic(fa_grant_latency(radio)),
        SchedulingScheme::SemiPersistent => Path::Granted,
        SchedulingScheme::SoftResourceReservation if in_burst => Path::Granted,
        SchedulingScheme::SoftResourceReservation => Path::Dynamic(ds_grant_latency(radio)),
    }
}

/// First grant instant strictly after `arrival` on the `t_pg` lattice.
pub fn serving_grant(arrival: Time, t_pg: Time) -> Time {
    (arrival.div_floor(t_pg) + 1) * t_pg
}

struct Pending {
    arrival: Time,
    grant: Time,
}

/// Walks one traffic period with the given arrival offsets (relative to the
/// period start, increasing). Exposed so the simulator can be checked
/// against slot-rounded arrivals.
pub fn walk_offsets(
    scheme: SchedulingScheme,
    radio: &RadioConfig,
    haptic: &HapticTrafficModel,
    offsets: &[Time],
) -> DropReport {
    let granted_tail = radio.tti * GRANTED_TAIL_TTIS;
    let mut idle_from = Time::from_nanos(i64::MIN);
    let mut pending: Option<Pending> = None;
    let mut transmitted = 0u64;
    let mut dropped = 0u64;
    let mut burst_transmitted = 0u64;
    let mut delays = Vec::with_capacity(offsets.len());

    let send_granted =
        |p: Pending, delays: &mut Vec<Time>, transmitted: &mut u64, burst: &mut u64| {
            *transmitted += 1;
            if haptic.in_burst(p.arrival) {
                *burst += 1;
            }
            delays.push(p.grant - p.arrival + granted_tail);
        };

    for &a in offsets {
        let in_burst = haptic.in_burst(a);
        match path_for(scheme, radio, in_burst) {
            Path::Dynamic(latency) => {
                if a >= idle_from {
                    idle_from = a + latency;
                    transmitted += 1;
                    if in_burst {
                        burst_transmitted += 1;
                    }
                    delays.push(haptic_access_delay(scheme, radio, in_burst));
                } else {
                    dropped += 1;
                }
            }
            Path::Granted => {
                let grant = serving_grant(a, radio.t_pg);
                if let Some(p) = pending.take() {
                    if p.grant == grant {
                        dropped += 1;
                    } else {
                        send_granted(p, &mut delays, &mut transmitted, &mut burst_transmitted);
                    }
                }
                pending = Some(Pending { arrival: a, grant });
            }
        }
    }
    if let Some(p) = pending.take() {
        send_granted(p, &mut delays, &mut transmitted, &mut burst_transmitted);
    }

    let arrivals = offsets.len() as u64;
    DropReport {
        scheme,
        arrivals,
        transmitted,
        dropped,
        drop_rate: if arrivals == 0 {
            0.0
        } else {
            dropped as f64 / arrivals as f64
        },
        burst_transmitted,
        per_packet_delays: delays,
    }
}

/// Exact drop accounting over one traffic period (no excess burst).
pub fn drop_walk(
    scheme: SchedulingScheme,
    radio: &RadioConfig,
    haptic: &HapticTrafficModel,
) -> DropReport {
    walk_offsets(scheme, radio, haptic, &haptic.period_offsets())
}

fn effective_burst_count(latency: Time, haptic: &HapticTrafficModel) -> i64 {
    let k = latency.div_ceil(haptic.t_ib).max(1);
    haptic.t_b.div_floor(haptic.t_ib * k)
}

/// Packets per burst that dynamic scheduling can carry: with grant latency
/// `G`, only every `k`-th packet is served where `k = max(1, ceil(G / t_ib))`.
pub fn ds_effective_burst_count(radio: &RadioConfig, haptic: &HapticTrafficModel) -> i64 {
    effective_burst_count(ds_grant_latency(radio), haptic)
}

/// Fast-uplink analogue of [`ds_effective_burst_count`], gated by one TTI.
pub fn fa_effective_burst_count(radio: &RadioConfig, haptic: &HapticTrafficModel) -> i64 {
    effective_burst_count(fa_grant_latency(radio), haptic)
}

/// Haptic transmissions charged against the channel in one period.
pub fn consumed_per_period(
    scheme: SchedulingScheme,
    radio: &RadioConfig,
    haptic: &HapticTrafficModel,
) -> i64 {
    match scheme {
        SchedulingScheme::DynamicScheduling | SchedulingScheme::FastUplink => {
            drop_walk(scheme, radio, haptic).transmitted as i64
        }
        SchedulingScheme::SemiPersistent => haptic.t_p.div_floor(radio.t_pg),
        SchedulingScheme::SoftResourceReservation => {
            haptic.t_b.div_floor(radio.t_pg) + counters(haptic, Time::ZERO).r_nb
        }
    }
}

/// Bits per traffic period left for background traffic.
pub fn remainder_of_service(
    scheme: SchedulingScheme,
    radio: &RadioConfig,
    haptic: &HapticTrafficModel,
) -> Result<f64> {
    let m = f64::from(m_blocks(radio)?);
    let c = radio.total_rate;
    let per_haptic_slot = m * radio.channel_rate() * radio.tti.as_secs_f64();
    let consumed = consumed_per_period(scheme, radio, haptic) as f64;
    Ok(c * haptic.t_p.as_secs_f64() - per_haptic_slot * consumed)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn grant_pattern(
    scheme: SchedulingScheme,
    radio: &RadioConfig,
    haptic: &HapticTrafficModel,
) -> GrantPattern {
    let t_pg = radio.t_pg;
    match scheme {
        SchedulingScheme::SemiPersistent => {
            let (p, g) = (haptic.t_p.as_nanos(), t_pg.as_nanos());
            let hyperperiod = Time::from_nanos(p / gcd(p, g) * g);
            let n = hyperperiod.div_ceil(t_pg);
            GrantPattern {
                scheme,
                instants: (0..n).map(|k| t_pg * k).collect(),
                hyperperiod,
            }
        }
        SchedulingScheme::SoftResourceReservation => {
            // reserved grants that carry burst arrivals, closing the burst window
            let n = haptic.t_b.div_ceil(t_pg);
            GrantPattern {
                scheme,
                instants: (1..=n)
                    .map(|k| t_pg * k)
                    .filter(|&t| t < haptic.t_p)
                    .collect(),
                hyperperiod: haptic.t_p,
            }
        }
        SchedulingScheme::DynamicScheduling | SchedulingScheme::FastUplink => GrantPattern {
            scheme,
            instants: Vec::new(),
            hyperperiod: haptic.t_p,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use SchedulingScheme::*;

    fn radio_at(tti_us: i64, pg_ttis: i64) -> RadioConfig {
        let tti = Time::from_micros(tti_us);
        RadioConfig {
            tti,
            t_sr: tti,
            t_pg: tti * pg_ttis,
            ..RadioConfig::default()
        }
    }

    fn haptic_ib(t_ib_us: i64) -> HapticTrafficModel {
        HapticTrafficModel {
            t_ib: Time::from_micros(t_ib_us),
            worst_case_excess_burst: false,
            ..HapticTrafficModel::default()
        }
    }

    #[test]
    fn ds_boundary_is_schedulable() {
        let r = drop_walk(DynamicScheduling, &radio_at(500, 10), &haptic_ib(2000));
        assert_eq!(r.dropped, 0);
        assert_eq!(r.transmitted, 116);
    }

    #[test]
    fn ds_drops_above_two_packets_per_4ms() {
        let r = drop_walk(DynamicScheduling, &radio_at(500, 10), &haptic_ib(1500));
        assert!(r.drop_rate > 0.0);
        // every other burst packet: 134 arrivals, 67 served
        assert_eq!(r.burst_transmitted, 67);
    }

    #[test]
    fn fa_never_drops_in_range() {
        for t_ib in (1000..=3000).step_by(50) {
            let r = drop_walk(FastUplink, &radio_at(500, 10), &haptic_ib(t_ib));
            assert_eq!(r.dropped, 0, "t_ib {t_ib}us");
        }
    }

    #[test]
    fn sps_usable_at_short_tti() {
        let r = drop_walk(SemiPersistent, &radio_at(125, 10), &haptic_ib(1300));
        assert_eq!(r.dropped, 0);
    }

    #[test]
    fn sps_drops_at_half_ms() {
        let r = drop_walk(SemiPersistent, &radio_at(500, 10), &haptic_ib(2000));
        assert!(r.drop_rate > 0.0);
        // grants every 5 ms in the burst carry one of 2 or 3 arrivals each
        assert_eq!(r.burst_transmitted, 40);
    }

    #[test]
    fn report_accounting_holds() {
        for scheme in SchedulingScheme::ALL {
            for t_ib in [900, 1300, 2000, 2900] {
                let r = drop_walk(scheme, &radio_at(250, 10), &haptic_ib(t_ib));
                assert_eq!(r.arrivals, r.transmitted + r.dropped);
                assert_eq!(r.per_packet_delays.len() as u64, r.transmitted);
            }
        }
    }

    #[test]
    fn max_access_delays_match_closed_forms() {
        let radio = radio_at(500, 10);
        let h = haptic_ib(2500);
        assert_eq!(
            drop_walk(DynamicScheduling, &radio, &h).max_access_delay(),
            radio.tti * 7
        );
        assert_eq!(
            drop_walk(FastUplink, &radio, &h).max_access_delay(),
            radio.tti * 4
        );
        // quiet-period arrivals sit on grant instants and wait a full period
        assert_eq!(
            drop_walk(SemiPersistent, &radio, &h).max_access_delay(),
            radio.tti * 14
        );
        // inside the burst a grant-aligned packet survives only if nothing
        // newer arrives before the next grant
        let sparse = haptic_ib(5000);
        assert_eq!(
            drop_walk(SoftResourceReservation, &radio, &sparse).max_access_delay(),
            radio.tti * 14
        );
        assert!(drop_walk(SoftResourceReservation, &radio, &h).max_access_delay() < radio.tti * 14);
    }

    #[test]
    fn effective_burst_count_examples() {
        let radio = radio_at(500, 10);
        assert_eq!(ds_effective_burst_count(&radio, &haptic_ib(2000)), 100);
        assert_eq!(ds_effective_burst_count(&radio, &haptic_ib(1500)), 66);
        assert_eq!(ds_effective_burst_count(&radio, &haptic_ib(900)), 74);
    }

    #[test]
    fn closed_form_tracks_walk() {
        let radio = radio_at(500, 10);
        // 200 ms is a whole number of k * t_ib: exact agreement
        for t_ib in [2000, 1250, 1000] {
            let h = haptic_ib(t_ib);
            let walk = drop_walk(DynamicScheduling, &radio, &h).burst_transmitted as i64;
            assert_eq!(ds_effective_burst_count(&radio, &h), walk, "t_ib {t_ib}us");
        }
        assert_eq!(ds_effective_burst_count(&radio, &haptic_ib(900)), 74);
        assert_eq!(
            drop_walk(DynamicScheduling, &radio, &haptic_ib(900)).burst_transmitted,
            74
        );
        // 133 burst arrivals, every other one served: the walk keeps the odd
        // packet out that 200 / 3 truncates
        let h = haptic_ib(1500);
        let walk = drop_walk(DynamicScheduling, &radio, &h).burst_transmitted as i64;
        assert_eq!(walk, 67);
        assert_eq!(ds_effective_burst_count(&radio, &h), 66);
    }

    #[test]
    fn srr_keeps_more_service_than_sps() {
        let radio = radio_at(500, 10);
        let h = haptic_ib(2000);
        assert_eq!(consumed_per_period(SemiPersistent, &radio, &h), 200);
        assert_eq!(consumed_per_period(SoftResourceReservation, &radio, &h), 56);
        let sps = remainder_of_service(SemiPersistent, &radio, &h).unwrap();
        let srr = remainder_of_service(SoftResourceReservation, &radio, &h).unwrap();
        assert!(srr > sps);
        assert_eq!(sps, 1e6 - 0.2e6 * 0.0005 * 200.0);
    }

    #[test]
    fn reserved_schemes_ignore_t_ib() {
        let radio = radio_at(500, 10);
        for scheme in [SemiPersistent, SoftResourceReservation] {
            let base = remainder_of_service(scheme, &radio, &haptic_ib(1000)).unwrap();
            for t_ib in [2000, 3000] {
                assert_eq!(
                    remainder_of_service(scheme, &radio, &haptic_ib(t_ib)).unwrap(),
                    base
                );
            }
        }
    }

    #[test]
    fn ds_remainder_grows_with_t_ib() {
        let radio = radio_at(500, 10);
        let a = remainder_of_service(DynamicScheduling, &radio, &haptic_ib(2000)).unwrap();
        let b = remainder_of_service(DynamicScheduling, &radio, &haptic_ib(3000)).unwrap();
        assert!(b > a);
    }

    #[test]
    fn grant_pattern_examples() {
        let radio = radio_at(500, 10);
        let h = haptic_ib(2000);
        let sps = grant_pattern(SemiPersistent, &radio, &h);
        assert_eq!(sps.instants.len(), 200);
        assert!(sps.instants.windows(2).all(|w| w[1] - w[0] == radio.t_pg));
        let srr = grant_pattern(SoftResourceReservation, &radio, &h);
        assert_eq!(srr.instants.len(), 40);
        assert!(srr.instants.iter().all(|&t| t <= h.t_b));
        assert!(grant_pattern(DynamicScheduling, &radio, &h)
            .instants
            .is_empty());
    }

    #[test]
    fn sps_hyperperiod_covers_misaligned_period() {
        let tti = Time::from_micros(500);
        let radio = RadioConfig {
            t_pg: tti * 6, // 3 ms does not divide 1 s
            ..radio_at(500, 10)
        };
        let p = grant_pattern(SemiPersistent, &radio, &haptic_ib(2000));
        assert_eq!(p.hyperperiod, Time::from_millis(3000));
        assert_eq!(p.instants.len(), 1000);
    }
}
