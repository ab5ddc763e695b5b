//! Slot-level discrete-event simulation of the uplink: the haptic scheduler
//! occupies `m` channels in the slots it transmits, and compound Poisson
//! background traffic is served FIFO on whatever capacity is left.

mod haptic;

use std::collections::VecDeque;

use serde::Serialize;

use crate::analysis::walk_offsets;
use crate::error::{ConfigIssue, Error, Result};
use crate::radio::{m_blocks, RadioConfig, SchedulingScheme};
use crate::time::Time;
use crate::traffic::{leftover_arrivals, HapticTrafficModel, LeftoverTrafficModel};

use haptic::HapticEngine;
pub use haptic::PeriodCounts;

/// Queue growth that marks a run as unstable.
const UNSTABLE_FACTOR: usize = 10;
const UNSTABLE_MIN_QUEUE: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub radio: RadioConfig,
    pub haptic: HapticTrafficModel,
    pub leftover: LeftoverTrafficModel,
    pub scheme: SchedulingScheme,
    pub horizon: Time,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(scheme: SchedulingScheme, horizon: Time, seed: u64) -> Self {
        Self {
            radio: RadioConfig::default(),
            haptic: HapticTrafficModel::default(),
            leftover: LeftoverTrafficModel::default(),
            scheme,
            horizon,
            seed,
        }
    }

    /// Horizon rounded to the nearest whole slot.
    pub fn effective_horizon(&self) -> Time {
        let tti = self.radio.tti;
        if !tti.is_positive() {
            return self.horizon;
        }
        (self.horizon + Time::from_nanos(tti.as_nanos() / 2)).div_floor(tti) * tti
    }

    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut issues = self.radio.issues();
        issues.extend(self.haptic.issues());
        issues.extend(self.leftover.issues());
        if !issues.is_empty() {
            return issues;
        }
        let tti = self.radio.tti;
        for (field, value) in [
            ("radio.t_sr", self.radio.t_sr),
            ("radio.t_pg", self.radio.t_pg),
            ("haptic.t_p", self.haptic.t_p),
            ("haptic.t_b", self.haptic.t_b),
        ] {
            if !value.is_multiple_of(tti) {
                issues.push(ConfigIssue::new(
                    field,
                    format!("{value} is not a whole number of TTIs ({tti}); slot-level simulation needs aligned grants"),
                ));
            }
        }
        if self.horizon < self.haptic.t_p * 10 {
            issues.push(ConfigIssue::new(
                "experiment.horizon",
                format!("{} is shorter than ten traffic periods", self.horizon),
            ));
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
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub scheme: SchedulingScheme,
    pub tti: Time,
    pub t_ib: Time,
    pub seed: u64,
    pub slots_simulated: i64,
    pub haptic_arrivals: u64,
    pub haptic_transmitted: u64,
    pub haptic_dropped: u64,
    pub haptic_drop_rate: f64,
    /// Arrival to decoded, seconds, after warm-up.
    pub haptic_delays: Vec<f64>,
    pub max_haptic_tx_per_slot: u32,
    pub leftover_packets: u64,
    /// Arrival to last bit served, seconds, after warm-up.
    pub leftover_delays: Vec<f64>,
    pub leftover_served_bits: f64,
    /// Leftover packets still queued at the horizon.
    pub leftover_backlog: u64,
    /// Capacity not taken by haptic transmissions over the whole run.
    pub free_capacity_bits: f64,
    /// Unused capacity in slots where the queue stayed non-empty throughout.
    pub busy_slot_idle_bits: f64,
    pub remainder_bits_per_period: f64,
    pub period_counts: Vec<PeriodCounts>,
}

impl SimReport {
    pub const CSV_HEADER: &'static str =
        "scheme,tti_s,t_ib_s,seed,haptic_drop_rate,haptic_delay_max_s,leftover_p99_s,remainder_bits";

    pub fn haptic_delay_max(&self) -> f64 {
        self.haptic_delays.iter().copied().fold(0.0, f64::max)
    }

    pub fn leftover_quantile(&self, p: f64) -> Result<f64> {
        empirical_quantile(&self.leftover_delays, p)
    }

    pub fn csv_row(&self) -> String {
        let p99 = self
            .leftover_quantile(0.99)
            .map(|q| format!("{q:.9}"))
            .unwrap_or_else(|_| "nan".to_string());
        format!(
            "{},{},{},{},{:.9},{:.9},{},{:.3}",
            self.scheme,
            self.tti.fmt_secs(),
            self.t_ib.fmt_secs(),
            self.seed,
            self.haptic_drop_rate,
            self.haptic_delay_max(),
            p99,
            self.remainder_bits_per_period
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

struct Queued {
    arrival: f64,
    remaining: f64,
}

/// Runs one seeded simulation.
pub fn run(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let radio = &config.radio;
    let m = m_blocks(radio)?;
    let n = radio.n_channels;
    let tti = radio.tti.as_secs_f64();
    let per_channel = radio.channel_rate() * tti;
    let horizon = config.effective_horizon();
    let horizon_slots = horizon.div_floor(radio.tti);
    let half_slot = horizon_slots / 2;
    let warmup = config.haptic.t_p.as_secs_f64();

    let arrivals = leftover_arrivals(&config.leftover, horizon.as_secs_f64(), config.seed).arrivals;
    let end = arrivals.partition_point(|a| a.time < horizon.as_secs_f64());
    let arrivals = &arrivals[..end];

    let mut engine = HapticEngine::new(config);
    let mut queue: VecDeque<Queued> = VecDeque::new();
    let mut next = 0usize;
    let mut delays = Vec::new();
    let mut served_bits = 0.0;
    let mut busy_idle = 0.0;
    let mut queue_mid: Option<usize> = None;

    let mut slot = 0i64;
    while slot < horizon_slots {
        if queue.is_empty() {
            let Some(a) = arrivals.get(next) else { break };
            slot = slot.max((a.time / tti).floor() as i64);
            if slot >= horizon_slots {
                break;
            }
        }
        if queue_mid.is_none() && slot >= half_slot {
            queue_mid = Some(queue.len());
        }

        let occupied = (engine.transmissions_in(slot) * m).min(n);
        let free = f64::from(n - occupied) * per_channel;
        let rate = free / tti;
        let start = slot as f64 * tti;
        let stop = start + tti;
        let mut drained = queue.is_empty();
        let mut t = start;
        let mut served_here = 0.0;
        loop {
            while next < arrivals.len() && arrivals[next].time <= t {
                queue.push_back(Queued {
                    arrival: arrivals[next].time,
                    remaining: arrivals[next].size_bits,
                });
                next += 1;
            }
            let Some(head) = queue.front_mut() else {
                drained = true;
                match arrivals.get(next) {
                    Some(a) if a.time < stop => {
                        t = a.time;
                        continue;
                    }
                    _ => break,
                }
            };
            if rate <= 0.0 {
                break;
            }
            let finish = t + head.remaining / rate;
            if finish <= stop {
                served_here += head.remaining;
                if head.arrival >= warmup {
                    delays.push(finish - head.arrival);
                }
                queue.pop_front();
                t = finish;
            } else {
                let part = rate * (stop - t);
                head.remaining -= part;
                served_here += part;
                break;
            }
        }
        // arrivals later in the slot that found no capacity left
        while next < arrivals.len() && arrivals[next].time < stop {
            queue.push_back(Queued {
                arrival: arrivals[next].time,
                remaining: arrivals[next].size_bits,
            });
            next += 1;
        }
        if !drained {
            busy_idle += (free - served_here).max(0.0);
        }
        served_bits += served_here;
        slot += 1;
    }
    engine.finish();

    let queue_end = queue.len() + (arrivals.len() - next);
    let queue_mid = queue_mid.unwrap_or(0);
    if queue_mid > UNSTABLE_MIN_QUEUE
        && queue_end > UNSTABLE_MIN_QUEUE
        && queue_end > UNSTABLE_FACTOR * queue_mid
    {
        return Err(Error::Unstable {
            queue_mid,
            queue_end,
        });
    }

    let measured = &engine.periods[1.min(engine.periods.len())..];
    let haptic_arrivals: u64 = measured.iter().map(|p| p.arrivals).sum();
    let haptic_transmitted: u64 = measured.iter().map(|p| p.transmitted).sum();
    let haptic_dropped: u64 = measured.iter().map(|p| p.dropped).sum();
    let haptic_bits = f64::from(m) * per_channel;
    let measured_periods =
        (horizon - config.haptic.t_p).as_secs_f64() / config.haptic.t_p.as_secs_f64();
    let capacity_per_period = radio.total_rate * config.haptic.t_p.as_secs_f64();

    Ok(SimReport {
        scheme: config.scheme,
        tti: radio.tti,
        t_ib: config.haptic.t_ib,
        seed: config.seed,
        slots_simulated: horizon_slots,
        haptic_arrivals,
        haptic_transmitted,
        haptic_dropped,
        haptic_drop_rate: if haptic_arrivals == 0 {
            0.0
        } else {
            haptic_dropped as f64 / haptic_arrivals as f64
        },
        haptic_delays: std::mem::take(&mut engine.delays),
        max_haptic_tx_per_slot: engine.max_tx_per_slot,
        leftover_packets: delays.len() as u64,
        leftover_delays: delays,
        leftover_served_bits: served_bits,
        leftover_backlog: queue_end as u64,
        free_capacity_bits: radio.total_rate * tti * horizon_slots as f64
            - haptic_bits * engine.occupied_total as f64,
        busy_slot_idle_bits: busy_idle,
        remainder_bits_per_period: capacity_per_period
            - haptic_bits * engine.occupied_after_warmup as f64 / measured_periods,
        period_counts: std::mem::take(&mut engine.periods),
    })
}

/// Nearest-rank quantile: the `ceil(p * n)`-th smallest sample.
pub fn empirical_quantile(samples: &[f64], p: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let r = p * n as f64;
    // keep exact products such as 0.99 * 1e5 from rounding up a rank
    let rank = if (r - r.round()).abs() < 1e-9 * n as f64 {
        r.round()
    } else {
        r.ceil()
    };
    let rank = (rank as usize).clamp(1, n);
    Ok(sorted[rank - 1])
}

/// Checks the simulator's per-period haptic counts against the analytic
/// walk re-run on slot-rounded arrival offsets. Mismatches are logged.
pub fn validate_against_walk(config: &SimConfig) -> Result<bool> {
    config.validate()?;
    let mut engine = HapticEngine::new(config);
    engine.finish();

    let tti = config.radio.tti;
    let offsets: Vec<Time> = config
        .haptic
        .period_offsets()
        .into_iter()
        .map(|o| tti * o.div_floor(tti))
        .collect();
    let walk = walk_offsets(config.scheme, &config.radio, &config.haptic, &offsets);

    let full_periods = config.effective_horizon().div_floor(config.haptic.t_p) as usize;
    let mut ok = true;
    for (k, got) in engine.periods.iter().enumerate().take(full_periods).skip(1) {
        if got.transmitted != walk.transmitted || got.dropped != walk.dropped {
            log::warn!(
                "{} period {k}: simulator sent {} dropped {}, walk sent {} dropped {}",
                config.scheme,
                got.transmitted,
                got.dropped,
                walk.transmitted,
                walk.dropped
            );
            ok = false;
        }
    }
    Ok(ok)
}
