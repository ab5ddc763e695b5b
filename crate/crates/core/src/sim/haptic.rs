//! Slot-level haptic scheduler used by the simulator.
//!
//! Periods are generated lazily and in order, so a long run only keeps the
//! few upcoming transmissions in memory. Slot indices are absolute.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::radio::SchedulingScheme;
use crate::time::Time;

use super::SimConfig;

/// Haptic outcome of the packets that arrived in one traffic period.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PeriodCounts {
    pub arrivals: u64,
    pub transmitted: u64,
    pub dropped: u64,
}

struct Pending {
    slot: i64,
    arrival: Time,
    grant: i64,
    period: usize,
}

pub(crate) struct HapticEngine {
    scheme: SchedulingScheme,
    tti: Time,
    t_p: Time,
    horizon: Time,
    slots_per_period: i64,
    burst_slots: i64,
    grant_slots: i64,
    sr_slots: i64,
    offsets: Vec<Time>,
    burst_len: Time,
    next_period: i64,
    idle_from: i64,
    pending: Option<Pending>,
    tx: BinaryHeap<Reverse<i64>>,
    current: (i64, u32),
    pub periods: Vec<PeriodCounts>,
    /// Access delays (seconds) of transmitted packets after the first period.
    pub delays: Vec<f64>,
    /// Transmissions in slots `[slots_per_period, horizon)`.
    pub occupied_after_warmup: u64,
    pub occupied_total: u64,
    pub max_tx_per_slot: u32,
}

/// Read, process, transmit, decode after a grant.
const GRANTED_DONE: i64 = 4;
const GRANTED_TX: i64 = 2;

impl HapticEngine {
    pub(crate) fn new(config: &SimConfig) -> Self {
        let tti = config.radio.tti;
        let h = &config.haptic;
        Self {
            scheme: config.scheme,
            tti,
            t_p: h.t_p,
            horizon: config.effective_horizon(),
            slots_per_period: h.t_p.div_floor(tti),
            burst_slots: h.t_b.div_floor(tti),
            grant_slots: config.radio.t_pg.div_floor(tti),
            sr_slots: config.radio.t_sr.div_floor(tti),
            offsets: h.period_offsets(),
            burst_len: h.t_b,
            next_period: 0,
            idle_from: i64::MIN,
            pending: None,
            tx: BinaryHeap::new(),
            current: (i64::MIN, 0),
            periods: Vec::new(),
            delays: Vec::new(),
            occupied_after_warmup: 0,
            occupied_total: 0,
            max_tx_per_slot: 0,
        }
    }

    fn horizon_slots(&self) -> i64 {
        self.horizon.div_floor(self.tti)
    }

    fn record_tx(&mut self, arrival: Time, period: usize, done_slot: i64) {
        let counts = &mut self.periods[period];
        counts.transmitted += 1;
        if period >= 1 {
            self.delays
                .push((self.tti * done_slot - arrival).as_secs_f64());
        }
    }

    fn send_pending(&mut self, p: Pending) {
        debug_assert!(p.grant > p.slot);
        self.record_tx(p.arrival, p.period, p.grant + GRANTED_DONE);
    }

    fn generate_period(&mut self) {
        let k = self.next_period;
        self.next_period += 1;
        let start = self.t_p * k;
        let base = k * self.slots_per_period;
        let period = k as usize;
        self.periods.push(PeriodCounts::default());

        // reserved grants occupy their slot whether used or not
        match self.scheme {
            SchedulingScheme::SemiPersistent => {
                let first =
                    (base + self.grant_slots - 1).div_euclid(self.grant_slots) * self.grant_slots;
                let mut g = first;
                while g < base + self.slots_per_period {
                    self.tx.push(Reverse(g + GRANTED_TX));
                    g += self.grant_slots;
                }
            }
            SchedulingScheme::SoftResourceReservation => {
                let n = (self.burst_slots + self.grant_slots - 1) / self.grant_slots;
                for j in 1..=n {
                    self.tx
                        .push(Reverse(base + j * self.grant_slots + GRANTED_TX));
                }
            }
            _ => {}
        }

        for idx in 0..self.offsets.len() {
            let offset = self.offsets[idx];
            let arrival = start + offset;
            if arrival >= self.horizon {
                break;
            }
            self.periods[period].arrivals += 1;
            let slot = arrival.div_floor(self.tti);
            let in_burst = offset < self.burst_len;
            let granted = match self.scheme {
                SchedulingScheme::SemiPersistent => true,
                SchedulingScheme::SoftResourceReservation => in_burst,
                _ => false,
            };
            if granted {
                let grant = if self.scheme == SchedulingScheme::SemiPersistent {
                    (slot.div_euclid(self.grant_slots) + 1) * self.grant_slots
                } else {
                    base + ((slot - base).div_euclid(self.grant_slots) + 1) * self.grant_slots
                };
                if let Some(p) = self.pending.take() {
                    if p.grant == grant {
                        self.periods[p.period].dropped += 1;
                    } else {
                        self.send_pending(p);
                    }
                }
                self.pending = Some(Pending {
                    slot,
                    arrival,
                    grant,
                    period,
                });
                continue;
            }
            if slot < self.idle_from {
                self.periods[period].dropped += 1;
                continue;
            }
            let (idle_from, tx_slot, done_slot) = if self.scheme == SchedulingScheme::FastUplink {
                (slot + 1, slot + 2, slot + 4)
            } else {
                // next SR opportunity after the arrival slot, then SR tx,
                // eNB processing, grant tx, UE processing, data tx, decode
                let sr = (slot + 1 + self.sr_slots - 1).div_euclid(self.sr_slots) * self.sr_slots;
                (sr + 3, sr + 4, sr + 6)
            };
            self.idle_from = idle_from;
            self.tx.push(Reverse(tx_slot));
            self.record_tx(arrival, period, done_slot);
        }

        // no later arrival can share a grant at or before the next period start
        let next_base = base + self.slots_per_period;
        if self.pending.as_ref().is_some_and(|p| p.grant <= next_base) {
            let p = self.pending.take().expect("checked above");
            self.send_pending(p);
        }
    }

    fn more_periods(&self) -> bool {
        self.t_p * self.next_period < self.horizon
    }

    fn pop_until(&mut self, slot: i64) {
        let limit = self.horizon_slots();
        while let Some(&Reverse(s)) = self.tx.peek() {
            if s >= slot {
                break;
            }
            self.tx.pop();
            if s >= limit {
                continue;
            }
            if s == self.current.0 {
                self.current.1 += 1;
            } else {
                self.current = (s, 1);
            }
            self.max_tx_per_slot = self.max_tx_per_slot.max(self.current.1);
            self.occupied_total += 1;
            if s >= self.slots_per_period {
                self.occupied_after_warmup += 1;
            }
        }
    }

    /// Haptic transmissions in `slot`. Queries must be non-decreasing.
    pub(crate) fn transmissions_in(&mut self, slot: i64) -> u32 {
        while self.more_periods() && self.next_period * self.slots_per_period <= slot {
            self.generate_period();
        }
        self.pop_until(slot + 1);
        if self.current.0 == slot {
            self.current.1
        } else {
            0
        }
    }

    /// Generates the remaining periods and flushes the last pending packet.
    pub(crate) fn finish(&mut self) {
        while self.more_periods() {
            self.generate_period();
        }
        if let Some(p) = self.pending.take() {
            self.send_pending(p);
        }
        self.pop_until(i64::MAX);
    }
}
