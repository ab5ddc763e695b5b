//! Traffic models: the periodic bursty haptic source and the compound
//! Poisson leftover source, plus concrete arrival timelines.

use std::io::{BufRead, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{ConfigIssue, Error, Result};
use crate::time::Time;

/// Periodic bursty haptic arrivals.
///
/// Every period `t_p` opens with a burst of length `t_b` in which packets
/// arrive every `t_ib`; the rest of the period carries one packet every `t_nb`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HapticTrafficModel {
    pub t_p: Time,
    pub t_b: Time,
    pub t_ib: Time,
    pub t_nb: Time,
    /// Append one extra burst at the end of generated timelines.
    pub worst_case_excess_burst: bool,
}

impl Default for HapticTrafficModel {
    fn default() -> Self {
        Self {
            t_p: Time::from_millis(1000),
            t_b: Time::from_millis(200),
            t_ib: Time::from_millis(2),
            t_nb: Time::from_millis(50),
            worst_case_excess_burst: true,
        }
    }
}

impl HapticTrafficModel {
    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut issues = Vec::new();
        for (name, v) in [
            ("haptic.t_p", self.t_p),
            ("haptic.t_b", self.t_b),
            ("haptic.t_ib", self.t_ib),
            ("haptic.t_nb", self.t_nb),
        ] {
            if !v.is_positive() {
                issues.push(ConfigIssue::new(name, "must be positive"));
            }
        }
        if self.t_b >= self.t_p {
            issues.push(ConfigIssue::new(
                "haptic.t_b",
                format!(
                    "burst duration t_b = {} must be shorter than period t_p = {}",
                    self.t_b, self.t_p
                ),
            ));
        }
        if self.t_ib > self.t_b {
            issues.push(ConfigIssue::new(
                "haptic.t_ib",
                format!(
                    "burst inter-arrival t_ib = {} exceeds burst duration t_b = {}",
                    self.t_ib, self.t_b
                ),
            ));
        }
        if self.t_b < self.t_p && self.t_nb > self.t_p - self.t_b {
            issues.push(ConfigIssue::new(
                "haptic.t_nb",
                format!(
                    "non-burst inter-arrival t_nb = {} exceeds the non-burst window t_p - t_b = {}",
                    self.t_nb,
                    self.t_p - self.t_b
                ),
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

    /// Arrival offsets within one period, starting at 0, in increasing order.
    ///
    /// The burst carries `floor(t_b / t_ib)` packets and the quiet part
    /// `floor((t_p - t_b) / t_nb)`, so every packet keeps at least its own
    /// inter-arrival gap before the next one, across segment and period
    /// boundaries included.
    pub fn period_offsets(&self) -> Vec<Time> {
        let burst = self.t_b.div_floor(self.t_ib);
        let quiet = (self.t_p - self.t_b).div_floor(self.t_nb);
        (0..burst)
            .map(|k| self.t_ib * k)
            .chain((0..quiet).map(|k| self.t_b + self.t_nb * k))
            .collect()
    }

    pub fn in_burst(&self, offset: Time) -> bool {
        offset < self.t_b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SizeDistribution {
    /// Every packet carries exactly `sigma` bits.
    #[default]
    Deterministic,
    /// Packet sizes are exponential with mean `sigma`.
    ExponentialMean,
}

/// Compound Poisson background traffic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeftoverTrafficModel {
    /// Packets per second.
    pub lambda_rate: f64,
    /// Packet size parameter in bits.
    pub sigma: f64,
    pub size_distribution: SizeDistribution,
}

impl Default for LeftoverTrafficModel {
    fn default() -> Self {
        Self {
            lambda_rate: 4.0,
            sigma: 12_000.0,
            size_distribution: SizeDistribution::Deterministic,
        }
    }
}

impl LeftoverTrafficModel {
    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut issues = Vec::new();
        if !(self.lambda_rate.is_finite() && self.lambda_rate > 0.0) {
            issues.push(ConfigIssue::new("leftover.lambda_rate", "must be positive"));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            issues.push(ConfigIssue::new("leftover.sigma", "must be positive"));
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

    /// Mean offered load in bits per second.
    pub fn mean_rate(&self) -> f64 {
        self.lambda_rate * self.sigma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arrival {
    /// Seconds from the start of the timeline.
    pub time: f64,
    pub size_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalTimeline {
    pub arrivals: Vec<Arrival>,
    /// Seconds.
    pub horizon: f64,
}

impl ArrivalTimeline {
    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrivals.is_empty()
    }

    pub fn total_bits(&self) -> f64 {
        self.arrivals.iter().map(|a| a.size_bits).sum()
    }

    /// Writes `arrival_time_s,size_bits` rows with nine-decimal times.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "arrival_time_s,size_bits")?;
        for a in &self.arrivals {
            writeln!(out, "{:.9},{}", a.time, a.size_bits)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R, horizon: f64) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            what: format!("timeline line {line}"),
            message,
        };
        let mut arrivals = Vec::new();
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            if idx == 0 {
                if line.trim() != "arrival_time_s,size_bits" {
                    return Err(parse_err(lineno, format!("unexpected header {line:?}")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let (t, s) = line
                .split_once(',')
                .ok_or_else(|| parse_err(lineno, "expected two columns".into()))?;
            let time: f64 = t
                .trim()
                .parse()
                .map_err(|e| parse_err(lineno, format!("{e}")))?;
            let size_bits: f64 = s
                .trim()
                .parse()
                .map_err(|e| parse_err(lineno, format!("{e}")))?;
            if let Some(prev) = arrivals.last().map(|a: &Arrival| a.time) {
                if time <= prev {
                    return Err(parse_err(
                        lineno,
                        "arrival times must be strictly increasing".into(),
                    ));
                }
            }
            if size_bits <= 0.0 {
                return Err(parse_err(lineno, "sizes must be positive".into()));
            }
            arrivals.push(Arrival { time, size_bits });
        }
        Ok(Self { arrivals, horizon })
    }
}

/// Haptic arrival instants on `[0, horizon)` as exact times.
pub fn haptic_arrival_times(model: &HapticTrafficModel, horizon: Time) -> Vec<Time> {
    let offsets = model.period_offsets();
    let mut times = Vec::new();
    let mut start = Time::ZERO;
    while start < horizon {
        times.extend(
            offsets
                .iter()
                .map(|&o| start + o)
                .take_while(|&t| t < horizon),
        );
        start += model.t_p;
    }
    if model.worst_case_excess_burst && horizon.is_positive() {
        let burst_start = if horizon > model.t_b {
            horizon - model.t_b
        } else {
            Time::ZERO
        };
        let burst = model.t_b.div_floor(model.t_ib);
        times.extend(
            (0..burst)
                .map(|k| burst_start + model.t_ib * k)
                .filter(|&t| t < horizon),
        );
        times.sort_unstable();
        times.dedup();
    }
    times
}

/// Deterministic haptic timeline; every packet is one symbolic size unit.
pub fn haptic_arrivals(model: &HapticTrafficModel, horizon: Time) -> ArrivalTimeline {
    ArrivalTimeline {
        arrivals: haptic_arrival_times(model, horizon)
            .into_iter()
            .map(|t| Arrival {
                time: t.as_secs_f64(),
                size_bits: 1.0,
            })
            .collect(),
        horizon: horizon.as_secs_f64(),
    }
}

/// Seeded compound Poisson timeline on `[0, horizon]` (seconds).
pub fn leftover_arrivals(model: &LeftoverTrafficModel, horizon: f64, seed: u64) -> ArrivalTimeline {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gaps = Exp::new(model.lambda_rate).expect("lambda_rate must be positive");
    let sizes = Exp::new(1.0 / model.sigma).expect("sigma must be positive");
    let mut arrivals = Vec::new();
    let mut t = 0.0;
    loop {
        t += gaps.sample(&mut rng);
        if t > horizon {
            break;
        }
        let size_bits = match model.size_distribution {
            SizeDistribution::Deterministic => model.sigma,
            SizeDistribution::ExponentialMean => sizes.sample(&mut rng),
        };
        arrivals.push(Arrival { time: t, size_bits });
    }
    ArrivalTimeline { arrivals, horizon }
}

/// Per-period counters of the haptic source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Counters {
    /// Whole periods within the duration.
    pub n_p: i64,
    pub r_b: i64,
    pub r_nb: i64,
    pub r_p: i64,
}

pub fn counters(model: &HapticTrafficModel, duration: Time) -> Counters {
    let n_p = duration.div_floor(model.t_p);
    let r_b = model.t_b.div_floor(model.t_ib);
    let r_nb = (model.t_p - model.t_b).div_floor(model.t_nb);
    Counters {
        n_p,
        r_b,
        r_nb,
        r_p: r_b + r_nb,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_excess() -> HapticTrafficModel {
        HapticTrafficModel {
            worst_case_excess_burst: false,
            ..HapticTrafficModel::default()
        }
    }

    #[test]
    fn one_period_of_reference_traffic() {
        let tl = haptic_arrivals(&no_excess(), Time::from_millis(1000));
        assert_eq!(tl.len(), 116);
        let burst = tl.arrivals.iter().filter(|a| a.time < 0.2).count();
        assert_eq!(burst, 100);
    }

    #[test]
    fn single_point_burst() {
        let m = HapticTrafficModel {
            t_ib: Time::from_millis(200),
            ..no_excess()
        };
        let times = haptic_arrival_times(&m, Time::from_millis(3000));
        let burst: Vec<_> = times
            .iter()
            .filter(|t| t.as_nanos() % m.t_p.as_nanos() < m.t_b.as_nanos())
            .collect();
        assert_eq!(
            burst,
            vec![
                &Time::ZERO,
                &Time::from_millis(1000),
                &Time::from_millis(2000)
            ]
        );
    }

    #[test]
    fn horizon_inside_first_burst() {
        assert_eq!(
            haptic_arrivals(&no_excess(), Time::from_millis(100)).len(),
            50
        );
    }

    #[test]
    fn excess_burst_appended_and_merged() {
        let m = HapticTrafficModel::default();
        let times = haptic_arrival_times(&m, Time::from_millis(1000));
        // 100 extra burst arrivals in [800, 1000) ms; 800, 850, 900, 950 coincide
        assert_eq!(times.len(), 116 + 100 - 4);
        assert!(times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn counters_reference_values() {
        let c = counters(&HapticTrafficModel::default(), Time::from_millis(2500));
        assert_eq!(
            c,
            Counters {
                n_p: 2,
                r_b: 100,
                r_nb: 16,
                r_p: 116
            }
        );
        let c = counters(&HapticTrafficModel::default(), Time::from_millis(999));
        assert_eq!(c.n_p, 0);
        let m = HapticTrafficModel {
            t_ib: Time::from_millis(1),
            ..HapticTrafficModel::default()
        };
        assert_eq!(counters(&m, Time::ZERO).r_b, 200);
    }

    #[test]
    fn validation_names_both_fields() {
        let m = HapticTrafficModel {
            t_b: Time::from_millis(1200),
            ..HapticTrafficModel::default()
        };
        let issues = m.issues();
        let msg = issues
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join("\n");
        assert!(msg.contains("t_b") && msg.contains("t_p"), "{msg}");
    }

    #[test]
    fn poisson_count_near_mean() {
        let model = LeftoverTrafficModel::default();
        for seed in [1, 2, 3] {
            let n = leftover_arrivals(&model, 1000.0, seed).len() as f64;
            assert!(
                (n - 4000.0).abs() <= 5.0 * 4000f64.sqrt(),
                "seed {seed}: {n}"
            );
        }
    }

    #[test]
    fn deterministic_size_rate() {
        let tl = leftover_arrivals(&LeftoverTrafficModel::default(), 20_000.0, 9);
        let rate = tl.total_bits() / tl.horizon;
        assert!((rate - 48_000.0).abs() < 0.03 * 48_000.0, "{rate}");
        assert!(tl.arrivals.iter().all(|a| a.size_bits == 12_000.0));
    }

    #[test]
    fn exponential_sizes_have_mean_sigma() {
        let model = LeftoverTrafficModel {
            size_distribution: SizeDistribution::ExponentialMean,
            ..LeftoverTrafficModel::default()
        };
        let tl = leftover_arrivals(&model, 20_000.0, 4);
        let mean = tl.total_bits() / tl.len() as f64;
        assert!((mean - 12_000.0).abs() < 0.03 * 12_000.0, "{mean}");
    }

    #[test]
    fn zero_horizon_is_empty() {
        assert!(leftover_arrivals(&LeftoverTrafficModel::default(), 0.0, 1).is_empty());
    }

    #[test]
    fn csv_round_trip_preserves_rows() {
        let tl = leftover_arrivals(&LeftoverTrafficModel::default(), 50.0, 11);
        let mut buf = Vec::new();
        tl.write_csv(&mut buf).unwrap();
        let back = ArrivalTimeline::read_csv(buf.as_slice(), tl.horizon).unwrap();
        assert_eq!(back.len(), tl.len());
        for (a, b) in back.arrivals.iter().zip(&tl.arrivals) {
            assert!((a.time - b.time).abs() < 1e-9);
            assert_eq!(a.size_bits, b.size_bits);
        }
    }

    #[test]
    fn csv_rejects_unsorted_rows() {
        let text = "arrival_time_s,size_bits\n0.5,10\n0.4,10\n";
        assert!(ArrivalTimeline::read_csv(text.as_bytes(), 1.0).is_err());
    }
}
