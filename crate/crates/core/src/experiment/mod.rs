//! Experiment orchestration: expands a config into a grid of points, runs
//! them in parallel and writes one CSV row per point in grid order.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::{drop_walk, remainder_of_service, DropReport};
use crate::error::{ConfigIssue, Error, Result};
use crate::radio::{RadioConfig, SchedulingScheme};
use crate::sim::{self, SimConfig, SimReport};
use crate::snc::{delay_bound_with, DelayBound, OutageConvention};
use crate::time::Time;
use crate::traffic::{HapticTrafficModel, LeftoverTrafficModel};

pub use config::{
    build_axis, load_config, parse_config, ExperimentConfig, SweepAxis, SweepParam, TimeSetting,
    DEFAULT_EPSILON, DEFAULT_HORIZON,
};

/// Outage probabilities checked in `compare` mode; small enough tails are
/// not statistically checkable at desk scale.
pub const COMPARE_EPSILONS: [f64; 2] = [1e-1, 1e-2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    Bound,
    Drop,
    Remainder,
    Simulate,
    Sweep,
    Compare,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bound" => Mode::Bound,
            "drop" => Mode::Drop,
            "remainder" => Mode::Remainder,
            "simulate" => Mode::Simulate,
            "sweep" => Mode::Sweep,
            "compare" => Mode::Compare,
            other => return Err(Error::config("mode", format!("unknown mode {other:?}"))),
        })
    }
}

impl Mode {
    fn uses_seeds(self) -> bool {
        matches!(self, Mode::Simulate | Mode::Compare)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub config: ExperimentConfig,
    /// Output file; standard output when absent.
    pub out: Option<PathBuf>,
}

/// Fully resolved parameters of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Point {
    pub scheme: SchedulingScheme,
    pub radio: RadioConfig,
    pub haptic: HapticTrafficModel,
    pub leftover: LeftoverTrafficModel,
    pub epsilon: f64,
    pub convention: OutageConvention,
    pub horizon: Time,
    pub seed: Option<u64>,
}

impl Point {
    /// Short SHA-256 digest of the point's JSON form.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("points serialize");
        Sha256::digest(&json)
            .iter()
            .take(8)
            .fold(String::new(), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            })
    }

    fn sim_config(&self) -> SimConfig {
        SimConfig {
            radio: self.radio,
            haptic: self.haptic,
            leftover: self.leftover,
            scheme: self.scheme,
            horizon: self.horizon,
            seed: self.seed.unwrap_or(0),
        }
    }

    fn issues(&self, mode: Mode) -> Vec<ConfigIssue> {
        if mode.uses_seeds() {
            self.sim_config().issues()
        } else {
            let mut v = self.radio.issues();
            v.extend(self.haptic.issues());
            v
        }
    }
}

/// Expands schemes x sweep values x seeds, in that nesting order.
pub fn grid(spec: &ExperimentSpec) -> Vec<Point> {
    let cfg = &spec.config;
    let values: Vec<Option<Time>> = match &cfg.sweep {
        Some(axis) => axis.values.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let seeds: Vec<Option<u64>> = if spec.mode.uses_seeds() {
        cfg.seeds.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let mut points = Vec::new();
    for &scheme in &cfg.schemes {
        for value in &values {
            let mut radio = cfg.base_radio();
            let mut haptic = cfg.haptic;
            match (cfg.sweep.as_ref().map(|a| a.param), value) {
                (Some(SweepParam::TIb), Some(v)) => haptic.t_ib = *v,
                (Some(SweepParam::Tti), Some(v)) => radio = cfg.radio_at(*v),
                _ => {}
            }
            for &seed in &seeds {
                points.push(Point {
                    scheme,
                    radio,
                    haptic,
                    leftover: cfg.leftover,
                    epsilon: cfg.epsilon,
                    convention: cfg.convention,
                    horizon: cfg.horizon,
                    seed,
                });
            }
        }
    }
    points
}

/// Rendered experiment output.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub rows: usize,
    pub infeasible: usize,
    pub comparison_failures: usize,
}

impl Outcome {
    /// 0 on success, 2 when a comparison failed.
    pub fn exit_code(&self) -> i32 {
        if self.comparison_failures > 0 {
            2
        } else {
            0
        }
    }
}

/// Stability failures become `infeasible` rows instead of aborting.
fn is_infeasible(e: &Error) -> bool {
    matches!(
        e,
        Error::Infeasible { .. } | Error::Saturated(_) | Error::Unstable { .. }
    )
}

struct Row {
    cells: String,
    status: &'static str,
    failed: bool,
}

impl Row {
    fn ok(cells: String) -> Self {
        Self {
            cells,
            status: "ok",
            failed: false,
        }
    }

    fn infeasible(cells: String) -> Self {
        Self {
            cells,
            status: "infeasible",
            failed: false,
        }
    }
}

fn header(mode: Mode) -> String {
    let cols = match mode {
        Mode::Bound => DelayBound::CSV_HEADER,
        Mode::Drop => DropReport::CSV_HEADER,
        Mode::Remainder => "scheme,tti_s,t_ib_s,remainder_bits",
        Mode::Simulate => SimReport::CSV_HEADER,
        Mode::Sweep => "scheme,tti_s,t_ib_s,drop_rate,remainder_bits,epsilon,d0_s",
        Mode::Compare => {
            "scheme,tti_s,t_ib_s,seed,epsilon,sim_quantile_s,bound_s,sim_drop_rate,walk_drop_rate,pass"
        }
    };
    format!("{cols},status,config_hash")
}

fn axes(p: &Point) -> String {
    format!(
        "{},{},{}",
        p.scheme,
        p.radio.tti.fmt_secs(),
        p.haptic.t_ib.fmt_secs()
    )
}

fn bound_of(p: &Point, epsilon: f64) -> Result<DelayBound> {
    delay_bound_with(
        p.scheme,
        &p.radio,
        &p.haptic,
        &p.leftover,
        epsilon,
        p.convention,
    )
}

fn evaluate(mode: Mode, p: &Point) -> Result<Vec<Row>> {
    let rows = match mode {
        Mode::Bound => match bound_of(p, p.epsilon) {
            Ok(b) => vec![Row::ok(b.csv_row(&p.radio, &p.haptic))],
            Err(e) if is_infeasible(&e) => {
                vec![Row::infeasible(format!("{},{:e},,,,", axes(p), p.epsilon))]
            }
            Err(e) => return Err(e),
        },
        Mode::Drop => vec![Row::ok(
            drop_walk(p.scheme, &p.radio, &p.haptic).csv_row(&p.radio, &p.haptic),
        )],
        Mode::Remainder => {
            let r = remainder_of_service(p.scheme, &p.radio, &p.haptic)?;
            vec![Row::ok(format!("{},{r:.3}", axes(p)))]
        }
        Mode::Simulate => match sim::run(&p.sim_config()) {
            Ok(report) => vec![Row::ok(report.csv_row())],
            Err(e) if is_infeasible(&e) => vec![Row::infeasible(format!(
                "{},{},,,,",
                axes(p),
                p.seed.unwrap_or(0)
            ))],
            Err(e) => return Err(e),
        },
        Mode::Sweep => {
            let walk = drop_walk(p.scheme, &p.radio, &p.haptic);
            let remainder = remainder_of_service(p.scheme, &p.radio, &p.haptic)?;
            let lead = format!(
                "{},{:.9},{remainder:.3},{:e}",
                axes(p),
                walk.drop_rate,
                p.epsilon
            );
            match bound_of(p, p.epsilon) {
                Ok(b) => vec![Row::ok(format!("{lead},{:.9}", b.d0))],
                Err(e) if is_infeasible(&e) => vec![Row::infeasible(format!("{lead},"))],
                Err(e) => return Err(e),
            }
        }
        Mode::Compare => compare(p)?,
    };
    Ok(rows)
}

fn compare(p: &Point) -> Result<Vec<Row>> {
    let cfg = p.sim_config();
    let seed = cfg.seed;
    let walk = drop_walk(p.scheme, &p.radio, &p.haptic);
    let report = match sim::run(&cfg) {
        Ok(r) => r,
        Err(e) if is_infeasible(&e) => {
            return Ok(COMPARE_EPSILONS
                .iter()
                .map(|eps| {
                    Row::infeasible(format!(
                        "{},{seed},{eps:e},,,,{:.9},",
                        axes(p),
                        walk.drop_rate
                    ))
                })
                .collect())
        }
        Err(e) => return Err(e),
    };
    let walk_match = sim::validate_against_walk(&cfg)?;
    let mut rows = Vec::new();
    for eps in COMPARE_EPSILONS {
        let quantile = report.leftover_quantile(1.0 - eps)?;
        let lead = format!("{},{seed},{eps:e}", axes(p));
        match bound_of(p, eps) {
            Ok(b) => {
                let pass = quantile <= b.d0 && walk_match;
                rows.push(Row {
                    cells: format!(
                        "{lead},{quantile:.9},{:.9},{:.9},{:.9},{pass}",
                        b.d0, report.haptic_drop_rate, walk.drop_rate
                    ),
                    status: "ok",
                    failed: !pass,
                });
            }
            Err(e) if is_infeasible(&e) => rows.push(Row::infeasible(format!(
                "{lead},{quantile:.9},,{:.9},{:.9},",
                report.haptic_drop_rate, walk.drop_rate
            ))),
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

/// Checks every grid point before anything runs.
pub fn validate_spec(spec: &ExperimentSpec) -> Result<Vec<Point>> {
    spec.config.validate()?;
    if spec.mode == Mode::Sweep && spec.config.sweep.is_none() {
        return Err(Error::config(
            "experiment.param",
            "sweep mode needs a sweep axis",
        ));
    }
    let points = grid(spec);
    let mut issues: Vec<ConfigIssue> = Vec::new();
    for p in &points {
        for issue in p.issues(spec.mode) {
            if !issues.contains(&issue) {
                issues.push(issue);
            }
        }
    }
    if issues.is_empty() {
        Ok(points)
    } else {
        Err(Error::Config(issues))
    }
}

/// Runs the grid and renders the CSV without writing it anywhere.
pub fn render(spec: &ExperimentSpec) -> Result<Outcome> {
    let points = validate_spec(spec)?;
    let mode = spec.mode;
    let results = with_workers(spec.config.workers, || {
        points
            .par_iter()
            .map(|p| evaluate(mode, p))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut text = String::new();
    if mode == Mode::Compare {
        let _ = writeln!(
            text,
            "# compare: simulated (1-epsilon) leftover delay quantile vs analytic bound at epsilon in {{{}}}, \
             plus simulated vs walk haptic drops",
            COMPARE_EPSILONS.map(|e| e.to_string()).join(", ")
        );
    }
    text.push_str(&header(mode));
    text.push('\n');
    let mut outcome = Outcome {
        text: String::new(),
        rows: 0,
        infeasible: 0,
        comparison_failures: 0,
    };
    for (p, rows) in points.iter().zip(results) {
        let hash = p.config_hash();
        for row in rows {
            let _ = writeln!(text, "{},{},{hash}", row.cells, row.status);
            outcome.rows += 1;
            outcome.infeasible += usize::from(row.status == "infeasible");
            outcome.comparison_failures += usize::from(row.failed);
        }
    }
    outcome.text = text;
    Ok(outcome)
}

/// Runs the experiment and writes the output file, or standard output.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Outcome> {
    let outcome = render(spec)?;
    match &spec.out {
        Some(path) => fs::write(path, &outcome.text)?,
        None => std::io::stdout()
            .lock()
            .write_all(outcome.text.as_bytes())?,
    }
    Ok(outcome)
}

/// Full simulation reports for each grid point, for JSON output.
pub fn simulate_reports(spec: &ExperimentSpec) -> Result<Vec<SimReport>> {
    let points = validate_spec(spec)?;
    with_workers(spec.config.workers, || {
        points
            .par_iter()
            .map(|p| sim::run(&p.sim_config()))
            .collect()
    })
}

fn with_workers<T: Send>(
    workers: Option<usize>,
    job: impl FnOnce() -> Result<T> + Send,
) -> Result<T> {
    match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config("experiment.workers", e.to_string()))?
            .install(job),
        None => job(),
    }
}
