use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use haptic_uplink::experiment::{
    build_axis, load_config, parse_config, run_experiment, simulate_reports, ExperimentSpec, Mode,
    SweepParam,
};
use haptic_uplink::{Error, Result, Time};

#[derive(Parser)]
#[command(
    version,
    about = "Haptic uplink scheduling: drop rates, leftover service and delay bounds"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Leftover delay bound per scheme
    Bound(Common),
    /// Haptic drop accounting over one traffic period
    Drop(Common),
    /// Capacity left for background traffic per period
    Remainder(Common),
    /// Slot-level simulation (CSV summary, or full JSON when --out ends in .json)
    Simulate(Common),
    /// Drop rate, remainder and bound over a parameter range
    Sweep(Common),
    /// Simulated quantiles and drops against the analytic results
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config; reference defaults when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated schemes: DS, SPS, SRR, FA
    #[arg(long, value_delimiter = ',')]
    scheme: Option<Vec<String>>,
    /// Comma-separated simulation seeds
    #[arg(long, value_delimiter = ',')]
    seed: Option<Vec<u64>>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Swept parameter: t_ib or tti
    #[arg(long)]
    param: Option<String>,
    #[arg(long)]
    from: Option<Time>,
    #[arg(long)]
    to: Option<Time>,
    #[arg(long)]
    steps: Option<i64>,
    /// Explicit comma-separated sweep values, e.g. 0.125ms,0.25ms
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<Time>>,
    /// Simulation horizon, e.g. 100s
    #[arg(long)]
    horizon: Option<Time>,
    /// Worker threads for grid points
    #[arg(long)]
    workers: Option<usize>,
}

fn build_spec(mode: Mode, args: Common) -> Result<ExperimentSpec> {
    let mut config = match &args.config {
        Some(path) => load_config(path)?,
        None => parse_config("")?,
    };
    if let Some(list) = args.scheme {
        config.schemes = list
            .iter()
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.parse())
            .collect::<Result<_>>()?;
    }
    if let Some(seeds) = args.seed {
        config.seeds = seeds;
    }
    if let Some(eps) = args.epsilon {
        config.epsilon = eps;
    }
    if let Some(h) = args.horizon {
        config.horizon = h;
    }
    if args.workers.is_some() {
        config.workers = args.workers;
    }
    if let Some(param) = args.param {
        let param: SweepParam = param
            .parse()
            .map_err(|m: String| Error::config("--param", m))?;
        config.sweep = Some(build_axis(
            param,
            args.from,
            args.to,
            args.steps,
            args.values,
        )?);
    } else if args.from.is_some()
        || args.to.is_some()
        || args.steps.is_some()
        || args.values.is_some()
    {
        return Err(Error::config(
            "--param",
            "a sweep range needs --param t_ib or --param tti",
        ));
    }
    config.validate()?;
    Ok(ExperimentSpec {
        mode,
        config,
        out: args.out,
    })
}

fn execute(mode: Mode, args: Common) -> Result<i32> {
    let spec = build_spec(mode, args)?;
    let c = &spec.config;
    eprintln!("total rate C = {} b/s", c.radio.total_rate);
    for key in &c.defaulted {
        eprintln!("note: {key} not set; using the documented default");
    }
    let json_out = spec
        .out
        .as_ref()
        .is_some_and(|p| p.extension().is_some_and(|e| e == "json"));
    if mode == Mode::Simulate && json_out {
        let reports = simulate_reports(&spec)?;
        let path = spec.out.as_ref().expect("checked above");
        std::fs::write(path, serde_json::to_string_pretty(&reports)?)?;
        return Ok(0);
    }
    let outcome = run_experiment(&spec)?;
    if outcome.infeasible > 0 {
        eprintln!(
            "{} of {} rows are infeasible",
            outcome.infeasible, outcome.rows
        );
    }
    if outcome.comparison_failures > 0 {
        eprintln!("{} comparison(s) failed", outcome.comparison_failures);
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (mode, args) = match cli.verb {
        Verb::Bound(a) => (Mode::Bound, a),
        Verb::Drop(a) => (Mode::Drop, a),
        Verb::Remainder(a) => (Mode::Remainder, a),
        Verb::Simulate(a) => (Mode::Simulate, a),
        Verb::Sweep(a) => (Mode::Sweep, a),
        Verb::Compare(a) => (Mode::Compare, a),
    };
    match execute(mode, args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
