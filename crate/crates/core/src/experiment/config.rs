//! TOML experiment configuration with sections `radio`, `haptic`,
//! `leftover`, `snc` and `experiment`. Omitted keys take the reference
//! defaults; every problem found is reported with its field path.

use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use toml::{Table, Value};

use crate::error::{ConfigIssue, Error, Result};
use crate::radio::{RadioConfig, SchedulingScheme};
use crate::snc::OutageConvention;
use crate::time::Time;
use crate::traffic::{HapticTrafficModel, LeftoverTrafficModel, SizeDistribution};

pub const DEFAULT_EPSILON: f64 = 1e-5;
pub const DEFAULT_HORIZON: Time = Time::from_millis(100_000);

/// A time that is either absolute or a multiple of the TTI, so that
/// `t_sr` and `t_pg` follow the TTI in a TTI sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TimeSetting {
    Fixed(Time),
    Ttis(i64),
}

impl TimeSetting {
    pub fn resolve(self, tti: Time) -> Time {
        match self {
            TimeSetting::Fixed(t) => t,
            TimeSetting::Ttis(k) => tti * k,
        }
    }
}

impl FromStr for TimeSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(k) = s.trim().strip_suffix("tti") {
            let k = k.trim();
            let k = if k.is_empty() {
                Ok(1)
            } else {
                k.parse::<i64>()
            };
            return k
                .ok()
                .filter(|&k| k > 0)
                .map(TimeSetting::Ttis)
                .ok_or_else(|| format!("{s:?} is not a positive whole number of TTIs"));
        }
        s.parse::<Time>()
            .map(TimeSetting::Fixed)
            .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepParam {
    TIb,
    Tti,
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "t_ib" => Ok(SweepParam::TIb),
            "tti" => Ok(SweepParam::Tti),
            other => Err(format!(
                "unknown sweep parameter {other:?} (expected t_ib or tti)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<Time>,
}

impl SweepAxis {
    /// Closed, linearly spaced grid with `steps` points.
    pub fn linear(param: SweepParam, from: Time, to: Time, steps: usize) -> Result<Self> {
        let mut issues = Vec::new();
        if !from.is_positive() {
            issues.push(ConfigIssue::new("experiment.from", "must be positive"));
        }
        if to <= from {
            issues.push(ConfigIssue::new(
                "experiment.to",
                format!("must exceed from ({from})"),
            ));
        }
        if steps < 2 {
            issues.push(ConfigIssue::new(
                "experiment.steps",
                "a sweep needs at least 2 steps",
            ));
        }
        if !issues.is_empty() {
            return Err(Error::Config(issues));
        }
        let (a, b) = (i128::from(from.as_nanos()), i128::from(to.as_nanos()));
        let last = (steps - 1) as i128;
        let values = (0..steps as i128)
            .map(|i| {
                let num = (b - a) * i;
                Time::from_nanos((a + (num + last / 2).div_euclid(last)) as i64)
            })
            .collect();
        Ok(Self { param, values })
    }

    pub fn explicit(param: SweepParam, values: Vec<Time>) -> Result<Self> {
        let mut issues = Vec::new();
        if values.is_empty() {
            issues.push(ConfigIssue::new(
                "experiment.values",
                "must list at least one value",
            ));
        }
        if values.iter().any(|v| !v.is_positive()) {
            issues.push(ConfigIssue::new(
                "experiment.values",
                "every value must be positive",
            ));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            issues.push(ConfigIssue::new(
                "experiment.values",
                "values must be strictly increasing",
            ));
        }
        if issues.is_empty() {
            Ok(Self { param, values })
        } else {
            Err(Error::Config(issues))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// Radio parameters; `t_sr` and `t_pg` are re-resolved per TTI.
    pub radio: RadioConfig,
    pub t_sr: TimeSetting,
    pub t_pg: TimeSetting,
    pub haptic: HapticTrafficModel,
    pub leftover: LeftoverTrafficModel,
    pub epsilon: f64,
    pub convention: OutageConvention,
    pub schemes: Vec<SchedulingScheme>,
    pub seeds: Vec<u64>,
    pub horizon: Time,
    pub sweep: Option<SweepAxis>,
    pub workers: Option<usize>,
    /// Keys with documented defaults that the file did not set.
    #[serde(skip)]
    pub defaulted: Vec<&'static str>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            radio: RadioConfig::default(),
            t_sr: TimeSetting::Ttis(1),
            t_pg: TimeSetting::Ttis(10),
            haptic: HapticTrafficModel::default(),
            leftover: LeftoverTrafficModel::default(),
            epsilon: DEFAULT_EPSILON,
            convention: OutageConvention::Violation,
            schemes: SchedulingScheme::ALL.to_vec(),
            seeds: vec![1],
            horizon: DEFAULT_HORIZON,
            sweep: None,
            workers: None,
            defaulted: vec!["radio.total_rate", "radio.haptic_demand_norm"],
        }
    }
}

impl ExperimentConfig {
    /// Radio parameters at a given TTI.
    pub fn radio_at(&self, tti: Time) -> RadioConfig {
        RadioConfig {
            tti,
            t_sr: self.t_sr.resolve(tti),
            t_pg: self.t_pg.resolve(tti),
            ..self.radio
        }
    }

    /// Radio parameters at the configured TTI.
    pub fn base_radio(&self) -> RadioConfig {
        self.radio_at(self.radio.tti)
    }

    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut issues = self.base_radio().issues();
        issues.extend(self.haptic.issues());
        issues.extend(self.leftover.issues());
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            issues.push(ConfigIssue::new(
                "snc.epsilon",
                "must lie strictly between 0 and 1",
            ));
        }
        if self.schemes.is_empty() {
            issues.push(ConfigIssue::new(
                "experiment.schemes",
                "at least one scheme is required",
            ));
        }
        if self.seeds.is_empty() {
            issues.push(ConfigIssue::new(
                "experiment.seeds",
                "at least one seed is required",
            ));
        }
        if self.workers == Some(0) {
            issues.push(ConfigIssue::new("experiment.workers", "must be at least 1"));
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

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        what: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

/// Parses config text; an empty document yields the defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
        what: "config".to_string(),
        message: e.to_string().trim_end().to_string(),
    })?;
    let mut reader = Reader::default();
    let mut cfg = ExperimentConfig::default();

    for (key, value) in &table {
        match (key.as_str(), value) {
            ("radio" | "haptic" | "leftover" | "snc" | "experiment", Value::Table(_)) => {}
            (k, _) => reader.issue(
                k,
                "unknown section (expected radio, haptic, leftover, snc or experiment)",
            ),
        }
    }
    let empty = Table::new();
    let section = |name: &str| match table.get(name) {
        Some(Value::Table(t)) => t,
        _ => &empty,
    };

    let radio = section("radio");
    reader.known(
        "radio",
        radio,
        &[
            "n_channels",
            "total_rate",
            "tti",
            "t_sr",
            "t_pg",
            "haptic_demand_norm",
        ],
    );
    if let Some(v) = reader.integer("radio", radio, "n_channels") {
        match u32::try_from(v) {
            Ok(n) => cfg.radio.n_channels = n,
            Err(_) => reader.issue("radio.n_channels", "out of range"),
        }
    }
    if let Some(v) = reader.float("radio", radio, "total_rate") {
        cfg.radio.total_rate = v;
        cfg.defaulted.retain(|k| *k != "radio.total_rate");
    }
    if let Some(v) = reader.time("radio", radio, "tti") {
        cfg.radio.tti = v;
    }
    if let Some(v) = reader.setting("radio", radio, "t_sr") {
        cfg.t_sr = v;
    }
    if let Some(v) = reader.setting("radio", radio, "t_pg") {
        cfg.t_pg = v;
    }
    if let Some(v) = reader.time("radio", radio, "haptic_demand_norm") {
        cfg.radio.haptic_demand_norm = v;
        cfg.defaulted.retain(|k| *k != "radio.haptic_demand_norm");
    }

    let haptic = section("haptic");
    reader.known(
        "haptic",
        haptic,
        &["t_p", "t_b", "t_ib", "t_nb", "worst_case_excess_burst"],
    );
    for (key, slot) in [
        ("t_p", &mut cfg.haptic.t_p),
        ("t_b", &mut cfg.haptic.t_b),
        ("t_ib", &mut cfg.haptic.t_ib),
        ("t_nb", &mut cfg.haptic.t_nb),
    ] {
        if let Some(v) = reader.time("haptic", haptic, key) {
            *slot = v;
        }
    }
    if let Some(v) = reader.boolean("haptic", haptic, "worst_case_excess_burst") {
        cfg.haptic.worst_case_excess_burst = v;
    }

    let leftover = section("leftover");
    reader.known(
        "leftover",
        leftover,
        &["lambda_rate", "sigma", "size_distribution"],
    );
    if let Some(v) = reader.float("leftover", leftover, "lambda_rate") {
        cfg.leftover.lambda_rate = v;
    }
    if let Some(v) = reader.bits("leftover", leftover, "sigma") {
        cfg.leftover.sigma = v;
    }
    if let Some(s) = reader.string("leftover", leftover, "size_distribution") {
        match s.as_str() {
            "deterministic" => cfg.leftover.size_distribution = SizeDistribution::Deterministic,
            "exponential" => cfg.leftover.size_distribution = SizeDistribution::ExponentialMean,
            other => reader.issue(
                "leftover.size_distribution",
                format!("unknown law {other:?} (expected deterministic or exponential)"),
            ),
        }
    }

    let snc = section("snc");
    reader.known("snc", snc, &["epsilon", "outage_convention"]);
    if let Some(v) = reader.float("snc", snc, "epsilon") {
        cfg.epsilon = v;
    }
    if let Some(s) = reader.string("snc", snc, "outage_convention") {
        match s.parse() {
            Ok(c) => cfg.convention = c,
            Err(Error::Config(mut v)) => reader.issues.append(&mut v),
            Err(e) => reader.issue("snc.outage_convention", e.to_string()),
        }
    }

    let exp = section("experiment");
    reader.known(
        "experiment",
        exp,
        &[
            "schemes", "seeds", "horizon", "workers", "param", "from", "to", "steps", "values",
        ],
    );
    if let Some(list) = reader.array("experiment", exp, "schemes") {
        let mut schemes = Vec::new();
        for v in list {
            match v.as_str().map(str::parse::<SchedulingScheme>) {
                Some(Ok(s)) => schemes.push(s),
                _ => reader.issue("experiment.schemes", format!("unknown scheme {v}")),
            }
        }
        cfg.schemes = schemes;
    }
    if let Some(list) = reader.array("experiment", exp, "seeds") {
        let mut seeds = Vec::new();
        for v in list {
            match v.as_integer().and_then(|i| u64::try_from(i).ok()) {
                Some(s) => seeds.push(s),
                None => reader.issue(
                    "experiment.seeds",
                    format!("{v} is not a non-negative integer"),
                ),
            }
        }
        cfg.seeds = seeds;
    }
    if let Some(v) = reader.time("experiment", exp, "horizon") {
        cfg.horizon = v;
    }
    if let Some(v) = reader.integer("experiment", exp, "workers") {
        match usize::try_from(v) {
            Ok(w) => cfg.workers = Some(w),
            Err(_) => reader.issue("experiment.workers", "must be at least 1"),
        }
    }
    let param = reader.string("experiment", exp, "param");
    let from = reader.time("experiment", exp, "from");
    let to = reader.time("experiment", exp, "to");
    let steps = reader.integer("experiment", exp, "steps");
    let values = reader.array("experiment", exp, "values").map(|list| {
        list.iter()
            .filter_map(|v| match time_of(v) {
                Ok(t) => Some(t),
                Err(msg) => {
                    reader.issue("experiment.values", msg);
                    None
                }
            })
            .collect::<Vec<_>>()
    });
    if let Some(param) = param {
        match param.parse::<SweepParam>() {
            Ok(param) => match build_axis(param, from, to, steps, values) {
                Ok(axis) => cfg.sweep = Some(axis),
                Err(Error::Config(mut v)) => reader.issues.append(&mut v),
                Err(e) => reader.issue("experiment", e.to_string()),
            },
            Err(msg) => reader.issue("experiment.param", msg),
        }
    } else if from.is_some() || to.is_some() || steps.is_some() || values.is_some() {
        reader.issue(
            "experiment.param",
            "a sweep range needs param = \"t_ib\" or \"tti\"",
        );
    }

    let mut issues = reader.issues;
    if issues.is_empty() {
        issues = cfg.issues();
    }
    if issues.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(issues))
    }
}

/// Sweep axis from either a `from/to/steps` range or an explicit list.
pub fn build_axis(
    param: SweepParam,
    from: Option<Time>,
    to: Option<Time>,
    steps: Option<i64>,
    values: Option<Vec<Time>>,
) -> Result<SweepAxis> {
    if let Some(values) = values {
        if from.is_some() || to.is_some() || steps.is_some() {
            return Err(Error::config(
                "experiment.values",
                "give either values or from/to/steps, not both",
            ));
        }
        return SweepAxis::explicit(param, values);
    }
    let mut missing = Vec::new();
    for (name, absent) in [
        ("from", from.is_none()),
        ("to", to.is_none()),
        ("steps", steps.is_none()),
    ] {
        if absent {
            missing.push(ConfigIssue::new(
                format!("experiment.{name}"),
                "required for a ranged sweep",
            ));
        }
    }
    if !missing.is_empty() {
        return Err(Error::Config(missing));
    }
    let steps = usize::try_from(steps.unwrap_or(0)).unwrap_or(0);
    SweepAxis::linear(
        param,
        from.unwrap_or(Time::ZERO),
        to.unwrap_or(Time::ZERO),
        steps,
    )
}

fn time_of(v: &Value) -> Result<Time, String> {
    match v {
        Value::String(s) => s.parse::<Time>().map_err(|e| e.to_string()),
        Value::Float(f) => Ok(Time::from_secs_f64(*f)),
        Value::Integer(i) => Ok(Time::from_secs_f64(*i as f64)),
        other => Err(format!("expected a time, found {}", other.type_str())),
    }
}

#[derive(Default)]
struct Reader {
    issues: Vec<ConfigIssue>,
}

impl Reader {
    fn issue(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.issues.push(ConfigIssue::new(field, message));
    }

    fn known(&mut self, section: &str, table: &Table, keys: &[&str]) {
        for key in table.keys() {
            if !keys.contains(&key.as_str()) {
                self.issue(format!("{section}.{key}"), "unknown key");
            }
        }
    }

    fn get<'a, T>(
        &mut self,
        section: &str,
        table: &'a Table,
        key: &str,
        convert: impl FnOnce(&'a Value) -> Result<T, String>,
    ) -> Option<T> {
        let value = table.get(key)?;
        match convert(value) {
            Ok(v) => Some(v),
            Err(msg) => {
                self.issue(format!("{section}.{key}"), msg);
                None
            }
        }
    }

    fn float(&mut self, section: &str, table: &Table, key: &str) -> Option<f64> {
        self.get(section, table, key, |v| match v {
            Value::Float(f) => Ok(*f),
            Value::Integer(i) => Ok(*i as f64),
            other => Err(format!("expected a number, found {}", other.type_str())),
        })
    }

    fn integer(&mut self, section: &str, table: &Table, key: &str) -> Option<i64> {
        self.get(section, table, key, |v| {
            v.as_integer()
                .ok_or_else(|| format!("expected an integer, found {}", v.type_str()))
        })
    }

    fn boolean(&mut self, section: &str, table: &Table, key: &str) -> Option<bool> {
        self.get(section, table, key, |v| {
            v.as_bool()
                .ok_or_else(|| format!("expected true or false, found {}", v.type_str()))
        })
    }

    fn string(&mut self, section: &str, table: &Table, key: &str) -> Option<String> {
        self.get(section, table, key, |v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| format!("expected a string, found {}", v.type_str()))
        })
    }

    fn array<'a>(&mut self, section: &str, table: &'a Table, key: &str) -> Option<&'a Vec<Value>> {
        self.get(section, table, key, |v| {
            v.as_array()
                .ok_or_else(|| format!("expected a list, found {}", v.type_str()))
        })
    }

    fn time(&mut self, section: &str, table: &Table, key: &str) -> Option<Time> {
        self.get(section, table, key, time_of)
    }

    fn setting(&mut self, section: &str, table: &Table, key: &str) -> Option<TimeSetting> {
        self.get(section, table, key, |v| match v {
            Value::String(s) => s.parse::<TimeSetting>(),
            other => time_of(other).map(TimeSetting::Fixed),
        })
    }

    /// Sizes in bits, or a string with a `bits`/`bytes` unit.
    fn bits(&mut self, section: &str, table: &Table, key: &str) -> Option<f64> {
        self.get(section, table, key, |v| match v {
            Value::Float(f) => Ok(*f),
            Value::Integer(i) => Ok(*i as f64),
            Value::String(s) => {
                let s = s.trim();
                let (num, scale) = if let Some(n) = s.strip_suffix("bytes") {
                    (n, 8.0)
                } else if let Some(n) = s.strip_suffix("bits") {
                    (n, 1.0)
                } else {
                    (s, 1.0)
                };
                num.trim()
                    .parse::<f64>()
                    .map(|n| n * scale)
                    .map_err(|_| format!("invalid size {s:?} (expected bits or a value in bytes)"))
            }
            other => Err(format!("expected a size, found {}", other.type_str())),
        })
    }
}
