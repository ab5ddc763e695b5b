use std::fmt;

/// One violated constraint, addressed by its configuration path
/// (for example `haptic.t_b`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub field: String,
    pub message: String,
}

impl ConfigIssue {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn join_issues(issues: &[ConfigIssue]) -> String {
    issues
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Every violated constraint is reported, not only the first.
    #[error("invalid configuration: {}", join_issues(.0))]
    Config(Vec<ConfigIssue>),

    /// No positive θ satisfies the stability condition.
    #[error("infeasible configuration: service rate {service_rate} b/s does not exceed mean arrival rate {mean_rate} b/s")]
    Infeasible { service_rate: f64, mean_rate: f64 },

    /// Haptic load alone exhausts the channel.
    #[error("haptic load saturates capacity (long-run leftover rate {0} b/s)")]
    Saturated(f64),

    #[error(
        "leftover queue is unstable: {queue_mid} packets at half horizon, {queue_end} at horizon"
    )]
    Unstable { queue_mid: usize, queue_end: usize },

    #[error("horizontal distance did not stabilize over the final 20% of a {horizon_s} s horizon")]
    Divergence { horizon_s: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("failed to parse {what}: {message}")]
    Parse { what: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config(vec![ConfigIssue::new(field, message)])
    }

    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Parse { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
