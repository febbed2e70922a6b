use thiserror::Error;

/// Errors produced by the simulator, the analysis routines and the file readers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The powered actuator can never pull hard enough to snap the beam.
    #[error(
        "no oscillation: {side} actuator equilibrium net pull {equilibrium_pull_n:.6e} N \
         never reaches critical force {critical_force_n:.6e} N (shortfall {shortfall_n:.6e} N)"
    )]
    NoOscillation {
        side: &'static str,
        equilibrium_pull_n: f64,
        critical_force_n: f64,
        shortfall_n: f64,
    },

    #[error("too few snap events: need at least {needed}, got {got}")]
    TooFewEvents { needed: usize, got: usize },

    #[error("no crawl steps to summarize")]
    EmptySteps,

    #[error("invalid mass bounds: need 0 < lo < hi, got ({lo}, {hi})")]
    InvalidBounds { lo: f64, hi: f64 },

    #[error("calibration target unachievable: {0}")]
    Unachievable(String),

    #[error("trace too short: need at least 2 samples, got {0}")]
    TooShort(usize),

    #[error("no oscillation detected in trace")]
    NoOscillationDetected,

    #[error("malformed file at line {line}: {reason}")]
    MalformedFile { line: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: name.to_string(),
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}

pub(crate) fn require_nonnegative(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: name.to_string(),
            reason: format!("must be finite and >= 0, got {value}"),
        })
    }
}
