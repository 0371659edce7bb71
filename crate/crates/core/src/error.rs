use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mark distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("argument outside the domain of {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("singular point in {func}: {detail}")]
    Singularity { func: &'static str, detail: String },

    #[error("{func}: series did not converge after {terms} terms (last term {last_term:e})")]
    NotConverged { func: &'static str, terms: usize, last_term: f64 },

    #[error("requested accuracy {requested:e} not reached; achieved bound {achieved:e}")]
    AccuracyNotReached { requested: f64, achieved: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("degenerate Gram matrix at level {level} (condition number {condition:e})")]
    DegenerateGram { level: usize, condition: f64 },

    #[error("degenerate exchanged dimension: |1 - φ(β1+β2)| = {gap:e}")]
    DegenerateExchange { gap: f64 },

    #[error("not implemented: {0}")]
    NotImplemented(String),

    #[error("point lies on the loop")]
    OnBoundary,

    #[error("indeterminate enclosure rate {rate:.4} exceeds the 1% limit; refine the grid")]
    IndeterminateEnclosure { rate: f64 },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
