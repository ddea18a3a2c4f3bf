use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: {what} (expected {expected}, got {actual})")]
    Dimension {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("framing error: {0}")]
    Framing(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate landscape: {0}")]
    DegenerateLandscape(String),

    /// The scaling-factor denominator of a convergence bound is not positive.
    #[error("vacuous bound for {scenario}: scaling-factor denominator is {denominator:.6e}")]
    VacuousBound {
        scenario: &'static str,
        denominator: f64,
    },

    #[error("dataset error in {path}: {reason}")]
    Dataset { path: PathBuf, reason: String },

    #[error("missing result files in {dir}: expected one of {expected:?}")]
    MissingResults { dir: PathBuf, expected: Vec<String> },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::VacuousBound { .. } | Error::DegenerateLandscape(_) => 3,
            Error::Verification(_) => 4,
            _ => 2,
        }
    }
}
