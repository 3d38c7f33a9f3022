use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {expected} rows expected, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("sample too small: need at least {needed} observations, got {got}")]
    TooSmall { needed: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "responses are constant; the statistic is undefined when the total sum of squares is zero"
    )]
    DegenerateResponse,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("training diverged: loss became non-finite at epoch {epoch}")]
    DivergedTraining { epoch: usize },

    #[error("exhaustive enumeration requires n <= {max}, got n = {n}")]
    TooLarge { n: usize, max: usize },

    #[error(
        "series too short: need at least {needed} samples for {harmonics} harmonics, got {got}"
    )]
    TooFewSamples {
        needed: usize,
        got: usize,
        harmonics: usize,
    },

    #[error("invalid accuracy points {0}: must be one of 0, 1, 3, 6, 9")]
    InvalidPoints(i64),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("invalid scenario parameters: {0}")]
    InvalidParams(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    ParseError {
        row: usize,
        column: String,
        message: String,
    },

    #[error("column `{0}` not found in header")]
    MissingColumn(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
