use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("probability vector needs at least {min} entries, got {got}")]
    TooFewOutcomes { min: usize, got: usize },

    #[error("non-finite entry at index {idx}: {value}")]
    NonFinite { idx: usize, value: f64 },

    #[error("not normalized (expected total probability 1): sum={sum}")]
    NotNormalized { sum: f64 },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("Shannon entropy undefined for signed probabilities (entry {idx} = {value})")]
    NegativeEntry { idx: usize, value: f64 },

    #[error("index {idx} out of range for {n} outcomes")]
    IndexOutOfRange { idx: usize, n: usize },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("inadmissible state: information {information} exceeds 1")]
    Inadmissible { information: f64 },

    #[error("degenerate constraint: {0}")]
    DegenerateConstraint(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
