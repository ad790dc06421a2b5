use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset has no columns")]
    EmptyDataset,

    #[error("vector-iid data needs equal column lengths, got {lengths:?}")]
    DimensionMismatch { lengths: Vec<usize> },

    #[error("column {column} has {len} observations, at least 2 are required")]
    TooFewObservations { column: usize, len: usize },

    #[error("dimension {0} exceeds the supported maximum of {max}", max = crate::model::MAX_DIM)]
    DimensionTooLarge(usize),

    #[error("functional has arity {expected}, got a {got}-vector")]
    ArityMismatch { expected: usize, got: usize },

    #[error("non-finite value {value} while evaluating {what}")]
    NonFiniteValue { what: &'static str, value: f64 },

    #[error("level {0} is outside (0, 1)")]
    InvalidLevel(f64),

    #[error("invalid bootstrap plan: {0}")]
    InvalidPlan(String),

    #[error("derivative of order {order} is not available for this functional")]
    DerivativeUnavailable { order: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(
        "{failed} of {total} trials failed, more than the 1% allowed (first failure: {first})"
    )]
    ExcessTrialFailures {
        failed: usize,
        total: usize,
        first: String,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for command-line use: 2 for configuration errors,
    /// 3 for excess trial failures, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) => 2,
            Error::ExcessTrialFailures { .. } => 3,
            _ => 1,
        }
    }
}
