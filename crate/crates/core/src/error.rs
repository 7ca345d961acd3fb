use thiserror::Error;

use crate::trace::ConvergenceTrace;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum L1PcaError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("matrix is not orthonormal: ||U^T U - I||_F = {residual:e}")]
    NotOrthonormal { residual: f64 },

    /// The polar-decomposition input vanished: every sample is orthogonal to
    /// every column of the current iterate. The run is aborted and the
    /// records gathered so far are returned.
    #[error("degenerate iterate at step {step}: polar-decomposition input is zero")]
    DegenerateIterate {
        step: usize,
        partial: Option<Box<ConvergenceTrace>>,
    },

    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),

    #[error("enumeration too large: {count} candidates exceed limit {limit}")]
    TooLarge { count: u128, limit: u128 },

    #[error("not enough data: {0}")]
    NotEnoughData(String),

    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, L1PcaError>;

pub(crate) fn shape_err(msg: impl Into<String>) -> L1PcaError {
    L1PcaError::Shape(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> L1PcaError {
    L1PcaError::InvalidInput(msg.into())
}
