use thiserror::Error;

use crate::chop::ResolutionReport;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum BallError {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("point ({0}, {1}, {2}) lies outside the closed unit ball")]
    OutsideBall(f64, f64, f64),

    #[error("function could not be resolved at the size cap ({}x{}x{})",
        .report.sizes[0], .report.sizes[1], .report.sizes[2])]
    Unresolved { report: Box<ResolutionReport> },

    #[error("non-finite sample produced by the evaluator at ({0}, {1}, {2})")]
    NonFiniteSample(f64, f64, f64),

    #[error("evaluator failed: {0}")]
    Evaluator(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("incompatible Neumann data: boundary flux {flux} differs from volume integral {volume} (residual {residual:e})")]
    Incompatible { flux: f64, volume: f64, residual: f64 },

    #[error("singular system for azimuthal mode {mode}: {detail}")]
    Singular { mode: isize, detail: String },

    #[error("vector field is not divergence-free (max |div V| = {residual:e}, allowed {allowed:e})")]
    NotDivergenceFree { residual: f64, allowed: f64 },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = BallError> = std::result::Result<T, E>;
