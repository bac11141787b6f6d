//! Error type shared by every module.

use thiserror::Error;

/// Failures surfaced by oracles, constructions and the batch front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("malformed space descriptor: {0}")]
    MalformedSpace(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("zero vector is not admissible for {0}")]
    ZeroVector(&'static str),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("point is not a unit vector (norm {0})")]
    NotUnit(f64),
    #[error("norm {0} exceeds one")]
    NormTooLarge(f64),
    #[error("space is not smooth: {0}")]
    NonSmoothSpace(String),
    #[error("norm is not smooth at the point (support face diameter {diameter})")]
    NonSmoothPoint { diameter: f64 },
    #[error("precondition gap: value {value} does not exceed threshold {threshold}")]
    PreconditionGap { value: f64, threshold: f64 },
    #[error("xi inequality infeasible (residual {0})")]
    XiInfeasible(f64),
    #[error("invalid beta structure: {0}")]
    InvalidBeta(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("certification failed: {0}")]
    CertificationFailed(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(LabError::DimensionMismatch { expected, got })
    }
}
