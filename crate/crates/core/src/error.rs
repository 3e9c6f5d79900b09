use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator e{index} is not valid in an algebra with n = {n}")]
    InvalidGenerator { index: usize, n: usize },

    #[error("unsupported algebra dimension {0} (expected 1..=5)")]
    InvalidDimension(usize),

    #[error("algebra mismatch: {left} vs {right}")]
    AlgebraMismatch { left: String, right: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("expected a grade-1 multivector with real coefficients")]
    NotAVector,

    #[error("expected a real scalar-valued field")]
    NotScalar,

    #[error("zero vector has no inverse")]
    ZeroVector,

    #[error("exponent p = {0} outside (1, inf)")]
    ExponentOutOfRange(f64),

    #[error("operation requires a Witt-enabled algebra")]
    WittDisabled,

    #[error("kernel is singular at {0}")]
    Singular(String),

    #[error("field vanishes (|phi| < 1e-12) at node {node}")]
    NearZero { node: usize },

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
