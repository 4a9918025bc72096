use thiserror::Error;

/// Errors raised by the numerical kernels and verifiers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardyError {
    #[error("{what} = {value} outside admissible range {range}")]
    Domain {
        what: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("point is outside the closed domain (signed distance {0})")]
    OutsideDomain(f64),

    #[error("point lies on the boundary; an interior point is required")]
    OnBoundary,

    #[error("direction must be a unit vector (|w| = {0})")]
    NotUnit(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("vector must be nonzero")]
    ZeroVector,

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("polytope has empty interior")]
    EmptyInterior,

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("scale D = {given} is below the threshold D0 = {threshold}")]
    BelowThreshold { given: f64, threshold: f64 },

    #[error("test function is not admissible: {0}")]
    Inadmissible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("mass matrix is not positive definite: {0}")]
    IndefiniteMass(String),

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, HardyError>;

impl HardyError {
    pub(crate) fn domain(what: &'static str, value: f64, range: &'static str) -> Self {
        HardyError::Domain { what, value, range }
    }
}

impl From<std::io::Error> for HardyError {
    fn from(e: std::io::Error) -> Self {
        HardyError::Io(e.to_string())
    }
}
