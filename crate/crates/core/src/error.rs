use thiserror::Error;

/// Errors raised by the numerical routines and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not symmetric (max asymmetry {asymmetry:.3e} exceeds {tolerance:.3e})")]
    NotSymmetric { asymmetry: f64, tolerance: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),

    #[error("secular root in ({lo}, {hi}) not resolved after {iterations} iterations")]
    RootBracketFailure { lo: f64, hi: f64, iterations: usize },

    #[error("invalid degrees of freedom: {0}")]
    InvalidDof(String),

    #[error("bound precondition violated: {0}")]
    ConditionViolated(String),

    #[error("regime violation: {0}")]
    RegimeViolation(String),

    #[error("argument inside the bulk: {0}")]
    BulkViolation(String),

    #[error("argument inside the support: {0}")]
    SupportViolation(String),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("root not found: {0}")]
    RootNotFound(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("i/o failure: {0}")]
    IoFailure(String),
}

impl Error {
    /// True for errors caused by inputs that violate a documented
    /// precondition, as opposed to I/O failures.
    pub fn is_precondition(&self) -> bool {
        !matches!(self, Error::IoFailure(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::IoFailure(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Error::IoFailure(e.to_string())
        } else {
            Error::InvalidParameter(format!("json: {e}"))
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::IoFailure(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
