use thiserror::Error;

/// Errors produced by the computations in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    /// An iterative method stopped before converging. `partial` is the last iterate.
    #[error("numeric error: {msg} (partial value {partial})")]
    Numeric { msg: String, partial: f64 },

    #[error("closure exceeded cap of {cap} elements ({count} found): group is possibly infinite or too large")]
    CapExceeded { cap: usize, count: usize },

    #[error("precision error: {0}")]
    Precision(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::DimMismatch { .. } => "dim_mismatch",
            Error::Numeric { .. } => "numeric",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::Precision(_) => "precision",
            Error::Precondition(_) => "precondition",
            Error::Unsupported(_) => "unsupported",
            Error::Parse(_) => "parse",
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
