use thiserror::Error;

/// Errors raised by the library. The CLI maps `Input` and `Parse` to exit
/// code 2 and `Internal` to exit code 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("universe mismatch: {0}")]
    UniverseMismatch(String),
    #[error("value out of domain: {0}")]
    Domain(String),
    #[error("unsupported capacity: {0}")]
    UnsupportedCapacity(String),
    #[error("negative integrand value {0}; use the asymmetric integral")]
    NegativeIntegrand(f64),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("malformed utility: {0}")]
    MalformedUtility(String),
    #[error("division by a zero-measure block {0}")]
    ZeroMeasureBlock(usize),
    #[error("unsupported preference: {0}")]
    UnsupportedPreference(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("parse error at {path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
