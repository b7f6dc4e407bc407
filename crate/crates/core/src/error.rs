use thiserror::Error;

/// Failure classes shared by the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed request (empty input, bad file, unknown key).
    #[error("usage error: {0}")]
    Usage(String),

    /// Structural precondition violated (asymmetric input, wrong variant).
    #[error("precondition error: {0}")]
    Precondition(String),

    /// Operation not defined for this input family.
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// The requested quantity diverges.
    #[error("unbounded result: {0}")]
    Unbounded(String),

    /// A required moment of the mixing law does not exist.
    #[error("mean undefined: {0}")]
    MeanUndefined(String),

    /// Work or memory limit would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),

    /// An iterative numeric method failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}

/// Rejects non-finite scalar arguments at API boundaries.
pub(crate) fn require_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite, got {x}")))
    }
}
