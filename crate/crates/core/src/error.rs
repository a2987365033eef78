use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("euler decomposition failed (residual {residual:e}): {reason}")]
    Decomposition { reason: String, residual: f64 },
    #[error("no free factorization found; smallest singular value seen {smallest_singular_value:e}")]
    Factorization { smallest_singular_value: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("resampling failed: {0}")]
    Resampling(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
