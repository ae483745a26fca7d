use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("resource guard exceeded: {0}")]
    ResourceGuard(String),

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("duplicate interpolation abscissa {0}")]
    DuplicatePoint(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// Coarse classification used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Resource,
    Internal,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::DuplicatePoint(_) | Error::NotPrime(_) => ErrorKind::Config,
            Error::ResourceGuard(_) => ErrorKind::Resource,
            Error::Invariant(_) | Error::DimensionMismatch(_) => ErrorKind::Internal,
        }
    }
}
