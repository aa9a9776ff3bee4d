use thiserror::Error;

/// Errors produced by the numerical and combinatorial routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A stated hypothesis of a bound (e.g. `|det T| = 1`) does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// An iterative method failed to converge or a rounding check failed.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// A size cap was exceeded.
    #[error("resource limit: {0}")]
    Resource(String),
    /// Two independent routes to the same quantity disagree.
    #[error("consistency check failed: {0}")]
    Consistency(String),
    /// Malformed input file.
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
