use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad configuration supplied by the caller (missing column, k out of range, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Input data violates a domain precondition (empty record list, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A matrix/vector argument has the wrong shape or content.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A node has zero out-degree where a transition matrix needs a positive one.
    #[error("node {node} has zero out-degree; transition matrix undefined without teleport")]
    SingularDegree { node: usize },

    /// An iterative method did not converge within its budget.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A numeric routine failed (eigensolver breakdown, non-finite result, ...).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A text source could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

/// Coarse failure category, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numeric,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::InvalidInput(_) => ErrorKind::Config,
            Error::SingularDegree { .. } | Error::Convergence(_) | Error::Numeric(_) => {
                ErrorKind::Numeric
            }
            Error::Parse { .. } | Error::Io(_) | Error::Csv(_) => ErrorKind::Io,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
