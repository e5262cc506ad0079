use thiserror::Error;

/// Errors raised by the lab's models, solvers and field transforms.
#[derive(Debug, Error)]
pub enum Error {
    /// A setting, state or grid index that does not exist.
    #[error("index error: {0}")]
    Index(String),

    /// An input violates a documented invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// The LP solver could not produce a usable answer.
    #[error("solver error: {0}")]
    Solver(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
