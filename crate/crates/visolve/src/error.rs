use std::io;
use std::path::PathBuf;

use visolve_core::{ConfigError, OperatorError, ProjectionError, SolverError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("config: {0}")]
    Invalid(String),
    #[error("solver: {0}")]
    Solver(#[from] SolverError),
    #[error("projections: {0}")]
    Projection(#[from] ProjectionError),
    #[error("operators: {0}")]
    Operator(#[from] OperatorError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), line, message: message.into() }
    }

    /// 1 for bad input or usage, 2 for failures inside the numerics.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Parse { .. } | Error::Config(_) | Error::Invalid(_) | Error::Csv(_) => 1,
            Error::Solver(SolverError::Config(_)) | Error::Solver(SolverError::DimensionMismatch { .. }) => 1,
            Error::Solver(_) | Error::Projection(_) | Error::Operator(_) => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
