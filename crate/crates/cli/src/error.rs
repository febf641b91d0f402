use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Well-formed input that violates a data contract (non-positive price,
    /// unordered dates, too few observations, ...).
    #[error("{0}")]
    Data(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write output: {0}")]
    Output(String),

    #[error(transparent)]
    Estimation(#[from] copinfo::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse { .. }
            | CliError::Data(_)
            | CliError::Io { .. }
            | CliError::Output(_) => 3,
            CliError::Estimation(e) => match e {
                copinfo::Error::InvalidArgument(_) => 2,
                copinfo::Error::Degenerate(_)
                | copinfo::Error::DuplicatePoints { .. }
                | copinfo::Error::TooFewObservations { .. } => 3,
                copinfo::Error::Domain { .. } | copinfo::Error::ExcessOutOfRange { .. } => 4,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "usage",
            3 => "data",
            _ => "numerical",
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
