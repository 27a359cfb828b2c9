use std::io;
use std::path::PathBuf;

use chargefcs_core::Error as CoreError;

/// Errors surfaced by the drivers and the command line.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Engine(#[from] CoreError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 configuration, 3 resource cap, 4 numerical failure, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Json(_) => 2,
            CliError::Engine(e) => match e {
                CoreError::InvalidParameter { .. } | CoreError::EmptyInput(_) => 2,
                CoreError::ResourceCap { .. } => 3,
                CoreError::NonConvergence { .. } | CoreError::BranchCut { .. } => 4,
            },
            CliError::Io { .. } | CliError::Csv(_) => 1,
        }
    }
}
