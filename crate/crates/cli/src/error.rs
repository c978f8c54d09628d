use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {1}", .0.display())]
    Io(PathBuf, std::io::Error),
    #[error("{}: {1}", .0.display())]
    Input(PathBuf, leafpower::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] leafpower::Error),
    #[error("{0}")]
    Internal(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    /// Exit status: 3 for resource caps, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(leafpower::Error::ResourceCap(_)) | CliError::Input(_, leafpower::Error::ResourceCap(_)) => 3,
            _ => 2,
        }
    }
}
