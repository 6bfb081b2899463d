use std::path::PathBuf;

use distvote_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Param(String),
    #[error("{0}")]
    BoundExceeded(String),
    #[error("table check failed: {0}")]
    TableFailed(String),
}

impl CliError {
    /// 2 parameters or malformed input, 3 IO, 4 information-model mismatch,
    /// 5 bound violation, 6 LP failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 3,
            CliError::Param(_) => 2,
            CliError::BoundExceeded(_) | CliError::TableFailed(_) => 5,
            CliError::Core(e) => match e {
                Error::InformationModel(_) | Error::NotALineInstance => 4,
                Error::BoundViolation(_) => 5,
                Error::Lp(_) | Error::AdversaryInfeasible { .. } => 6,
                _ => 2,
            },
        }
    }
}

pub fn read(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write(path: &std::path::Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
