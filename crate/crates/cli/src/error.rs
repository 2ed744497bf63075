use std::path::PathBuf;

use nodaldiv::{ConstructError, DecError, MeshError};

/// Exit codes: 0 all checks pass, 1 a check failed, 2 the construction
/// failed, 3 bad input.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{}: {}", .0.display(), .1)]
    Io(PathBuf, std::io::Error),
    #[error("{0}")]
    Mesh(#[from] MeshError),
    #[error("{0}")]
    Dec(#[from] DecError),
    #[error("construction failed: {0}")]
    Construct(ConstructError),
    #[error("verification failed: {}", .0.join(", "))]
    Failed(Vec<String>),
}

impl From<ConstructError> for CliError {
    fn from(e: ConstructError) -> Self {
        match e {
            ConstructError::Mesh(m) => CliError::Mesh(m),
            other => CliError::Construct(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Construct(_) => 2,
            CliError::Config(_) | CliError::Io(..) | CliError::Mesh(_) | CliError::Dec(_) => 3,
        }
    }
}
