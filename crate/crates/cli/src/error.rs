use thiserror::Error;

/// Failure classes, each with a fixed process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid scene: {0}")]
    Schema(String),
    #[error("numeric validation failed: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Dimension(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Schema(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Io(_) => 3,
            CliError::Dimension(_) => 4,
        }
    }
}

impl From<ellipsum::Error> for CliError {
    fn from(e: ellipsum::Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}
