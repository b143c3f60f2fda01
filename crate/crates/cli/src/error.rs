use thiserror::Error;

/// Failures grouped by the exit code they map to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("fit failed: {0}")]
    Fit(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Fit(_) => 3,
        }
    }
}

impl From<revisp::Error> for CliError {
    fn from(e: revisp::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
