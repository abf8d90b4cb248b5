use thiserror::Error;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] tfloc::Error),

    #[error("{0}")]
    Usage(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    /// 2 for usage and configuration problems, 3 for numerical failures
    /// (including domains too large for the grid), 4 for a failed check.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e {
                tfloc::Error::NumericFailure(_)
                | tfloc::Error::DomainOverflow(_)
                | tfloc::Error::ResourceLimit(_) => 3,
                _ => 2,
            },
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::CheckFailed(_) => 4,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
