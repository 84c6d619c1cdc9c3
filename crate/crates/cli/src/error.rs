use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] fracopt::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Parse failures of spec strings count as usage errors.
    pub fn from_spec(e: fracopt::Error) -> Self {
        match e {
            fracopt::Error::Parse { .. } | fracopt::Error::InvalidArgument(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Core(other),
        }
    }
}
