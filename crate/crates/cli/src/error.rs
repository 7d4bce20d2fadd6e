use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// bad flags or parameter values
    #[error("{0}")]
    Usage(String),
    /// unreadable or malformed input
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<sbox_forge::Error> for CliError {
    /// Library errors come from parameters the user supplied.
    fn from(e: sbox_forge::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}
