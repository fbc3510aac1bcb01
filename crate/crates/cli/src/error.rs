use leeyang_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Flag(String),

    #[error("{0}")]
    Range(String),

    #[error("{0}")]
    Numeric(String),

    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Flag(_) => 2,
            CliError::Range(_) => 3,
            CliError::Numeric(_) | CliError::Io(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::TooLarge { .. }
            | CoreError::DimensionCap { .. }
            | CoreError::UnsupportedDimension(_) => {
                CliError::Range(format!("{e}; use `predict` for large volumes"))
            }
            CoreError::InvalidModel(_) | CoreError::Parse(_) => CliError::Flag(e.to_string()),
            CoreError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}
