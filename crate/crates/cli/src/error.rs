use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad scenario file, unknown key, unit mismatch or out-of-range value.
    #[error("config error: {0}")]
    Config(String),

    #[error("runtime error: {0}")]
    Runtime(String),

    #[error("{failed} of {total} acceptance criteria failed")]
    Validation { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
            CliError::Validation { .. } => 4,
        }
    }
}

impl From<coexist_core::Error> for CliError {
    fn from(e: coexist_core::Error) -> Self {
        match e {
            coexist_core::Error::InvalidParameter { .. } | coexist_core::Error::Configuration(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
