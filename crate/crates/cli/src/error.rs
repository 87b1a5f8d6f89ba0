//! Error taxonomy for the command-line tools, mapped onto exit codes:
//! 0 success, 2 configuration error, 3 data error, 4 numeric error.

use skelbench_core::CoreError;
use skelbench_model::ModelError;
use thiserror::Error;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent configuration / arguments.
    #[error("config error: {0}")]
    Config(String),

    /// Unreadable, unparsable, or inconsistent data files.
    #[error("data error: {0}")]
    Data(String),

    /// Non-finite numbers where finite ones are required (e.g. training
    /// divergence).
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Data(_) => EXIT_DATA,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    /// Attaches grid-point / file context to an inner error.
    pub fn context(self, what: &str) -> CliError {
        match self {
            CliError::Config(m) => CliError::Config(format!("{what}: {m}")),
            CliError::Data(m) => CliError::Data(format!("{what}: {m}")),
            CliError::Numeric(m) => CliError::Numeric(format!("{what}: {m}")),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter(_) => CliError::Config(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Numeric { .. } => CliError::Numeric(e.to_string()),
            ModelError::InvalidParameter(_) => CliError::Config(e.to_string()),
            ModelError::Core(inner) => CliError::from(inner),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(format!("io: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
