//! Error type for signature computations.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SigError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

pub type Result<T> = std::result::Result<T, SigError>;
