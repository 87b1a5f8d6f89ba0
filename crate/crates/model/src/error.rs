//! Error type for feature extraction, training, and checkpoints.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("numeric error at epoch {epoch}: {msg}")]
    Numeric { epoch: usize, msg: String },

    #[error(transparent)]
    Core(#[from] skelbench_core::CoreError),

    #[error(transparent)]
    Sig(#[from] skelbench_sig::SigError),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ModelError>;
