//! Classification stack for the benchmark: feature extractors (raw
//! resampled frames vs. windowed log-signatures), a deterministic linear
//! softmax classifier, a finite-difference gradient checker, and a JSON
//! checkpoint format that reproduces predictions exactly.
//!
//! The classifier is deliberately simple. The benchmark isolates how
//! *feature representations* respond to missing frames, so the model on
//! top must be deterministic and identical across arms; a linear softmax
//! head satisfies both while keeping desk-scale runtimes.

pub mod checkpoint;
pub mod classifier;
pub mod error;
pub mod extract;
pub mod gradcheck;

pub use checkpoint::{load_pipeline, Checkpoint, CheckpointMetadata, Pipeline, CHECKPOINT_VERSION};
pub use classifier::{
    evaluate_accuracy, train_classifier, Accuracy, ClassifierModel, TrainConfig, TrainReport,
};
pub use error::{ModelError, Result};
pub use extract::{extract_features, ExtractorSpec, FeatureExtractor, Projection, Standardizer};
pub use gradcheck::{gradient_check, GRADCHECK_EPS_MAX, GRADCHECK_EPS_MIN};
