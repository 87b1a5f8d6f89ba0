//! The end-to-end prediction pipeline and its serialized checkpoint.
//!
//! A checkpoint is a single JSON document holding everything needed to
//! reproduce predictions exactly: the extractor spec (plus the realized
//! projection matrix, so no regeneration step can drift), the fitted
//! standardizer, the weight matrix, the training configuration, and a
//! little provenance metadata.

use std::fs;
use std::path::Path as FsPath;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use skelbench_core::SkeletonSequence;

use crate::classifier::{ClassifierModel, TrainConfig};
use crate::error::{ModelError, Result};
use crate::extract::{ExtractorSpec, FeatureExtractor, Projection, Standardizer};

pub const CHECKPOINT_VERSION: u32 = 1;

/// Extractor, standardizer, and classifier glued into one predictor.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub extractor: FeatureExtractor,
    pub standardizer: Standardizer,
    pub model: ClassifierModel,
}

impl Pipeline {
    pub fn new(
        extractor: FeatureExtractor,
        standardizer: Standardizer,
        model: ClassifierModel,
    ) -> Result<Pipeline> {
        let pipeline = Pipeline {
            extractor,
            standardizer,
            model,
        };
        pipeline.validate()?;
        Ok(pipeline)
    }

    pub fn validate(&self) -> Result<()> {
        self.standardizer.validate()?;
        self.model.validate()?;
        let fd = self.extractor.feature_dim();
        if fd != self.standardizer.dim() || fd != self.model.feature_dim {
            return Err(ModelError::Consistency(format!(
                "stage dimensions disagree: extractor {fd}, standardizer {}, classifier {}",
                self.standardizer.dim(),
                self.model.feature_dim
            )));
        }
        Ok(())
    }

    /// Standardized feature vector for one sequence.
    pub fn features(&self, seq: &SkeletonSequence) -> Result<Vec<f64>> {
        let mut feats = self.extractor.extract(seq)?;
        self.standardizer.transform_in_place(&mut feats)?;
        Ok(feats)
    }

    /// Predicted label and class probabilities for one sequence.
    pub fn predict(&self, seq: &SkeletonSequence) -> Result<(u32, Vec<f64>)> {
        let feats = self.features(seq)?;
        self.model.predict(&feats)
    }
}

/// Provenance recorded alongside the parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMetadata {
    pub final_loss: f64,
    pub epochs_run: usize,
    pub train_samples: usize,
    /// Free-form description of the training arm (dataset, degradation).
    #[serde(default)]
    pub note: String,
}

/// Serialized form of a [`Pipeline`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub extractor: ExtractorSpec,
    /// Flattened frame dimension the extractor was built for.
    pub input_dim: usize,
    /// Realized projection matrix, when the extractor uses one.
    pub projection: Option<Projection>,
    pub standardizer: Standardizer,
    pub num_classes: usize,
    pub feature_dim: usize,
    /// Row-major `num_classes x (feature_dim + 1)`; last column is bias.
    pub weights: Vec<Vec<f64>>,
    pub train_config: TrainConfig,
    pub metadata: CheckpointMetadata,
}

impl Checkpoint {
    pub fn from_pipeline(
        pipeline: &Pipeline,
        train_config: &TrainConfig,
        metadata: CheckpointMetadata,
    ) -> Result<Checkpoint> {
        pipeline.validate()?;
        let weights = pipeline
            .model
            .weights
            .rows()
            .into_iter()
            .map(|r| r.to_vec())
            .collect();
        Ok(Checkpoint {
            format_version: CHECKPOINT_VERSION,
            extractor: pipeline.extractor.spec().clone(),
            input_dim: pipeline.extractor.input_dim(),
            projection: pipeline.extractor.projection().cloned(),
            standardizer: pipeline.standardizer.clone(),
            num_classes: pipeline.model.num_classes,
            feature_dim: pipeline.model.feature_dim,
            weights,
            train_config: train_config.clone(),
            metadata,
        })
    }

    pub fn into_pipeline(self) -> Result<Pipeline> {
        if self.format_version != CHECKPOINT_VERSION {
            return Err(ModelError::Checkpoint(format!(
                "unsupported checkpoint format version {}, expected {CHECKPOINT_VERSION}",
                self.format_version
            )));
        }
        let extractor = FeatureExtractor::from_parts(self.extractor, self.input_dim, self.projection)?;
        if self.weights.len() != self.num_classes
            || self
                .weights
                .iter()
                .any(|r| r.len() != self.feature_dim + 1)
        {
            return Err(ModelError::Checkpoint(format!(
                "weight matrix is {}x{:?}, expected {}x{}",
                self.weights.len(),
                self.weights.first().map(Vec::len),
                self.num_classes,
                self.feature_dim + 1
            )));
        }
        let mut weights = Array2::<f64>::zeros((self.num_classes, self.feature_dim + 1));
        for (k, row) in self.weights.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                weights[[k, j]] = *v;
            }
        }
        let model = ClassifierModel {
            num_classes: self.num_classes,
            feature_dim: self.feature_dim,
            weights,
        };
        Pipeline::new(extractor, self.standardizer, model)
    }

    pub fn save(&self, path: &FsPath) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &FsPath) -> Result<Checkpoint> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Loads a checkpoint and rebuilds the pipeline in one step.
pub fn load_pipeline(path: &FsPath) -> Result<(Pipeline, Checkpoint)> {
    let ckpt = Checkpoint::load(path)?;
    let pipeline = ckpt.clone().into_pipeline()?;
    Ok((pipeline, ckpt))
}
