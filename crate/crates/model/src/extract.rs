//! Feature extraction: turning a skeletal sequence into a fixed-length
//! feature vector, plus the per-feature standardizer fitted on training
//! data.
//!
//! Two extractor families are supported:
//!
//! * `raw_resampled` — resample the sequence to a fixed frame count with
//!   linear interpolation and flatten the coordinates. This is the
//!   frame-grid baseline: its features move whenever frame timing moves.
//! * `windowed_logsig` — split the coordinate path into `w` windows and
//!   concatenate truncated log-signature coefficients per window. These
//!   features depend on the traced geometry, not on how many frames
//!   sampled it, which is the property under study.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use skelbench_core::preproc::resample_linear;
use skelbench_core::rng::SplitMix64;
use skelbench_core::SkeletonSequence;
use skelbench_sig::{windowed_log_signature, LyndonBasis, Path};

use crate::error::{ModelError, Result};

fn default_target_len() -> usize {
    64
}
fn default_w() -> usize {
    8
}
fn default_m() -> usize {
    2
}

/// Extractor configuration. Serialized into run configs and checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtractorSpec {
    /// Resample to `target_len` frames and flatten: `target_len * d`
    /// features.
    RawResampled {
        #[serde(default = "default_target_len")]
        target_len: usize,
    },
    /// `w` windows of depth-`m` log-signature coefficients. When
    /// `projection_dim` is set, every frame vector is first projected onto
    /// that many orthonormal directions drawn deterministically from
    /// `projection_seed`; when `time_augment` is set, a normalized time
    /// channel is appended so that time-symmetric (out-and-back) motion
    /// stays visible.
    WindowedLogsig {
        #[serde(default = "default_w")]
        w: usize,
        #[serde(default = "default_m")]
        m: usize,
        #[serde(default)]
        time_augment: bool,
        #[serde(default)]
        projection_dim: Option<usize>,
        #[serde(default)]
        projection_seed: u64,
    },
}

impl ExtractorSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ExtractorSpec::RawResampled { target_len } => {
                if *target_len < 2 {
                    return Err(ModelError::InvalidParameter(format!(
                        "target_len must be at least 2, got {target_len}"
                    )));
                }
            }
            ExtractorSpec::WindowedLogsig {
                w,
                m,
                projection_dim,
                ..
            } => {
                if *w < 1 {
                    return Err(ModelError::InvalidParameter("w must be at least 1".into()));
                }
                if *m < 1 {
                    return Err(ModelError::InvalidParameter("m must be at least 1".into()));
                }
                if let Some(p) = projection_dim {
                    if *p < 1 {
                        return Err(ModelError::InvalidParameter(
                            "projection_dim must be at least 1".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ExtractorSpec::RawResampled { .. } => "raw_resampled",
            ExtractorSpec::WindowedLogsig { .. } => "windowed_logsig",
        }
    }
}

/// A fixed linear map onto `output_dim` orthonormal directions of
/// `R^input_dim`, generated deterministically from a seed. Orthonormal
/// columns guarantee full column rank, so no direction collapses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub input_dim: usize,
    pub output_dim: usize,
    /// `output_dim` columns, each of length `input_dim`.
    pub columns: Vec<Vec<f64>>,
}

impl Projection {
    /// Builds the map by Gram-Schmidt orthonormalization of Gaussian
    /// draws. Requires `output_dim <= input_dim`.
    pub fn orthonormal(seed: u64, input_dim: usize, output_dim: usize) -> Result<Projection> {
        if output_dim == 0 || output_dim > input_dim {
            return Err(ModelError::InvalidParameter(format!(
                "projection needs 1 <= output_dim <= input_dim, got {output_dim} of {input_dim}"
            )));
        }
        let mut rng = SplitMix64::new(seed);
        let mut columns: Vec<Vec<f64>> = Vec::with_capacity(output_dim);
        while columns.len() < output_dim {
            let mut col: Vec<f64> = (0..input_dim).map(|_| rng.gauss()).collect();
            // Two orthogonalization passes keep the result orthonormal to
            // machine precision even for nearly dependent draws.
            for _ in 0..2 {
                for prev in &columns {
                    let dot: f64 = col.iter().zip(prev).map(|(a, b)| a * b).sum();
                    for (c, p) in col.iter_mut().zip(prev) {
                        *c -= dot * p;
                    }
                }
            }
            let norm = col.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm < 1e-8 {
                // Degenerate draw (astronomically unlikely); try again.
                continue;
            }
            for c in &mut col {
                *c /= norm;
            }
            columns.push(col);
        }
        Ok(Projection {
            input_dim,
            output_dim,
            columns,
        })
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(ModelError::Consistency(format!(
                "projection expects {} inputs, got {}",
                self.input_dim,
                x.len()
            )));
        }
        Ok(self
            .columns
            .iter()
            .map(|col| col.iter().zip(x).map(|(c, v)| c * v).sum())
            .collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.output_dim == 0
            || self.output_dim > self.input_dim
            || self.columns.len() != self.output_dim
            || self.columns.iter().any(|c| c.len() != self.input_dim)
        {
            return Err(ModelError::Consistency(
                "projection matrix shape is inconsistent".into(),
            ));
        }
        Ok(())
    }
}

/// A ready-to-run extractor: the spec plus the materialized basis and
/// projection for a concrete input dimension.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    spec: ExtractorSpec,
    input_dim: usize,
    feature_dim: usize,
    basis: Option<Arc<LyndonBasis>>,
    projection: Option<Projection>,
}

impl FeatureExtractor {
    /// Builds the extractor for sequences whose flattened frames have
    /// `input_dim` coordinates.
    pub fn new(spec: ExtractorSpec, input_dim: usize) -> Result<FeatureExtractor> {
        spec.validate()?;
        if input_dim == 0 {
            return Err(ModelError::InvalidParameter(
                "input_dim must be positive".into(),
            ));
        }
        match &spec {
            ExtractorSpec::RawResampled { target_len } => Ok(FeatureExtractor {
                feature_dim: target_len * input_dim,
                spec,
                input_dim,
                basis: None,
                projection: None,
            }),
            ExtractorSpec::WindowedLogsig {
                w,
                m,
                time_augment,
                projection_dim,
                projection_seed,
            } => {
                let projection = match projection_dim {
                    Some(p) => Some(Projection::orthonormal(*projection_seed, input_dim, *p)?),
                    None => None,
                };
                let path_dim = projection_dim.unwrap_or(input_dim) + usize::from(*time_augment);
                let basis = Arc::new(LyndonBasis::new(path_dim, *m)?);
                Ok(FeatureExtractor {
                    feature_dim: w * basis.dim(),
                    spec,
                    input_dim,
                    basis: Some(basis),
                    projection,
                })
            }
        }
    }

    /// Rebuilds an extractor from checkpoint parts, reusing a stored
    /// projection instead of regenerating it.
    pub fn from_parts(
        spec: ExtractorSpec,
        input_dim: usize,
        projection: Option<Projection>,
    ) -> Result<FeatureExtractor> {
        let built = FeatureExtractor::new(spec, input_dim)?;
        match (&built.projection, &projection) {
            (None, None) => Ok(built),
            (Some(_), Some(p)) => {
                p.validate()?;
                if p.input_dim != input_dim {
                    return Err(ModelError::Consistency(format!(
                        "stored projection expects {} inputs, extractor feeds {}",
                        p.input_dim, input_dim
                    )));
                }
                Ok(FeatureExtractor {
                    projection,
                    ..built
                })
            }
            _ => Err(ModelError::Consistency(
                "stored projection does not match the extractor spec".into(),
            )),
        }
    }

    pub fn spec(&self) -> &ExtractorSpec {
        &self.spec
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    /// Length of every feature vector this extractor emits.
    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn projection(&self) -> Option<&Projection> {
        self.projection.as_ref()
    }

    /// Extracts the feature vector for one sequence.
    pub fn extract(&self, seq: &SkeletonSequence) -> Result<Vec<f64>> {
        if seq.frame_dim() != self.input_dim {
            return Err(ModelError::Consistency(format!(
                "sequence {} has frame dimension {}, extractor expects {}",
                seq.sample_id,
                seq.frame_dim(),
                self.input_dim
            )));
        }
        match &self.spec {
            ExtractorSpec::RawResampled { target_len } => {
                let resampled = resample_linear(seq, *target_len)?;
                let mut out = Vec::with_capacity(self.feature_dim);
                for frame in &resampled.frames {
                    out.extend(frame.flatten());
                }
                Ok(out)
            }
            ExtractorSpec::WindowedLogsig {
                w, time_augment, ..
            } => {
                let mut rows = seq.to_matrix();
                if let Some(proj) = &self.projection {
                    rows = rows
                        .iter()
                        .map(|r| proj.apply(r))
                        .collect::<Result<Vec<_>>>()?;
                }
                let path = Path::new(rows)?;
                let basis = self.basis.as_ref().expect("logsig extractor has a basis");
                let windows = windowed_log_signature(&path, *w, *time_augment, basis)?;
                let mut out = Vec::with_capacity(self.feature_dim);
                for row in windows {
                    out.extend(row);
                }
                Ok(out)
            }
        }
    }

    /// Extracts features for a whole dataset, preserving order.
    pub fn extract_all(&self, seqs: &[SkeletonSequence]) -> Result<Vec<Vec<f64>>> {
        seqs.iter().map(|s| self.extract(s)).collect()
    }
}

/// One-shot extraction without keeping the extractor around.
pub fn extract_features(seq: &SkeletonSequence, spec: &ExtractorSpec) -> Result<Vec<f64>> {
    FeatureExtractor::new(spec.clone(), seq.frame_dim())?.extract(seq)
}

/// Per-feature affine normalization fitted on training features. Features
/// that are constant on the training set keep scale 1 so they map to
/// exactly zero instead of dividing by zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Fits mean and (population) standard deviation per feature.
    pub fn fit(rows: &[Vec<f64>]) -> Result<Standardizer> {
        if rows.is_empty() {
            return Err(ModelError::InvalidParameter(
                "cannot fit a standardizer on zero rows".into(),
            ));
        }
        let dim = rows[0].len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(ModelError::Consistency(
                "feature rows must be non-empty and all the same length".into(),
            ));
        }
        let n = rows.len() as f64;
        let mut mean = vec![0.0; dim];
        for row in rows {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; dim];
        for row in rows {
            for ((v, x), m) in var.iter_mut().zip(row).zip(&mean) {
                let d = x - m;
                *v += d * d;
            }
        }
        let std = var
            .iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s <= 1e-12 {
                    1.0
                } else {
                    s
                }
            })
            .collect();
        Ok(Standardizer { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.mean.is_empty()
            || self.mean.len() != self.std.len()
            || self.std.iter().any(|s| !(s.is_finite() && *s > 0.0))
            || self.mean.iter().any(|m| !m.is_finite())
        {
            return Err(ModelError::Consistency(
                "standardizer statistics are inconsistent".into(),
            ));
        }
        Ok(())
    }

    pub fn transform_in_place(&self, row: &mut [f64]) -> Result<()> {
        if row.len() != self.dim() {
            return Err(ModelError::Consistency(format!(
                "standardizer fitted on {} features, got a row of {}",
                self.dim(),
                row.len()
            )));
        }
        for ((x, m), s) in row.iter_mut().zip(&self.mean).zip(&self.std) {
            *x = (*x - m) / s;
        }
        Ok(())
    }

    pub fn transform(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        rows.iter()
            .map(|r| {
                let mut row = r.clone();
                self.transform_in_place(&mut row)?;
                Ok(row)
            })
            .collect()
    }
}
