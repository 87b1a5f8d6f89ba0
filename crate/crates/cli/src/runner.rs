//! The experiment runner: loads and splits data, trains one classifier
//! per extractor arm on the un-degraded training split, then walks the
//! degradation grid over the test split.
//!
//! Protocol ordering is enforced by construction: every test sample
//! flows through degrade -> (optional mitigation) -> arm pre-processing
//! -> feature extraction -> standardization -> prediction, and the
//! training set is consumed once, before the grid loop, with a checksum
//! re-verified at every grid point to prove no arm ever trains on
//! degraded data.

use std::collections::BTreeMap;
use std::path::Path;

use sha2::{Digest, Sha256};
use skelbench_core::canonical;
use skelbench_core::degrade::{apply_degradation, interpolate_missing, DegradationSpec};
use skelbench_core::preproc::apply_preproc;
use skelbench_core::split::split_dataset;
use skelbench_core::synth::generate_synthetic;
use skelbench_core::SkeletonSequence;
use skelbench_model::{
    train_classifier, Accuracy, FeatureExtractor, Pipeline, Standardizer, TrainReport,
};

use crate::config::{ArmConfig, DatasetSource, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::table::{ResultsRow, ResultsTable};

/// A loaded, split dataset ready for the protocol.
#[derive(Debug, Clone)]
pub struct PreparedDataset {
    pub train: Vec<SkeletonSequence>,
    pub test: Vec<SkeletonSequence>,
    pub num_classes: usize,
    /// Kebab-case split name for report rows.
    pub split_name: String,
    /// Nominal capture rate shared by the samples.
    pub base_fps: f64,
}

/// Loads the configured dataset and applies the split. `base_dir` anchors
/// relative paths in the config (usually the config file's directory).
pub fn load_dataset(config: &ExperimentConfig, base_dir: &Path) -> Result<PreparedDataset> {
    config.validate()?;
    let samples = match &config.dataset {
        DatasetSource::Synthetic { spec } => generate_synthetic(spec, config.master_seed)
            .map_err(|e| CliError::Data(e.to_string()))?,
        DatasetSource::Directory { dir } => {
            let dir = if dir.is_absolute() {
                dir.clone()
            } else {
                base_dir.join(dir)
            };
            load_directory(&dir)?
        }
    };
    if samples.is_empty() {
        return Err(CliError::Data("dataset is empty".into()));
    }
    let num_classes = samples.iter().map(|s| s.label).max().unwrap() as usize + 1;
    if num_classes < 2 {
        return Err(CliError::Data(
            "dataset contains fewer than 2 classes".into(),
        ));
    }
    let base_fps = samples[0].fps;
    if samples.iter().any(|s| s.fps != base_fps) {
        return Err(CliError::Data(
            "samples disagree on fps; mixed-rate datasets are not supported".into(),
        ));
    }
    let split = config.split.resolve(base_dir)?;
    let split_name = match serde_json::to_value(split.kind) {
        Ok(serde_json::Value::String(s)) => s,
        _ => "unknown".into(),
    };
    let (train, test) = split_dataset(samples, &split).map_err(|e| CliError::Data(e.to_string()))?;
    if train.is_empty() || test.is_empty() {
        return Err(CliError::Data(format!(
            "degenerate split: {} train / {} test samples",
            train.len(),
            test.len()
        )));
    }
    Ok(PreparedDataset {
        train,
        test,
        num_classes,
        split_name,
        base_fps,
    })
}

/// Reads every canonical sample file in a directory, sorted by file name
/// so the dataset order is stable across filesystems.
pub fn load_directory(dir: &Path) -> Result<Vec<SkeletonSequence>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| CliError::Data(format!("reading {}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()),
                Some("json") | Some("skb") | Some("skeleton")
            )
        })
        .collect();
    paths.sort();
    let mut samples = Vec::with_capacity(paths.len());
    for path in paths {
        let seq = canonical::load_sequence(&path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        samples.push(seq);
    }
    Ok(samples)
}

/// SHA-256 over the canonical JSON of every sequence, in order. Used to
/// prove the training inputs never change across grid points.
pub fn checksum_sequences(seqs: &[SkeletonSequence]) -> Result<String> {
    let mut hasher = Sha256::new();
    for seq in seqs {
        let text = canonical::write_json(seq).map_err(|e| CliError::Data(e.to_string()))?;
        hasher.update(text.as_bytes());
    }
    Ok(format!("{:x}", hasher.finalize()))
}

/// One trained arm: its config, fitted pipeline, and training trace.
pub struct TrainedArm {
    pub config: ArmConfig,
    pub pipeline: Pipeline,
    pub report: TrainReport,
}

/// Applies an arm's pre-processing (if any) and extracts the feature
/// vector for one sequence.
fn arm_features(arm: &ArmConfig, extractor: &FeatureExtractor, seq: &SkeletonSequence) -> Result<Vec<f64>> {
    let processed = match &arm.preproc {
        Some(spec) => apply_preproc(seq, spec).map_err(|e| CliError::Data(e.to_string()))?,
        None => seq.clone(),
    };
    extractor
        .extract(&processed)
        .map_err(|e| CliError::from(e))
}

/// Trains every arm on the un-degraded training split.
pub fn train_arms(config: &ExperimentConfig, data: &PreparedDataset) -> Result<Vec<TrainedArm>> {
    let labels: Vec<u32> = data.train.iter().map(|s| s.label).collect();
    let input_dim = data.train[0].frame_dim();
    if data.train.iter().any(|s| s.frame_dim() != input_dim) {
        return Err(CliError::Data(
            "training samples disagree on frame dimension".into(),
        ));
    }
    let mut arms = Vec::with_capacity(config.arms.len());
    for arm in &config.arms {
        let context = format!("arm {}", arm.name);
        let extractor = FeatureExtractor::new(arm.extractor.clone(), input_dim)
            .map_err(|e| CliError::from(e).context(&context))?;
        let mut rows = Vec::with_capacity(data.train.len());
        for seq in &data.train {
            rows.push(arm_features(arm, &extractor, seq).map_err(|e| e.context(&context))?);
        }
        let standardizer =
            Standardizer::fit(&rows).map_err(|e| CliError::from(e).context(&context))?;
        let rows = standardizer
            .transform(&rows)
            .map_err(|e| CliError::from(e).context(&context))?;
        let report = train_classifier(&rows, &labels, data.num_classes, &config.train)
            .map_err(|e| CliError::from(e).context(&context))?;
        let pipeline = Pipeline::new(extractor, standardizer, report.model.clone())
            .map_err(|e| CliError::from(e).context(&context))?;
        arms.push(TrainedArm {
            config: arm.clone(),
            pipeline,
            report,
        });
    }
    Ok(arms)
}

/// Accuracy of one arm on the test split under one grid point. Returns
/// the accuracy and the mean realized deletion rate.
fn evaluate_grid_point(
    arm: &TrainedArm,
    test: &[SkeletonSequence],
    spec: &DegradationSpec,
    mitigated: bool,
) -> Result<(Accuracy, f64)> {
    let mut correct = 0usize;
    let mut realized_sum = 0.0;
    for seq in test {
        let degraded = apply_degradation(seq, spec).map_err(|e| CliError::Data(e.to_string()))?;
        realized_sum += degraded.mask.realized_rate();
        let visible = if mitigated {
            interpolate_missing(&degraded)
        } else {
            degraded.compacted()
        };
        let feats = arm_features(&arm.config, &arm.pipeline.extractor, &visible)?;
        let mut feats = feats;
        arm.pipeline
            .standardizer
            .transform_in_place(&mut feats)
            .map_err(CliError::from)?;
        let (pred, _) = arm.pipeline.model.predict(&feats).map_err(CliError::from)?;
        if pred == seq.label {
            correct += 1;
        }
    }
    Ok((
        Accuracy {
            correct,
            total: test.len(),
        },
        realized_sum / test.len() as f64,
    ))
}

/// Everything a full run produces.
pub struct RunOutput {
    pub table: ResultsTable,
    pub arms: Vec<TrainedArm>,
    /// Checksum of the training inputs, verified at every grid point.
    pub training_checksum: String,
    /// Per-arm clean-test baseline accuracy (no degradation), for
    /// protocol checks.
    pub baselines: BTreeMap<String, Accuracy>,
}

/// Runs the full protocol for a config.
pub fn run_experiment(config: &ExperimentConfig, base_dir: &Path) -> Result<RunOutput> {
    let data = load_dataset(config, base_dir)?;
    run_experiment_on(config, &data)
}

/// Runs the protocol on an already-loaded dataset (lets callers reuse
/// the data across runs, e.g. for determinism checks).
pub fn run_experiment_on(config: &ExperimentConfig, data: &PreparedDataset) -> Result<RunOutput> {
    let training_checksum = checksum_sequences(&data.train)?;
    let arms = train_arms(config, data)?;

    // Clean baseline per arm: the untouched test split.
    let mut baselines = BTreeMap::new();
    for arm in &arms {
        let mut correct = 0usize;
        for seq in &data.test {
            let feats = arm_features(&arm.config, &arm.pipeline.extractor, seq)?;
            let mut feats = feats;
            arm.pipeline
                .standardizer
                .transform_in_place(&mut feats)
                .map_err(CliError::from)?;
            let (pred, _) = arm.pipeline.model.predict(&feats).map_err(CliError::from)?;
            if pred == seq.label {
                correct += 1;
            }
        }
        baselines.insert(
            arm.config.name.clone(),
            Accuracy {
                correct,
                total: data.test.len(),
            },
        );
    }

    let mut rows = Vec::new();
    for (gi, spec) in config.grid.iter().enumerate() {
        // The training inputs must be byte-identical at every grid point;
        // any mutation would invalidate the whole protocol.
        let check = checksum_sequences(&data.train)?;
        if check != training_checksum {
            return Err(CliError::Data(format!(
                "training inputs changed at grid point {gi} ({} {:.4})",
                spec.kind_name(),
                spec.nominal_rate()
            )));
        }
        for &mitigated in config.mitigation.settings() {
            for arm in &arms {
                let context = format!(
                    "grid point {gi} ({} rate {:.4}, mitigated={mitigated}, arm {})",
                    spec.kind_name(),
                    spec.nominal_rate(),
                    arm.config.name
                );
                let (accuracy, realized) =
                    evaluate_grid_point(arm, &data.test, spec, mitigated)
                        .map_err(|e| e.context(&context))?;
                rows.push(ResultsRow {
                    extractor: arm.config.name.clone(),
                    split: data.split_name.clone(),
                    kind: spec.kind_name().to_string(),
                    nominal_rate: spec.nominal_rate(),
                    realized_rate: realized,
                    fps: data.base_fps * (1.0 - spec.nominal_rate()),
                    mitigated,
                    accuracy: accuracy.fraction(),
                    n_samples: data.test.len(),
                    seed: config.master_seed,
                });
            }
        }
    }
    let table = ResultsTable::new(rows);
    table.validate()?;
    Ok(RunOutput {
        table,
        arms,
        training_checksum,
        baselines,
    })
}
