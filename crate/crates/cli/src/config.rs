//! The experiment configuration: one versioned JSON document describing
//! data source, split, degradation grid, mitigation mode, extractor arms,
//! and training hyperparameters. Everything a run needs besides the data
//! files themselves; two runs from the same config are identical.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use skelbench_core::degrade::DegradationSpec;
use skelbench_core::preproc::PreprocSpec;
use skelbench_core::rng::mix64;
use skelbench_core::split::{SplitKind, SplitSpec};
use skelbench_core::synth::SyntheticSpec;
use skelbench_model::{ExtractorSpec, TrainConfig};

use crate::error::{CliError, Result};

pub const CONFIG_VERSION: u32 = 1;

/// Where samples come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSource {
    /// Generated on the fly from the synthetic benchmark generator.
    Synthetic { spec: SyntheticSpec },
    /// A directory of canonical `.json` / `.skb` / `.skeleton` files.
    Directory { dir: PathBuf },
}

/// How samples are partitioned. Id sets may be given inline or as files
/// (one id per line, `#` comments).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub kind: SplitKind,
    #[serde(default)]
    pub train_ids: Vec<u32>,
    #[serde(default)]
    pub test_ids: Vec<u32>,
    #[serde(default)]
    pub train_ids_file: Option<PathBuf>,
    #[serde(default)]
    pub test_ids_file: Option<PathBuf>,
}

impl SplitConfig {
    pub fn resolve(&self, base_dir: &Path) -> Result<SplitSpec> {
        let side = |inline: &Vec<u32>, file: &Option<PathBuf>, name: &str| -> Result<BTreeSet<u32>> {
            match (inline.is_empty(), file) {
                (false, None) => Ok(inline.iter().copied().collect()),
                (true, Some(path)) => {
                    let path = if path.is_absolute() {
                        path.clone()
                    } else {
                        base_dir.join(path)
                    };
                    skelbench_core::split::read_id_file(&path)
                        .map_err(|e| CliError::Data(format!("{name} id file: {e}")))
                }
                (false, Some(_)) => Err(CliError::Config(format!(
                    "{name} ids given both inline and as a file"
                ))),
                (true, None) => Err(CliError::Config(format!("no {name} ids configured"))),
            }
        };
        let train = side(&self.train_ids, &self.train_ids_file, "train")?;
        let test = side(&self.test_ids, &self.test_ids_file, "test")?;
        SplitSpec::new(self.kind, train, test).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// When mitigation (linear interpolation of missing frames) runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MitigationMode {
    Off,
    On,
    Both,
}

impl MitigationMode {
    pub fn settings(self) -> &'static [bool] {
        match self {
            MitigationMode::Off => &[false],
            MitigationMode::On => &[true],
            MitigationMode::Both => &[false, true],
        }
    }
}

/// One extractor arm: a name for reports, the feature extractor, and an
/// optional pre-processing step applied after degradation (and after
/// mitigation, when enabled) but before feature extraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmConfig {
    pub name: String,
    pub extractor: ExtractorSpec,
    #[serde(default)]
    pub preproc: Option<PreprocSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub version: u32,
    pub dataset: DatasetSource,
    pub split: SplitConfig,
    /// Degradation grid, evaluated in order.
    pub grid: Vec<DegradationSpec>,
    pub mitigation: MitigationMode,
    pub arms: Vec<ArmConfig>,
    pub train: TrainConfig,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(CliError::Config(format!(
                "unsupported config version {}, expected {CONFIG_VERSION}",
                self.version
            )));
        }
        if let DatasetSource::Synthetic { spec } = &self.dataset {
            spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        if self.grid.is_empty() {
            return Err(CliError::Config("degradation grid is empty".into()));
        }
        for (i, spec) in self.grid.iter().enumerate() {
            spec.validate()
                .map_err(|e| CliError::Config(format!("grid[{i}]: {e}")))?;
        }
        if self.arms.is_empty() {
            return Err(CliError::Config("no extractor arms configured".into()));
        }
        let mut names = BTreeSet::new();
        for (i, arm) in self.arms.iter().enumerate() {
            if arm.name.is_empty() || arm.name.contains(',') || arm.name.contains('\n') {
                return Err(CliError::Config(format!(
                    "arm[{i}] name {:?} is empty or contains a separator",
                    arm.name
                )));
            }
            if !names.insert(arm.name.as_str()) {
                return Err(CliError::Config(format!("duplicate arm name {}", arm.name)));
            }
            arm.extractor
                .validate()
                .map_err(|e| CliError::Config(format!("arm {}: {e}", arm.name)))?;
            if let Some(p) = &arm.preproc {
                p.validate()
                    .map_err(|e| CliError::Config(format!("arm {}: {e}", arm.name)))?;
            }
        }
        self.train
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Config(format!("serializing config: {e}")))?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("parsing config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| e.context(&path.display().to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)
            .map_err(|e| CliError::Data(format!("writing {}: {e}", path.display())))
    }
}

/// The frozen default benchmark: 8 synthetic classes, three extractor
/// arms, the full degradation grid, both mitigation settings.
///
/// Arm roster:
/// * `raw-pad` — flattened frames after replication padding to a fixed
///   length; stands in for models that pad the frame grid and therefore
///   feel every timing change.
/// * `raw-resample` — flattened frames after resampling to 64; stands in
///   for models whose own pre-processing already normalizes sequence
///   length.
/// * `logsig` — windowed log-signatures over projected coordinates with
///   a time channel.
pub fn default_config(master_seed: u64) -> ExperimentConfig {
    let dseed = |i: u64| mix64(master_seed ^ (0xD0D0_0000 + i));
    let mut grid = Vec::new();
    // Uniform strides: identity, then the frame-rate ladder 15/10/5/3 FPS.
    for n in [1usize, 2, 3, 6, 10] {
        grid.push(DegradationSpec::Uniform { n });
    }
    // Random deletion rates 0%..90%.
    for i in 0..=9u64 {
        grid.push(DegradationSpec::Random {
            rate: i as f64 / 10.0,
            master_seed: dseed(i),
        });
    }
    // Block occlusion: identity plus the frame-rate-ladder rates.
    for (j, rate) in [0.0, 0.5, 2.0 / 3.0, 5.0 / 6.0, 0.9].into_iter().enumerate() {
        grid.push(DegradationSpec::Block {
            rate,
            master_seed: dseed(100 + j as u64),
        });
    }

    ExperimentConfig {
        version: CONFIG_VERSION,
        dataset: DatasetSource::Synthetic {
            spec: SyntheticSpec {
                num_classes: 8,
                samples_per_class: 40,
                joints: 6,
                min_frames: 50,
                max_frames: 120,
                jitter_sigma: 0.02,
                time_warp_strength: 0.5,
                fps: 30.0,
            },
        },
        split: SplitConfig {
            // Virtual subjects 1..10: odd train, even test.
            kind: SplitKind::CrossSubject,
            train_ids: vec![1, 3, 5, 7, 9],
            test_ids: vec![2, 4, 6, 8, 10],
            train_ids_file: None,
            test_ids_file: None,
        },
        grid,
        mitigation: MitigationMode::Both,
        arms: vec![
            ArmConfig {
                name: "raw-pad".into(),
                extractor: ExtractorSpec::RawResampled { target_len: 120 },
                preproc: Some(PreprocSpec {
                    kind: skelbench_core::preproc::PreprocKind::PadReplicate,
                    target_len: 120,
                }),
            },
            ArmConfig {
                name: "raw-resample".into(),
                extractor: ExtractorSpec::RawResampled { target_len: 64 },
                preproc: None,
            },
            ArmConfig {
                name: "logsig".into(),
                extractor: ExtractorSpec::WindowedLogsig {
                    w: 4,
                    m: 2,
                    time_augment: true,
                    projection_dim: Some(8),
                    projection_seed: mix64(master_seed ^ 0xBEEF),
                },
                preproc: None,
            },
        ],
        train: TrainConfig {
            learning_rate: 0.5,
            epochs: 300,
            batch_size: 0,
            l2_penalty: 1e-4,
            seed: mix64(master_seed ^ 0x7AB1E),
        },
        master_seed,
    }
}
