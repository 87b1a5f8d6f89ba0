//! `skelbench` — benchmark toolkit for measuring how skeletal action
//! classifiers degrade when frames go missing, and how much linear
//! interpolation of the gaps buys back.
//!
//! Every pipeline stage is its own subcommand so intermediate artifacts
//! (degraded sequences, feature tables, checkpoints, results tables) can
//! be produced, inspected, and fed back in from files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use skelbench_cli::config::{default_config, DatasetSource, ExperimentConfig};
use skelbench_cli::error::{CliError, Result};
use skelbench_cli::predictions::{score_predictions, PredictionFile};
use skelbench_cli::runner::{load_dataset, load_directory, run_experiment, train_arms};
use skelbench_cli::table::{diff_tables, filter_mitigated, ResultsTable};
use skelbench_core::canonical;
use skelbench_core::degrade::{apply_degradation, interpolate_missing, DegradationSpec, MaskSidecar};
use skelbench_core::synth::generate_synthetic;
use skelbench_model::{Checkpoint, CheckpointMetadata, ExtractorSpec, FeatureExtractor};

#[derive(Parser)]
#[command(
    name = "skelbench",
    about = "Degradation benchmark for skeletal action classification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DegradeKind {
    Uniform,
    Random,
    Block,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic dataset of a config into a directory of
    /// canonical JSON files.
    Synth {
        /// Experiment config; its dataset section must be synthetic.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Master seed when no config is given (uses the default config).
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Degrade one canonical sample file and write the result (plus an
    /// optional retention-mask sidecar).
    Degrade {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        kind: DegradeKind,
        /// Uniform stride (uniform kind only).
        #[arg(long)]
        n: Option<usize>,
        /// Deletion rate in [0, 0.95] (random/block kinds).
        #[arg(long)]
        rate: Option<f64>,
        /// Randomness root for random/block kinds.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Replace missing frames by linear interpolation instead of
        /// compacting.
        #[arg(long)]
        mitigate: bool,
        /// Where to write the retention-mask sidecar JSON.
        #[arg(long)]
        mask: Option<PathBuf>,
    },
    /// Extract feature vectors for every sample in a file or directory.
    Features {
        /// Canonical sample file or directory of them.
        #[arg(long)]
        input: PathBuf,
        /// JSON file holding an extractor spec.
        #[arg(long)]
        spec: PathBuf,
        /// Output CSV: sample_id,label,f0,f1,...
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one classifier per configured arm on the training split and
    /// save checkpoints.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Directory for `<arm>.checkpoint.json` files.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a checkpoint on the config's test split, optionally
    /// degraded first.
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, value_enum)]
        kind: Option<DegradeKind>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        mitigate: bool,
    },
    /// Run the full degradation-grid experiment of a config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Results table destination.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
        /// Also save per-arm checkpoints here.
        #[arg(long)]
        checkpoints: Option<PathBuf>,
    },
    /// Score an external prediction file against the config's test split.
    Score {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        config: PathBuf,
    },
    /// Validate and re-emit a results table (optionally as plot series).
    Report {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
        /// Emit per-curve (rate, accuracy) series JSON instead of rows.
        #[arg(long)]
        series: bool,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-key accuracy difference b - a of two results tables.
    Diff {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Keep only rows of `a` with this mitigated flag before diffing.
        #[arg(long)]
        mitigated_a: Option<bool>,
        /// Keep only rows of `b` with this mitigated flag before diffing.
        #[arg(long)]
        mitigated_b: Option<bool>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn base_dir(config_path: &Path) -> PathBuf {
    config_path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn build_degradation(
    kind: DegradeKind,
    n: Option<usize>,
    rate: Option<f64>,
    seed: u64,
) -> Result<DegradationSpec> {
    let spec = match kind {
        DegradeKind::Uniform => DegradationSpec::Uniform {
            n: n.ok_or_else(|| CliError::Config("uniform degradation needs --n".into()))?,
        },
        DegradeKind::Random => DegradationSpec::Random {
            rate: rate.ok_or_else(|| CliError::Config("random degradation needs --rate".into()))?,
            master_seed: seed,
        },
        DegradeKind::Block => DegradationSpec::Block {
            rate: rate.ok_or_else(|| CliError::Config("block degradation needs --rate".into()))?,
            master_seed: seed,
        },
    };
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(spec)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Data(format!("creating {}: {e}", parent.display())))?;
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::Data(format!("writing {}: {e}", path.display())))
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Synth { config, seed, out } => {
            let config = match config {
                Some(path) => ExperimentConfig::load(&path)?,
                None => default_config(seed),
            };
            let spec = match &config.dataset {
                DatasetSource::Synthetic { spec } => spec.clone(),
                DatasetSource::Directory { .. } => {
                    return Err(CliError::Config(
                        "config dataset is a directory; synth needs a synthetic spec".into(),
                    ))
                }
            };
            let samples = generate_synthetic(&spec, config.master_seed)
                .map_err(|e| CliError::Data(e.to_string()))?;
            std::fs::create_dir_all(&out)
                .map_err(|e| CliError::Data(format!("creating {}: {e}", out.display())))?;
            for seq in &samples {
                let text = canonical::write_json(seq).map_err(|e| CliError::Data(e.to_string()))?;
                write_text(&out.join(format!("{}.json", seq.sample_id)), &text)?;
            }
            println!("wrote {} samples to {}", samples.len(), out.display());
            Ok(())
        }
        Command::Degrade {
            input,
            out,
            kind,
            n,
            rate,
            seed,
            mitigate,
            mask,
        } => {
            let spec = build_degradation(kind, n, rate, seed)?;
            let seq = canonical::load_sequence(&input)
                .map_err(|e| CliError::Data(format!("{}: {e}", input.display())))?;
            let degraded =
                apply_degradation(&seq, &spec).map_err(|e| CliError::Data(e.to_string()))?;
            let result = if mitigate {
                interpolate_missing(&degraded)
            } else {
                degraded.compacted()
            };
            let text =
                canonical::write_json(&result).map_err(|e| CliError::Data(e.to_string()))?;
            write_text(&out, &text)?;
            if let Some(mask_path) = mask {
                let sidecar = MaskSidecar::new(&degraded, &spec);
                let mut text = serde_json::to_string_pretty(&sidecar)
                    .map_err(|e| CliError::Data(e.to_string()))?;
                text.push('\n');
                write_text(&mask_path, &text)?;
            }
            println!(
                "{}: kept {}/{} frames (realized rate {:.4})",
                seq.sample_id,
                degraded.mask.num_retained(),
                degraded.mask.original_length,
                degraded.mask.realized_rate()
            );
            Ok(())
        }
        Command::Features { input, spec, out } => {
            let text = std::fs::read_to_string(&spec)
                .map_err(|e| CliError::Config(format!("reading {}: {e}", spec.display())))?;
            let spec: ExtractorSpec = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("extractor spec: {e}")))?;
            let samples = if input.is_dir() {
                load_directory(&input)?
            } else {
                vec![canonical::load_sequence(&input)
                    .map_err(|e| CliError::Data(format!("{}: {e}", input.display())))?]
            };
            if samples.is_empty() {
                return Err(CliError::Data("no samples to extract from".into()));
            }
            let extractor = FeatureExtractor::new(spec, samples[0].frame_dim())
                .map_err(CliError::from)?;
            let mut csv = String::from("sample_id,label");
            for i in 0..extractor.feature_dim() {
                csv.push_str(&format!(",f{i}"));
            }
            csv.push('\n');
            for seq in &samples {
                let feats = extractor.extract(seq).map_err(CliError::from)?;
                csv.push_str(&format!("{},{}", seq.sample_id, seq.label));
                for v in feats {
                    csv.push_str(&format!(",{v:.12e}"));
                }
                csv.push('\n');
            }
            write_text(&out, &csv)?;
            println!(
                "wrote {} feature rows ({} features) to {}",
                samples.len(),
                extractor.feature_dim(),
                out.display()
            );
            Ok(())
        }
        Command::Train { config, out } => {
            let base = base_dir(&config);
            let config = ExperimentConfig::load(&config)?;
            let data = load_dataset(&config, &base)?;
            let arms = train_arms(&config, &data)?;
            std::fs::create_dir_all(&out)
                .map_err(|e| CliError::Data(format!("creating {}: {e}", out.display())))?;
            for arm in &arms {
                let meta = CheckpointMetadata {
                    final_loss: arm.report.final_loss(),
                    epochs_run: config.train.epochs,
                    train_samples: data.train.len(),
                    note: format!("arm {} on split {}", arm.config.name, data.split_name),
                };
                let ckpt = Checkpoint::from_pipeline(&arm.pipeline, &config.train, meta)
                    .map_err(CliError::from)?;
                let path = out.join(format!("{}.checkpoint.json", arm.config.name));
                ckpt.save(&path).map_err(CliError::from)?;
                println!(
                    "{}: final loss {:.6}, checkpoint {}",
                    arm.config.name,
                    arm.report.final_loss(),
                    path.display()
                );
            }
            Ok(())
        }
        Command::Eval {
            config,
            checkpoint,
            kind,
            n,
            rate,
            seed,
            mitigate,
        } => {
            let base = base_dir(&config);
            let config = ExperimentConfig::load(&config)?;
            let data = load_dataset(&config, &base)?;
            let (pipeline, _) = skelbench_model::load_pipeline(&checkpoint)
                .map_err(|e| CliError::from(e).context(&checkpoint.display().to_string()))?;
            let spec = match kind {
                Some(kind) => Some(build_degradation(kind, n, rate, seed)?),
                None => None,
            };
            let mut correct = 0usize;
            for seq in &data.test {
                let visible = match &spec {
                    Some(spec) => {
                        let degraded = apply_degradation(seq, spec)
                            .map_err(|e| CliError::Data(e.to_string()))?;
                        if mitigate {
                            interpolate_missing(&degraded)
                        } else {
                            degraded.compacted()
                        }
                    }
                    None => seq.clone(),
                };
                let (pred, _) = pipeline.predict(&visible).map_err(CliError::from)?;
                if pred == seq.label {
                    correct += 1;
                }
            }
            println!(
                "accuracy {}/{} ({:.4})",
                correct,
                data.test.len(),
                correct as f64 / data.test.len() as f64
            );
            Ok(())
        }
        Command::Run {
            config,
            out,
            format,
            checkpoints,
        } => {
            let base = base_dir(&config);
            let config = ExperimentConfig::load(&config)?;
            let output = run_experiment(&config, &base)?;
            let text = match format {
                OutputFormat::Csv => output.table.to_csv()?,
                OutputFormat::Json => output.table.to_json()?,
            };
            write_text(&out, &text)?;
            if let Some(dir) = checkpoints {
                std::fs::create_dir_all(&dir)
                    .map_err(|e| CliError::Data(format!("creating {}: {e}", dir.display())))?;
                for arm in &output.arms {
                    let meta = CheckpointMetadata {
                        final_loss: arm.report.final_loss(),
                        epochs_run: config.train.epochs,
                        train_samples: 0,
                        note: format!("arm {}", arm.config.name),
                    };
                    let ckpt = Checkpoint::from_pipeline(&arm.pipeline, &config.train, meta)
                        .map_err(CliError::from)?;
                    ckpt.save(&dir.join(format!("{}.checkpoint.json", arm.config.name)))
                        .map_err(CliError::from)?;
                }
            }
            println!(
                "wrote {} rows to {} (training checksum {})",
                output.table.rows.len(),
                out.display(),
                &output.training_checksum[..16]
            );
            Ok(())
        }
        Command::Score {
            predictions,
            config,
        } => {
            let base = base_dir(&config);
            let config = ExperimentConfig::load(&config)?;
            let data = load_dataset(&config, &base)?;
            let truth: BTreeMap<String, u32> = data
                .test
                .iter()
                .map(|s| (s.sample_id.clone(), s.label))
                .collect();
            let pred = PredictionFile::read(&predictions)?;
            let acc = score_predictions(&pred, &truth, data.num_classes)?;
            println!(
                "{}: accuracy {acc}",
                if pred.model.is_empty() {
                    "external"
                } else {
                    pred.model.as_str()
                }
            );
            Ok(())
        }
        Command::Report {
            table,
            format,
            series,
            out,
        } => {
            let parsed = ResultsTable::read_csv(&table)?;
            let text = if series {
                let mut text = serde_json::to_string_pretty(&parsed.plot_series()?)
                    .map_err(|e| CliError::Data(e.to_string()))?;
                text.push('\n');
                text
            } else {
                match format {
                    OutputFormat::Csv => parsed.to_csv()?,
                    OutputFormat::Json => parsed.to_json()?,
                }
            };
            match out {
                Some(path) => write_text(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Diff {
            a,
            b,
            mitigated_a,
            mitigated_b,
            out,
        } => {
            let mut left = ResultsTable::read_csv(&a)?;
            let mut right = ResultsTable::read_csv(&b)?;
            if let Some(flag) = mitigated_a {
                left = filter_mitigated(&left, flag);
            }
            if let Some(flag) = mitigated_b {
                right = filter_mitigated(&right, flag);
            }
            let delta = diff_tables(&left, &right)?;
            let text = delta.to_csv()?;
            match out {
                Some(path) => write_text(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}
