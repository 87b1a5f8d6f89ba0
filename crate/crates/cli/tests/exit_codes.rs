//! End-to-end checks of the binary's exit-code contract by spawning the real
//! `skelbench` executable: 0 on success, 2 for configuration and usage
//! errors, 3 for data errors, and 4 for numeric failures.

use std::path::Path;
use std::process::{Command, Output};

use skelbench_cli::config::{DatasetSource, ExperimentConfig};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skelbench"))
        .args(args)
        .output()
        .expect("spawn skelbench")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// The shipped default config shrunk to a 4-class, 24-sample dataset with a
/// single arm, so spawned subcommands finish in well under a second.
fn small_config() -> ExperimentConfig {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let mut config =
        ExperimentConfig::load(&root.join("configs/default.json")).expect("default config");
    match &mut config.dataset {
        DatasetSource::Synthetic { spec } => {
            spec.num_classes = 4;
            spec.samples_per_class = 6;
            spec.joints = 3;
            spec.min_frames = 12;
            spec.max_frames = 16;
        }
        DatasetSource::Directory { .. } => unreachable!("default config is synthetic"),
    }
    config.arms.retain(|arm| arm.name == "raw-resample");
    config.grid.truncate(1);
    config.train.epochs = 3;
    config
}

#[test]
fn success_exits_zero() {
    let help = run(&["--help"]);
    assert_eq!(code(&help), 0, "--help should exit 0");

    let dir = tempfile::tempdir().expect("tempdir");
    let cfg_path = dir.path().join("small.json");
    small_config().save(&cfg_path).expect("save config");
    let out_dir = dir.path().join("samples");

    let out = run(&[
        "synth",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "synth failed: {}", stderr(&out));

    let written = std::fs::read_dir(&out_dir)
        .expect("read synth output dir")
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|ext| ext == "json"))
        .count();
    assert_eq!(written, 24, "expected one file per synthesized sample");
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().expect("tempdir");

    let missing = dir.path().join("does-not-exist.json");
    let out = run(&[
        "run",
        "--config",
        missing.to_str().unwrap(),
        "--out",
        dir.path().join("results.csv").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "missing config file should exit 2");
    assert!(stderr(&out).starts_with("error:"), "got: {}", stderr(&out));

    let malformed = dir.path().join("broken.json");
    std::fs::write(&malformed, "{ not json").expect("write malformed config");
    let out = run(&[
        "synth",
        "--config",
        malformed.to_str().unwrap(),
        "--out",
        dir.path().join("samples").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "malformed config JSON should exit 2");

    // clap rejects missing required arguments with the same usage exit code.
    let out = run(&["degrade"]);
    assert_eq!(code(&out), 2, "usage error should exit 2");
}

#[test]
fn data_errors_exit_three() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out = run(&[
        "degrade",
        "--input",
        dir.path().join("missing-sample.json").to_str().unwrap(),
        "--out",
        dir.path().join("degraded.json").to_str().unwrap(),
        "--kind",
        "uniform",
        "--n",
        "2",
    ]);
    assert_eq!(code(&out), 3, "unreadable sample should exit 3");
    assert!(stderr(&out).starts_with("error:"), "got: {}", stderr(&out));
}

#[test]
fn numeric_errors_exit_four() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg_path = dir.path().join("diverge.json");

    // A finite but absurd learning rate blows the weights up on the first
    // update; with an L2 term in the loss the next epoch's objective
    // overflows to infinity and training reports a numeric failure.
    let mut config = small_config();
    config.train.learning_rate = 1e300;
    config.train.l2_penalty = 1e-2;
    config.save(&cfg_path).expect("save config");

    let out = run(&[
        "train",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        dir.path().join("checkpoints").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4, "diverged training should exit 4");
    assert!(
        stderr(&out).contains("non-finite") || stderr(&out).contains("numeric"),
        "got: {}",
        stderr(&out)
    );
}
