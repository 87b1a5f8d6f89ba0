//! Library surface of the benchmark CLI: configuration, the experiment
//! runner, results tables, and prediction-file scoring. The binary in
//! `main.rs` is a thin argument-parsing shell over these modules, so
//! integration tests drive the same code paths as the command line.

pub mod config;
pub mod error;
pub mod predictions;
pub mod runner;
pub mod table;

pub use config::{
    default_config, ArmConfig, DatasetSource, ExperimentConfig, MitigationMode, SplitConfig,
    CONFIG_VERSION,
};
pub use error::{CliError, Result, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC};
pub use predictions::{score_predictions, PredictionFile};
pub use runner::{
    checksum_sequences, load_dataset, load_directory, run_experiment, run_experiment_on,
    train_arms, PreparedDataset, RunOutput, TrainedArm,
};
pub use table::{diff_tables, filter_mitigated, PlotSeries, ResultsRow, ResultsTable, CSV_HEADER};
