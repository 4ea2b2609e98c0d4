//! Experiment runner behind the `latnc` command: JSON configs in, CSV or
//! JSON result rows out.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod presets;

pub use config::{parse_config, ExperimentConfig, LatticeKind, Scheme, SnrAxis};
pub use error::{CliError, Result};
pub use experiment::{run_experiment, run_experiment_with};
pub use output::{read_csv, render, write_results, Format, ResultRow, COLUMNS};
