//! Batch experiment runner behind the `fockqkd` binary.

pub mod config;
pub mod run;

pub use config::{parse_config, ConfigError, ExperimentConfig, OutputFormat, ProtocolKind, Session};
pub use run::{attack_demo, export_kmax_grid, run_experiment, RunError, RunOutcome};
