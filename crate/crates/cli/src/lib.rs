//! Command-line front end: experiment files, output directories, plots and
//! the compositionality audit.

pub mod audit;
pub mod config;
pub mod output;
pub mod plot;

pub use audit::{audit, default_replacement, AuditError, AuditReport, RowDelta, DEFAULT_THRESHOLD};
pub use config::{parse_config, parse_config_str, ConfigError, ConfigFile, ExperimentConfig, GameConfig};
pub use output::{run_experiment, Manifest, Outcome, RunOptions};
