//! Experiment files: `{"experiments": [ ... ]}`.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use urnsig_core::sim::{DEFAULT_SNAPSHOT_EVERY, DEFAULT_TOTAL_TURNS};
use urnsig_core::{
    make_atomic_game, make_two_sender_game, GameSpec, ReceiverConfig, ReplacementEvent,
    TrajectoryConfig,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: at `{field}`: {message}")]
    Parse {
        path: PathBuf,
        field: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("experiment `{experiment}`: {message}")]
    Invalid { experiment: String, message: String },
    #[error("no experiment named `{0}`")]
    UnknownExperiment(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiments: Vec<ExperimentConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GameConfig {
    /// Two senders with two messages each, four states and four acts.
    TwoSender {},
    /// One sender; `n` states, messages and acts.
    Atomic { n: usize },
    Custom { spec: GameSpec },
}

impl GameConfig {
    pub fn build(&self) -> urnsig_core::Result<GameSpec> {
        match self {
            GameConfig::TwoSender {} => Ok(make_two_sender_game()),
            GameConfig::Atomic { n } => make_atomic_game(*n),
            GameConfig::Custom { spec } => {
                spec.validate().map_err(urnsig_core::Error::InvalidSpec)?;
                Ok(spec.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub comment: String,
    pub game: GameConfig,
    pub receiver: ReceiverConfig,
    #[serde(default = "default_total_turns")]
    pub total_turns: u64,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: u64,
    #[serde(default)]
    pub events: Vec<ReplacementEvent>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_runs")]
    pub num_runs: usize,
    /// Defaults to `out/<name>`.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_plot")]
    pub plot: bool,
    #[serde(default = "default_initial_weight")]
    pub initial_weight: f64,
}

fn default_total_turns() -> u64 {
    DEFAULT_TOTAL_TURNS
}

fn default_snapshot_every() -> u64 {
    DEFAULT_SNAPSHOT_EVERY
}

fn default_runs() -> usize {
    1
}

fn default_plot() -> bool {
    true
}

fn default_initial_weight() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn trajectory(&self) -> urnsig_core::Result<TrajectoryConfig> {
        Ok(TrajectoryConfig {
            spec: self.game.build()?,
            receiver: self.receiver.clone(),
            total_turns: self.total_turns,
            snapshot_every: self.snapshot_every,
            events: self.events.clone(),
            seed: self.seed,
            initial_weight: self.initial_weight,
        })
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .unwrap_or_else(|| Path::new("out").join(&self.name))
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |message: String| ConfigError::Invalid {
            experiment: self.name.clone(),
            message,
        };
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(invalid("name must be non-empty ASCII letters, digits, `_` or `-`".into()));
        }
        if self.num_runs == 0 {
            return Err(invalid("num_runs must be at least 1".into()));
        }
        let trajectory = self.trajectory().map_err(|e| invalid(e.to_string()))?;
        trajectory.validate().map_err(|e| invalid(e.to_string()))
    }
}

/// Parses and validates an experiment file from text; `path` is only used
/// in diagnostics.
pub fn parse_config_str(text: &str, path: &Path) -> Result<Vec<ExperimentConfig>, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ConfigFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        ConfigError::Parse {
            path: path.to_path_buf(),
            field,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    let mut names = BTreeSet::new();
    for e in &file.experiments {
        if !names.insert(e.name.as_str()) {
            return Err(ConfigError::Invalid {
                experiment: e.name.clone(),
                message: "name used more than once".into(),
            });
        }
        e.validate()?;
    }
    Ok(file.experiments)
}

pub fn parse_config(path: &Path) -> Result<Vec<ExperimentConfig>, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text, path)
}
