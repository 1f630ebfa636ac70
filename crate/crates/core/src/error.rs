use thiserror::Error;

use crate::game::SpecViolation;
use crate::symbol::Symbol;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid game spec: {}", join_violations(.0))]
    InvalidSpec(Vec<SpecViolation>),

    #[error("context `{0}` has no positive weight")]
    DegenerateContext(String),

    #[error("reinforcement amount must be non-negative and finite, got {0}")]
    NegativeReinforcement(f64),

    #[error("symbol `{0}` already in use")]
    SymbolCollision(Symbol),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(Symbol),

    #[error("invalid symbol `{0}`: symbols must be non-empty and contain no `&`, `,`, quotes or whitespace")]
    InvalidSymbol(String),

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("temperature must be positive and finite, got {0}")]
    InvalidTemperature(f64),

    #[error("distribution is not normalized (sum = {sum})")]
    Unnormalized { sum: f64 },

    #[error("negative probability {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("prior probability is zero at index {0}; pointwise information is undefined")]
    UndefinedPrior(usize),

    #[error("unknown row label `{0}`")]
    UnknownLabel(String),

    #[error("signal does not match the game: {0}")]
    InvalidSignal(String),

    #[error("outcome space of {size} tuples exceeds the enumeration limit of {limit}")]
    EnumerationTooLarge { size: u128, limit: u128 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

fn join_violations(v: &[SpecViolation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
