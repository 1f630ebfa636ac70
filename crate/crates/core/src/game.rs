//! Game definitions: states, per-sender message alphabets, acts, prior and utility.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::{sym, CompoundSignal, Symbol};

/// Tolerance on the state prior summing to one.
pub const PRIOR_TOLERANCE: f64 = 1e-12;

/// A signaling game. Immutable once validated; cheap to share across runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    pub num_states: usize,
    /// One alphabet per sender. Symbols are unique across all senders.
    pub sender_alphabets: Vec<Vec<Symbol>>,
    pub num_acts: usize,
    pub state_prior: Vec<f64>,
    /// Reward indexed `[state][act]`.
    pub utility: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpecViolation {
    NoStates,
    NoActs,
    NoSenders,
    PriorLength { expected: usize, actual: usize },
    NegativePrior { state: usize, value: f64 },
    PriorNotNormalized { sum: f64 },
    EmptyAlphabet { sender: usize },
    DuplicateSymbol(Symbol),
    UtilityRows { expected: usize, actual: usize },
    UtilityColumns { state: usize, expected: usize, actual: usize },
    NonFiniteUtility { state: usize, act: usize },
}

impl fmt::Display for SpecViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecViolation::NoStates => write!(f, "game has no states"),
            SpecViolation::NoActs => write!(f, "game has no acts"),
            SpecViolation::NoSenders => write!(f, "game has no senders"),
            SpecViolation::PriorLength { expected, actual } => {
                write!(f, "state prior has {actual} entries, expected {expected}")
            }
            SpecViolation::NegativePrior { state, value } => {
                write!(f, "state prior entry {state} is negative ({value})")
            }
            SpecViolation::PriorNotNormalized { sum } => {
                write!(f, "state prior sums to {sum}, not 1")
            }
            SpecViolation::EmptyAlphabet { sender } => write!(f, "sender {sender} has no messages"),
            SpecViolation::DuplicateSymbol(s) => write!(f, "message symbol `{s}` is not unique"),
            SpecViolation::UtilityRows { expected, actual } => {
                write!(f, "utility has {actual} rows, expected {expected}")
            }
            SpecViolation::UtilityColumns { state, expected, actual } => {
                write!(f, "utility row {state} has {actual} columns, expected {expected}")
            }
            SpecViolation::NonFiniteUtility { state, act } => {
                write!(f, "utility entry ({state}, {act}) is not finite")
            }
        }
    }
}

impl GameSpec {
    /// Builds and validates a spec.
    pub fn new(
        num_states: usize,
        sender_alphabets: Vec<Vec<Symbol>>,
        num_acts: usize,
        state_prior: Vec<f64>,
        utility: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let spec = GameSpec {
            num_states,
            sender_alphabets,
            num_acts,
            state_prior,
            utility,
        };
        spec.validate().map_err(Error::InvalidSpec)?;
        Ok(spec)
    }

    /// Checks every structural invariant, collecting all violations.
    pub fn validate(&self) -> std::result::Result<(), Vec<SpecViolation>> {
        let mut out = Vec::new();
        if self.num_states == 0 {
            out.push(SpecViolation::NoStates);
        }
        if self.num_acts == 0 {
            out.push(SpecViolation::NoActs);
        }
        if self.sender_alphabets.is_empty() {
            out.push(SpecViolation::NoSenders);
        }

        if self.state_prior.len() != self.num_states {
            out.push(SpecViolation::PriorLength {
                expected: self.num_states,
                actual: self.state_prior.len(),
            });
        }
        for (state, &value) in self.state_prior.iter().enumerate() {
            if !(value >= 0.0) {
                out.push(SpecViolation::NegativePrior { state, value });
            }
        }
        let sum: f64 = self.state_prior.iter().sum();
        if !((sum - 1.0).abs() <= PRIOR_TOLERANCE) {
            out.push(SpecViolation::PriorNotNormalized { sum });
        }

        let mut seen = BTreeSet::new();
        for (sender, alphabet) in self.sender_alphabets.iter().enumerate() {
            if alphabet.is_empty() {
                out.push(SpecViolation::EmptyAlphabet { sender });
            }
            for s in alphabet {
                if !seen.insert(s.clone()) {
                    out.push(SpecViolation::DuplicateSymbol(s.clone()));
                }
            }
        }

        if self.utility.len() != self.num_states {
            out.push(SpecViolation::UtilityRows {
                expected: self.num_states,
                actual: self.utility.len(),
            });
        }
        for (state, row) in self.utility.iter().enumerate() {
            if row.len() != self.num_acts {
                out.push(SpecViolation::UtilityColumns {
                    state,
                    expected: self.num_acts,
                    actual: row.len(),
                });
            }
            for (act, u) in row.iter().enumerate() {
                if !u.is_finite() {
                    out.push(SpecViolation::NonFiniteUtility { state, act });
                }
            }
        }

        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    pub fn num_senders(&self) -> usize {
        self.sender_alphabets.len()
    }

    /// Sender slot owning `symbol`, if any.
    pub fn sender_of(&self, symbol: &Symbol) -> Option<usize> {
        self.sender_alphabets
            .iter()
            .position(|alphabet| alphabet.contains(symbol))
    }

    /// Highest-utility act for `state`; the first one on ties.
    pub fn optimal_act(&self, state: usize) -> usize {
        let row = &self.utility[state];
        let mut best = 0;
        for (a, &u) in row.iter().enumerate() {
            if u > row[best] {
                best = a;
            }
        }
        best
    }

    /// The act distribution induced by drawing a state from the prior and
    /// playing its optimal act. Uniform for the identity-utility games.
    pub fn optimal_act_prior(&self) -> Vec<f64> {
        let mut prior = vec![0.0; self.num_acts];
        for (s, &p) in self.state_prior.iter().enumerate() {
            prior[self.optimal_act(s)] += p;
        }
        prior
    }

    /// All complete signals, in alphabet order with sender 0 varying slowest.
    pub fn compound_signals(&self) -> Vec<CompoundSignal> {
        compound_signals(&self.sender_alphabets)
    }

    /// Number of `(state, signal, act)` outcomes.
    pub fn outcome_count(&self) -> u128 {
        self.sender_alphabets
            .iter()
            .fold(self.num_states as u128 * self.num_acts as u128, |acc, a| {
                acc.saturating_mul(a.len() as u128)
            })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("game spec serializes")
    }

    /// Parses and validates a spec from JSON.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GameSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        spec.validate().map_err(Error::InvalidSpec)?;
        Ok(spec)
    }
}

/// Cartesian product of the alphabets, earlier senders varying slowest.
pub fn compound_signals(alphabets: &[Vec<Symbol>]) -> Vec<CompoundSignal> {
    let mut out: Vec<Vec<Symbol>> = vec![Vec::new()];
    for alphabet in alphabets {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                alphabet.iter().map(move |m| {
                    let mut next = prefix.clone();
                    next.push(m.clone());
                    next
                })
            })
            .collect();
    }
    out.into_iter().map(CompoundSignal::complete).collect()
}

fn identity_utility(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|s| (0..n).map(|a| if s == a { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// One sender with `n` messages `m0..`, `n` equiprobable states, `n` acts, identity payoff.
pub fn make_atomic_game(n: usize) -> Result<GameSpec> {
    if n < 2 {
        return Err(Error::InvalidSpec(vec![SpecViolation::NoStates]));
    }
    GameSpec::new(
        n,
        vec![(0..n).map(|i| sym(&format!("m{i}"))).collect()],
        n,
        vec![1.0 / n as f64; n],
        identity_utility(n),
    )
}

/// Four equiprobable states, senders A (`mA0`, `mA1`) and B (`mB0`, `mB1`), four acts.
pub fn make_two_sender_game() -> GameSpec {
    GameSpec::new(
        4,
        vec![
            vec![sym("mA0"), sym("mA1")],
            vec![sym("mB0"), sym("mB1")],
        ],
        4,
        vec![0.25; 4],
        identity_utility(4),
    )
    .expect("two-sender game is valid")
}
