//! Urn reinforcement: keyed weight tables, proportional choice and the seeded random stream.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::symbol::{ContextKey, Symbol};

/// Weight every option starts with, one ball per option.
pub const DEFAULT_INITIAL_WEIGHT: f64 = 1.0;

/// A collection of urns. Each context key owns one weight per option.
///
/// Contexts that were never reinforced behave as if every option carried
/// `initial_weight`; they are materialized the first time they are written.
#[derive(Clone, Debug, PartialEq)]
pub struct ReinforcementTable {
    options: Vec<Symbol>,
    initial_weight: f64,
    entries: BTreeMap<ContextKey, Vec<f64>>,
}

impl ReinforcementTable {
    pub fn new(options: Vec<Symbol>, initial_weight: f64) -> Result<Self> {
        if !(initial_weight >= 0.0 && initial_weight.is_finite()) {
            return Err(Error::NegativeReinforcement(initial_weight));
        }
        Ok(ReinforcementTable {
            options,
            initial_weight,
            entries: BTreeMap::new(),
        })
    }

    pub fn options(&self) -> &[Symbol] {
        &self.options
    }

    pub fn num_options(&self) -> usize {
        self.options.len()
    }

    pub fn initial_weight(&self) -> f64 {
        self.initial_weight
    }

    pub fn option_index(&self, option: &Symbol) -> Option<usize> {
        self.options.iter().position(|o| o == option)
    }

    /// Materialized contexts in key order.
    pub fn contexts(&self) -> impl Iterator<Item = &ContextKey> {
        self.entries.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ContextKey, &[f64])> {
        self.entries.iter().map(|(k, w)| (k, w.as_slice()))
    }

    pub fn contains_context(&self, context: &ContextKey) -> bool {
        self.entries.contains_key(context)
    }

    /// Current weights of `context`, falling back to the initial weights.
    pub fn weights(&self, context: &ContextKey) -> Vec<f64> {
        match self.entries.get(context) {
            Some(w) => w.clone(),
            None => vec![self.initial_weight; self.options.len()],
        }
    }

    /// Overwrites the weights of one context.
    pub fn set_weights(&mut self, context: ContextKey, weights: Vec<f64>) -> Result<()> {
        if weights.len() != self.options.len() {
            return Err(Error::ShapeMismatch {
                expected: self.options.len(),
                actual: weights.len(),
            });
        }
        if let Some(&w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::NegativeReinforcement(w));
        }
        self.entries.insert(context, weights);
        Ok(())
    }

    fn materialize(&mut self, context: &ContextKey) -> &mut Vec<f64> {
        if !self.entries.contains_key(context) {
            self.entries
                .insert(context.clone(), vec![self.initial_weight; self.options.len()]);
        }
        self.entries.get_mut(context).expect("just inserted")
    }

    /// Choice probabilities proportional to the weights of `context`.
    pub fn proportional_distribution(&self, context: &ContextKey) -> Result<Vec<f64>> {
        match self.entries.get(context) {
            Some(w) => normalize(w).ok_or_else(|| Error::DegenerateContext(context.to_string())),
            None => {
                if self.initial_weight > 0.0 && !self.options.is_empty() {
                    let n = self.options.len();
                    Ok(vec![1.0 / n as f64; n])
                } else {
                    Err(Error::DegenerateContext(context.to_string()))
                }
            }
        }
    }

    /// Adds `amount` to one option's weight in `context`.
    ///
    /// A zero amount leaves the table untouched, including not materializing
    /// an unseen context.
    pub fn reinforce(&mut self, context: &ContextKey, option: usize, amount: f64) -> Result<()> {
        if !(amount >= 0.0 && amount.is_finite()) {
            return Err(Error::NegativeReinforcement(amount));
        }
        if option >= self.options.len() {
            return Err(Error::ShapeMismatch {
                expected: self.options.len(),
                actual: option + 1,
            });
        }
        if amount == 0.0 {
            return Ok(());
        }
        self.materialize(context)[option] += amount;
        Ok(())
    }

    /// Renames `old` to `new` in option labels and context keys, keeping every weight.
    ///
    /// Renaming a symbol the table has never seen is a no-op.
    pub fn relabel(&mut self, old: &Symbol, new: &Symbol) -> Result<()> {
        if old == new {
            return Ok(());
        }
        if self.mentions(new) {
            return Err(Error::SymbolCollision(new.clone()));
        }
        for o in &mut self.options {
            if o == old {
                *o = new.clone();
            }
        }
        if self.entries.keys().any(|k| k.contains(old)) {
            let entries = std::mem::take(&mut self.entries);
            self.entries = entries
                .into_iter()
                .map(|(mut k, w)| {
                    k.rename(old, new);
                    (k, w)
                })
                .collect();
        }
        Ok(())
    }

    /// Whether `symbol` appears as an option or inside any context key.
    pub fn mentions(&self, symbol: &Symbol) -> bool {
        self.options.contains(symbol) || self.entries.keys().any(|k| k.contains(symbol))
    }
}

/// Divides by the sum; `None` when the sum is not positive.
pub fn normalize(weights: &[f64]) -> Option<Vec<f64>> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return None;
    }
    Some(weights.iter().map(|w| w / total).collect())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableRepr {
    initial_weight: f64,
    options: Vec<Symbol>,
    entries: BTreeMap<String, BTreeMap<Symbol, f64>>,
}

impl Serialize for ReinforcementTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self
            .entries
            .iter()
            .map(|(k, w)| {
                let row = self.options.iter().cloned().zip(w.iter().copied()).collect();
                (k.to_string(), row)
            })
            .collect();
        TableRepr {
            initial_weight: self.initial_weight,
            options: self.options.clone(),
            entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ReinforcementTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = TableRepr::deserialize(deserializer)?;
        let mut table =
            ReinforcementTable::new(repr.options, repr.initial_weight).map_err(D::Error::custom)?;
        for (key, row) in repr.entries {
            let context = ContextKey::parse(&key).map_err(D::Error::custom)?;
            if row.len() != table.options.len() {
                return Err(D::Error::custom(format!(
                    "context `{key}` has {} options, expected {}",
                    row.len(),
                    table.options.len()
                )));
            }
            let weights = table
                .options
                .iter()
                .map(|o| {
                    row.get(o).copied().ok_or_else(|| {
                        D::Error::custom(format!("context `{key}` is missing option `{o}`"))
                    })
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            table
                .set_weights(context, weights)
                .map_err(D::Error::custom)?;
        }
        Ok(table)
    }
}

/// Deterministic random stream. The same seed yields the same draws on every platform.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// One uniform draw from `[0, 1)`.
    pub fn next_unit(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }
}

/// Draws an index with probability `distribution[i]`, consuming exactly one draw.
pub fn sample(distribution: &[f64], rng: &mut RngStream) -> usize {
    let u = rng.next_unit();
    let mut cumulative = 0.0;
    for (i, &p) in distribution.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return i;
        }
    }
    // Rounding left the cumulative sum just under u: take the last positive entry.
    distribution
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(distribution.len().saturating_sub(1))
}
