use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reinforcement::{sample, ReinforcementTable, RngStream};
use crate::symbol::{state_key, Symbol};

/// A sender: one urn per state, holding one weight per message of its alphabet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sender {
    table: ReinforcementTable,
}

impl Sender {
    pub fn new(alphabet: Vec<Symbol>, initial_weight: f64) -> Result<Self> {
        Ok(Sender {
            table: ReinforcementTable::new(alphabet, initial_weight)?,
        })
    }

    pub fn from_table(table: ReinforcementTable) -> Self {
        Sender { table }
    }

    pub fn alphabet(&self) -> &[Symbol] {
        self.table.options()
    }

    pub fn table(&self) -> &ReinforcementTable {
        &self.table
    }

    pub fn table_mut(&mut self) -> &mut ReinforcementTable {
        &mut self.table
    }

    /// Probability of each message in `state`.
    pub fn distribution(&self, state: usize) -> Result<Vec<f64>> {
        self.table.proportional_distribution(&state_key(state))
    }

    /// Draws a message index for `state`.
    pub fn choose(&self, state: usize, rng: &mut RngStream) -> Result<usize> {
        Ok(sample(&self.distribution(state)?, rng))
    }

    pub fn reinforce(&mut self, state: usize, message: usize, amount: f64) -> Result<()> {
        self.table.reinforce(&state_key(state), message, amount)
    }

    /// Sends `new` wherever `old` would have been sent; weights carry over unchanged.
    pub fn replace_message(&mut self, old: &Symbol, new: &Symbol) -> Result<()> {
        if !self.alphabet().contains(old) {
            return Err(Error::UnknownSymbol(old.clone()));
        }
        self.table.relabel(old, new)
    }
}
