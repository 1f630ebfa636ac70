use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reinforcement::ReinforcementTable;
use crate::symbol::{act_label, CompoundSignal, Symbol};

use super::{require_complete, ReceiverPolicy};

/// Receiver with one urn per complete compound signal.
///
/// Compound keys are opaque: learning on `mA0&mB0` never informs `mA0&mB1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConventionalReceiver {
    table: ReinforcementTable,
}

impl ConventionalReceiver {
    pub fn new(num_acts: usize, initial_weight: f64) -> Result<Self> {
        Ok(ConventionalReceiver {
            table: ReinforcementTable::new((0..num_acts).map(act_label).collect(), initial_weight)?,
        })
    }

    pub fn table(&self) -> &ReinforcementTable {
        &self.table
    }

    pub fn table_mut(&mut self) -> &mut ReinforcementTable {
        &mut self.table
    }
}

impl ReceiverPolicy for ConventionalReceiver {
    fn num_acts(&self) -> usize {
        self.table.num_options()
    }

    fn act_distribution(&self, signal: &CompoundSignal) -> Result<Vec<f64>> {
        require_complete(signal)?;
        self.table.proportional_distribution(&signal.key())
    }

    fn learn(&mut self, signal: &CompoundSignal, act: usize, reward: f64) -> Result<()> {
        require_complete(signal)?;
        self.table.reinforce(&signal.key(), act, reward)
    }

    fn introduce_message(&mut self, _slot: usize, new: &Symbol) -> Result<()> {
        // Nothing is learned about the new symbol until it arrives.
        if self.table.mentions(new) {
            return Err(Error::SymbolCollision(new.clone()));
        }
        Ok(())
    }

    fn atomic_distribution(&self, _message: &Symbol) -> Option<Result<Vec<f64>>> {
        None
    }
}
