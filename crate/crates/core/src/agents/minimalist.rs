use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reinforcement::{normalize, ReinforcementTable};
use crate::symbol::{act_label, CompoundSignal, ContextKey, Symbol};

use super::{require_complete, ReceiverPolicy};

/// Which score vector the tempered softmax is applied to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreScale {
    /// Summed urn weights. Temperatures are on the ball-count scale.
    #[default]
    Raw,
    /// Summed weights divided by their total, so scores lie in `[0, 1]`.
    Normalized,
}

/// `exp(x_j / T) / sum_i exp(x_i / T)`, evaluated with the maximum subtracted.
pub fn tempered_softmax(scores: &[f64], temperature: f64) -> Result<Vec<f64>> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::InvalidTemperature(temperature));
    }
    if let Some((index, &value)) = scores.iter().enumerate().find(|(_, x)| !x.is_finite()) {
        return Err(Error::NonFinite { index, value });
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|x| ((x - max) / temperature).exp()).collect();
    let total: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / total).collect())
}

/// Receiver with one urn per atomic message, choosing acts by a tempered
/// softmax over the summed weights of the received messages.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimalistReceiver {
    atomic: ReinforcementTable,
    temperature: f64,
    #[serde(default)]
    score_scale: ScoreScale,
}

impl MinimalistReceiver {
    pub fn new(
        num_acts: usize,
        initial_weight: f64,
        temperature: f64,
        score_scale: ScoreScale,
    ) -> Result<Self> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::InvalidTemperature(temperature));
        }
        Ok(MinimalistReceiver {
            atomic: ReinforcementTable::new((0..num_acts).map(act_label).collect(), initial_weight)?,
            temperature,
            score_scale,
        })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn score_scale(&self) -> ScoreScale {
        self.score_scale
    }

    pub fn table(&self) -> &ReinforcementTable {
        &self.atomic
    }

    pub fn table_mut(&mut self) -> &mut ReinforcementTable {
        &mut self.atomic
    }

    /// Per-act sum of the weights in every received message's urn.
    pub fn naive_scores(&self, signal: &CompoundSignal) -> Result<Vec<f64>> {
        require_complete(signal)?;
        let mut scores = vec![0.0; self.atomic.num_options()];
        for (_, message) in signal.present() {
            let weights = self.atomic.weights(&ContextKey::single(message.clone()));
            for (s, w) in scores.iter_mut().zip(weights) {
                *s += w;
            }
        }
        Ok(scores)
    }

    /// Choice probabilities proportional to the summed weights.
    pub fn naive_distribution(&self, signal: &CompoundSignal) -> Result<Vec<f64>> {
        let scores = self.naive_scores(signal)?;
        normalize(&scores).ok_or_else(|| Error::DegenerateContext(signal.to_string()))
    }
}

impl ReceiverPolicy for MinimalistReceiver {
    fn num_acts(&self) -> usize {
        self.atomic.num_options()
    }

    fn act_distribution(&self, signal: &CompoundSignal) -> Result<Vec<f64>> {
        let scores = match self.score_scale {
            ScoreScale::Raw => self.naive_scores(signal)?,
            ScoreScale::Normalized => self.naive_distribution(signal)?,
        };
        tempered_softmax(&scores, self.temperature)
    }

    /// Every received message's urn gains `reward` for `act`.
    fn learn(&mut self, signal: &CompoundSignal, act: usize, reward: f64) -> Result<()> {
        require_complete(signal)?;
        for (_, message) in signal.present() {
            self.atomic
                .reinforce(&ContextKey::single(message.clone()), act, reward)?;
        }
        Ok(())
    }

    fn introduce_message(&mut self, _slot: usize, new: &Symbol) -> Result<()> {
        // The urn for the new message is created on first reinforcement.
        if self.atomic.mentions(new) {
            return Err(Error::SymbolCollision(new.clone()));
        }
        Ok(())
    }

    fn atomic_distribution(&self, message: &Symbol) -> Option<Result<Vec<f64>>> {
        Some(
            self.atomic
                .proportional_distribution(&ContextKey::single(message.clone())),
        )
    }
}
