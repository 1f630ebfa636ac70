use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::reinforcement::ReinforcementTable;
use crate::symbol::{act_label, CompoundSignal, ContextKey, Symbol};

use super::{require_complete, ReceiverPolicy};

/// How urns for a newly introduced message are seeded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntroductionMode {
    /// One ball per act in every new urn: signals containing the new message start uninformative.
    #[default]
    Erasing,
    /// New urns copy (scaled by `alpha`) the urn of the same combination without the
    /// new message, so the new message starts independent of everything else.
    Preserving,
}

/// Receiver that reinforces every sub-combination of the received signal.
///
/// `combo_counts` counts how often each message combination has been received.
/// `act_counts` holds, per combination, the reward gathered by each act. The
/// unconditional urns (no message) are kept in `act_marginal` and `observations`.
/// Acts are chosen from the urn of the full received combination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralistReceiver {
    #[serde(with = "combo_map")]
    combo_counts: BTreeMap<ContextKey, f64>,
    act_counts: ReinforcementTable,
    act_marginal: Vec<f64>,
    observations: f64,
    /// Sender slot of every message seen so far.
    symbol_slots: BTreeMap<Symbol, usize>,
    mode: IntroductionMode,
    alpha: f64,
}

impl GeneralistReceiver {
    pub fn new(num_acts: usize, initial_weight: f64, mode: IntroductionMode, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "preserving scale must be positive, got {alpha}"
            )));
        }
        Ok(GeneralistReceiver {
            combo_counts: BTreeMap::new(),
            act_counts: ReinforcementTable::new((0..num_acts).map(act_label).collect(), initial_weight)?,
            act_marginal: vec![initial_weight; num_acts],
            observations: 0.0,
            symbol_slots: BTreeMap::new(),
            mode,
            alpha,
        })
    }

    pub fn mode(&self) -> IntroductionMode {
        self.mode
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn combo_count(&self, combo: &ContextKey) -> f64 {
        if combo.is_empty() {
            return self.observations;
        }
        self.combo_counts.get(combo).copied().unwrap_or(0.0)
    }

    pub fn combo_counts(&self) -> &BTreeMap<ContextKey, f64> {
        &self.combo_counts
    }

    /// Act urn of `combo`; the empty combination is the unconditional act urn.
    pub fn act_weights(&self, combo: &ContextKey) -> Vec<f64> {
        if combo.is_empty() {
            return self.act_marginal.clone();
        }
        self.act_counts.weights(combo)
    }

    pub fn act_counts(&self) -> &ReinforcementTable {
        &self.act_counts
    }

    /// Sets the act urn of a combination directly, registering each
    /// message's sender slot. `messages` pairs slot index with symbol.
    pub fn set_act_weights(&mut self, messages: &[(usize, Symbol)], weights: Vec<f64>) -> Result<()> {
        let key = self.register(messages);
        if key.is_empty() {
            if weights.len() != self.act_marginal.len() {
                return Err(Error::ShapeMismatch {
                    expected: self.act_marginal.len(),
                    actual: weights.len(),
                });
            }
            self.act_marginal = weights;
            return Ok(());
        }
        self.act_counts.set_weights(key, weights)
    }

    fn register(&mut self, messages: &[(usize, Symbol)]) -> ContextKey {
        let mut sorted = messages.to_vec();
        sorted.sort_by_key(|(slot, _)| *slot);
        for (slot, s) in &sorted {
            self.symbol_slots.insert(s.clone(), *slot);
        }
        ContextKey::new(sorted.into_iter().map(|(_, s)| s).collect())
    }

    /// Counts the reception of `signal` in the urn of every sub-combination.
    pub fn observe(&mut self, signal: &CompoundSignal) -> Result<()> {
        require_complete(signal)?;
        for (slot, s) in signal.present() {
            if !self.symbol_slots.contains_key(s) {
                self.symbol_slots.insert(s.clone(), slot);
            }
        }
        for combo in signal.sub_combinations() {
            *self.combo_counts.entry(combo).or_insert(0.0) += 1.0;
        }
        self.observations += 1.0;
        Ok(())
    }

    /// Adds `reward` for `act` to the urn of every sub-combination of `signal`.
    pub fn reinforce(&mut self, signal: &CompoundSignal, act: usize, reward: f64) -> Result<()> {
        require_complete(signal)?;
        if !(reward >= 0.0 && reward.is_finite()) {
            return Err(Error::NegativeReinforcement(reward));
        }
        if reward == 0.0 {
            return Ok(());
        }
        for combo in signal.sub_combinations() {
            self.act_counts.reinforce(&combo, act, reward)?;
        }
        self.act_marginal[act] += reward;
        Ok(())
    }

    fn mentions(&self, symbol: &Symbol) -> bool {
        self.symbol_slots.contains_key(symbol)
            || self.act_counts.mentions(symbol)
            || self.combo_counts.keys().any(|k| k.contains(symbol))
    }

    /// Creates the urns for a new message from sender `slot`.
    ///
    /// Every existing combination without a message from `slot` (including the
    /// empty one) gets a counterpart extended by `new`, seeded per `mode`.
    pub fn introduce_with_mode(&mut self, slot: usize, new: &Symbol, mode: IntroductionMode) -> Result<()> {
        if self.mentions(new) {
            return Err(Error::SymbolCollision(new.clone()));
        }
        let slot_of = |s: &Symbol| self.symbol_slots.get(s).copied();

        let mut bases: BTreeSet<ContextKey> = self.combo_counts.keys().cloned().collect();
        bases.extend(self.act_counts.contexts().cloned());
        bases.insert(ContextKey::default());
        let bases: Vec<ContextKey> = bases
            .into_iter()
            .filter(|k| k.parts().iter().all(|s| slot_of(s) != Some(slot)))
            .collect();

        let mut new_combos = Vec::with_capacity(bases.len());
        let mut new_acts = Vec::with_capacity(bases.len());
        for base in &bases {
            let mut parts: Vec<(usize, Symbol)> = base
                .parts()
                .iter()
                .map(|s| (slot_of(s).unwrap_or(usize::MAX), s.clone()))
                .collect();
            parts.push((slot, new.clone()));
            parts.sort_by_key(|(slot, _)| *slot);
            let key = ContextKey::new(parts.into_iter().map(|(_, s)| s).collect());

            let (count, weights) = match mode {
                IntroductionMode::Erasing => (
                    1.0,
                    vec![self.act_counts.initial_weight(); self.act_counts.num_options()],
                ),
                IntroductionMode::Preserving => (
                    self.alpha * self.combo_count(base),
                    self.act_weights(base).into_iter().map(|w| self.alpha * w).collect(),
                ),
            };
            new_combos.push((key.clone(), count));
            new_acts.push((key, weights));
        }

        for (key, count) in new_combos {
            self.combo_counts.insert(key, count);
        }
        for (key, weights) in new_acts {
            self.act_counts.set_weights(key, weights)?;
        }
        self.symbol_slots.insert(new.clone(), slot);
        Ok(())
    }

    /// Checks that no single-message urn holds less reward for an act than a
    /// larger combination containing that message.
    pub fn is_consistent(&self) -> bool {
        self.act_counts.entries().all(|(key, weights)| {
            key.len() < 2
                || key.parts().iter().all(|s| {
                    let single = self.act_counts.weights(&ContextKey::single(s.clone()));
                    single.iter().zip(weights).all(|(a, b)| a >= b)
                })
        })
    }
}

impl ReceiverPolicy for GeneralistReceiver {
    fn num_acts(&self) -> usize {
        self.act_counts.num_options()
    }

    fn act_distribution(&self, signal: &CompoundSignal) -> Result<Vec<f64>> {
        require_complete(signal)?;
        self.act_counts.proportional_distribution(&signal.key())
    }

    fn learn(&mut self, signal: &CompoundSignal, act: usize, reward: f64) -> Result<()> {
        self.observe(signal)?;
        self.reinforce(signal, act, reward)
    }

    fn introduce_message(&mut self, slot: usize, new: &Symbol) -> Result<()> {
        self.introduce_with_mode(slot, new, self.mode)
    }

    fn atomic_distribution(&self, message: &Symbol) -> Option<Result<Vec<f64>>> {
        Some(
            self.act_counts
                .proportional_distribution(&ContextKey::single(message.clone())),
        )
    }
}

mod combo_map {
    use super::*;

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<ContextKey, f64>,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let repr: BTreeMap<String, f64> = map.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        repr.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<BTreeMap<ContextKey, f64>, D::Error> {
        let repr = BTreeMap::<String, f64>::deserialize(deserializer)?;
        repr.into_iter()
            .map(|(k, v)| {
                ContextKey::parse(&k)
                    .map(|k| (k, v))
                    .map_err(serde::de::Error::custom)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::sym;
    use proptest::prelude::*;

    fn sig(a: &str, b: &str) -> CompoundSignal {
        CompoundSignal::complete(vec![sym(a), sym(b)])
    }

    fn key(s: &str) -> ContextKey {
        ContextKey::parse(s).unwrap()
    }

    fn fresh(mode: IntroductionMode) -> GeneralistReceiver {
        GeneralistReceiver::new(4, 1.0, mode, 1.0).unwrap()
    }

    /// Converged two-sender receiver with exact zeros, as in a learned signaling system.
    fn converged(mode: IntroductionMode, n: f64) -> GeneralistReceiver {
        let mut r = fresh(mode);
        let pairs = [("mA0", "mB0"), ("mA0", "mB1"), ("mA1", "mB0"), ("mA1", "mB1")];
        let mut single: BTreeMap<(usize, &str), Vec<f64>> = BTreeMap::new();
        for (act, (a, b)) in pairs.iter().enumerate() {
            let mut w = vec![0.0; 4];
            w[act] = n;
            r.set_act_weights(&[(0, sym(a)), (1, sym(b))], w).unwrap();
            single.entry((0, a)).or_insert_with(|| vec![0.0; 4])[act] += n;
            single.entry((1, b)).or_insert_with(|| vec![0.0; 4])[act] += n;
        }
        for ((slot, s), w) in single {
            r.set_act_weights(&[(slot, sym(s))], w).unwrap();
        }
        r.set_act_weights(&[], vec![n; 4]).unwrap();
        r
    }

    #[test]
    fn observe_counts_every_sub_combination() {
        let mut r = fresh(IntroductionMode::Erasing);
        r.observe(&sig("mA0", "mB0")).unwrap();
        assert_eq!(r.combo_count(&key("mA0")), 1.0);
        assert_eq!(r.combo_count(&key("mB0")), 1.0);
        assert_eq!(r.combo_count(&key("mA0&mB0")), 1.0);

        r.observe(&sig("mA0", "mB0")).unwrap();
        assert_eq!(r.combo_count(&key("mA0")), 2.0);
        assert_eq!(r.combo_count(&key("mB0")), 2.0);
        assert_eq!(r.combo_count(&key("mA0&mB0")), 2.0);
    }

    #[test]
    fn observe_is_additive_across_signals() {
        let mut r = fresh(IntroductionMode::Erasing);
        r.observe(&sig("mA0", "mB0")).unwrap();
        r.observe(&sig("mA0", "mB1")).unwrap();
        assert_eq!(r.combo_count(&key("mA0")), 2.0);
        assert_eq!(r.combo_count(&key("mA0&mB0")), 1.0);
        assert_eq!(r.combo_count(&key("mA0&mB1")), 1.0);
    }

    #[test]
    fn reward_reinforces_three_urns() {
        let mut r = fresh(IntroductionMode::Erasing);
        r.reinforce(&sig("mA0", "mB0"), 0, 1.0).unwrap();
        assert_eq!(r.act_weights(&key("mA0")), vec![2.0, 1.0, 1.0, 1.0]);
        assert_eq!(r.act_weights(&key("mB0")), vec![2.0, 1.0, 1.0, 1.0]);
        assert_eq!(r.act_weights(&key("mA0&mB0")), vec![2.0, 1.0, 1.0, 1.0]);
        assert_eq!(r.act_counts().contexts().count(), 3);
    }

    #[test]
    fn zero_reward_changes_only_observation_counts() {
        let mut r = fresh(IntroductionMode::Erasing);
        let before = r.act_counts().clone();
        r.reinforce(&sig("mA0", "mB0"), 0, 0.0).unwrap();
        assert_eq!(r.act_counts(), &before);
        r.learn(&sig("mA0", "mB0"), 3, 0.0).unwrap();
        assert_eq!(r.act_counts(), &before);
        assert_eq!(r.combo_count(&key("mA0&mB0")), 1.0);
    }

    #[test]
    fn act_distribution_examples() {
        let mut r = fresh(IntroductionMode::Erasing);
        assert_eq!(r.act_distribution(&sig("mA0", "mB0")).unwrap(), vec![0.25; 4]);
        r.set_act_weights(&[(0, sym("mA0")), (1, sym("mB0"))], vec![3.0, 1.0, 0.0, 0.0])
            .unwrap();
        assert_eq!(
            r.act_distribution(&sig("mA0", "mB0")).unwrap(),
            vec![0.75, 0.25, 0.0, 0.0]
        );
        let mut trained = fresh(IntroductionMode::Erasing);
        for _ in 0..1000 {
            trained.learn(&sig("mA1", "mB0"), 2, 1.0).unwrap();
        }
        assert!(trained.act_distribution(&sig("mA1", "mB0")).unwrap()[2] >= 0.99);
    }

    #[test]
    fn erasing_introduction_makes_new_signals_uniform() {
        let mut r = converged(IntroductionMode::Erasing, 1000.0);
        r.introduce_message(1, &sym("mB?")).unwrap();
        assert_eq!(r.act_distribution(&sig("mA0", "mB?")).unwrap(), vec![0.25; 4]);
        assert_eq!(r.combo_count(&key("mA0&mB?")), 1.0);
        assert_eq!(r.act_weights(&key("mB?")), vec![1.0; 4]);
        // Untouched signals keep their urns.
        assert_eq!(r.act_distribution(&sig("mA0", "mB1")).unwrap(), vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn preserving_introduction_copies_partial_information() {
        let mut r = converged(IntroductionMode::Preserving, 1000.0);
        let before = r.act_counts().proportional_distribution(&key("mA0")).unwrap();
        r.introduce_message(1, &sym("mB?")).unwrap();
        assert_eq!(r.act_distribution(&sig("mA0", "mB?")).unwrap(), before);
        assert_eq!(before, vec![0.5, 0.5, 0.0, 0.0]);
        // The new singleton is as informative as no message at all.
        assert_eq!(r.act_weights(&key("mB?")), r.act_weights(&ContextKey::default()));
        // No combination pairs the new message with another message of its own sender.
        assert!(!r.act_counts().contains_context(&key("mB0&mB?")));
        assert!(!r.act_counts().contains_context(&key("mA0&mB0&mB?")));
    }

    #[test]
    fn preserving_scale_keeps_conditionals() {
        let mut r = converged(IntroductionMode::Preserving, 1000.0);
        r.alpha = 0.01;
        r.observe(&sig("mA0", "mB1")).unwrap();
        r.introduce_message(1, &sym("mB?")).unwrap();
        assert_eq!(r.act_weights(&key("mA0&mB?")), vec![10.0, 10.0, 0.0, 0.0]);
        assert_eq!(r.combo_count(&key("mA0&mB?")), 0.01);
        let p = r.act_distribution(&sig("mA0", "mB?")).unwrap();
        assert!((p[0] - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn introduction_collision() {
        let mut r = converged(IntroductionMode::Erasing, 10.0);
        assert!(matches!(
            r.introduce_message(1, &sym("mA0")),
            Err(Error::SymbolCollision(_))
        ));
    }

    #[test]
    fn invalid_alpha_is_rejected() {
        assert!(GeneralistReceiver::new(4, 1.0, IntroductionMode::Preserving, 0.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut r = converged(IntroductionMode::Preserving, 7.5);
        r.observe(&sig("mA1", "mB1")).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: GeneralistReceiver = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    proptest! {
        #[test]
        fn single_urns_dominate_combinations(
            turns in prop::collection::vec((0usize..2, 0usize..2, 0usize..4, prop::bool::ANY), 0..200),
            introduce_at in 0usize..200,
            preserving in prop::bool::ANY,
        ) {
            let mode = if preserving { IntroductionMode::Preserving } else { IntroductionMode::Erasing };
            let mut r = fresh(mode);
            let mut b0 = "mB0";
            for (i, (a, b, act, rewarded)) in turns.into_iter().enumerate() {
                if i == introduce_at {
                    r.introduce_message(1, &sym("mB?")).unwrap();
                    b0 = "mB?";
                }
                let a = ["mA0", "mA1"][a];
                let b = [b0, "mB1"][b];
                r.learn(&sig(a, b), act, if rewarded { 1.0 } else { 0.0 }).unwrap();
                prop_assert!(r.is_consistent());
                let d = r.act_distribution(&sig(a, b)).unwrap();
                prop_assert!((d.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            }
        }
    }
}
