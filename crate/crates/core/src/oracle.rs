//! Brute-force enumeration of every (state, signal, act) outcome.
//!
//! Shares no arithmetic with [`crate::infotheory`]; tests compare the two.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::infotheory::PolicySnapshot;
use crate::symbol::CompoundSignal;

/// Largest outcome space [`enumerate_outcomes`] accepts.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub state: usize,
    pub signal: CompoundSignal,
    pub act: usize,
    pub probability: f64,
    pub reward: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeEnumeration {
    pub outcomes: Vec<Outcome>,
    pub num_states: usize,
    pub num_acts: usize,
    /// Fixed act prior carried over from the snapshot, if any.
    pub act_prior: Option<Vec<f64>>,
}

/// States are weighted by the snapshot's prior; the game supplies rewards.
pub fn enumerate_outcomes(spec: &GameSpec, snapshot: &PolicySnapshot) -> Result<OutcomeEnumeration> {
    let size = spec.outcome_count();
    if size > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            size,
            limit: ENUMERATION_LIMIT,
        });
    }
    if snapshot.state_prior.len() != spec.num_states {
        return Err(Error::ShapeMismatch {
            expected: spec.num_states,
            actual: snapshot.state_prior.len(),
        });
    }
    let receiver: BTreeMap<String, &Vec<f64>> = snapshot
        .receiver
        .iter()
        .map(|r| (r.signal.to_string(), &r.acts))
        .collect();

    let mut outcomes = Vec::with_capacity(size as usize);
    for state in 0..spec.num_states {
        let mut partial: Vec<(Vec<usize>, f64)> = vec![(Vec::new(), snapshot.state_prior[state])];
        for sender in &snapshot.senders {
            let mut next = Vec::new();
            for (messages, p) in &partial {
                for (m, sigma) in sender.conditionals[state].iter().enumerate() {
                    let mut extended = messages.clone();
                    extended.push(m);
                    next.push((extended, p * sigma));
                }
            }
            partial = next;
        }
        for (messages, p) in partial {
            let signal = CompoundSignal::complete(
                messages
                    .iter()
                    .zip(&snapshot.senders)
                    .map(|(&m, s)| s.alphabet[m].clone())
                    .collect(),
            );
            let acts = receiver
                .get(&signal.to_string())
                .ok_or_else(|| Error::UnknownLabel(signal.to_string()))?;
            for act in 0..spec.num_acts {
                outcomes.push(Outcome {
                    state,
                    signal: signal.clone(),
                    act,
                    probability: p * acts[act],
                    reward: spec.utility[state][act],
                });
            }
        }
    }
    Ok(OutcomeEnumeration {
        outcomes,
        num_states: spec.num_states,
        num_acts: spec.num_acts,
        act_prior: snapshot.act_prior.clone(),
    })
}

pub fn oracle_expected_payoff(e: &OutcomeEnumeration) -> f64 {
    e.outcomes.iter().map(|o| o.probability * o.reward).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleMetrics {
    pub expected_payoff: f64,
    /// Probability of each complete signal, keyed by its text.
    pub signal_marginal: BTreeMap<String, f64>,
    /// I(states; signals).
    pub state_signal_mutual_info: f64,
    /// I(signals; acts).
    pub signal_act_mutual_info: f64,
    /// Signal-weighted divergence of act conditionals from the act prior.
    pub receiver_average_info: f64,
}

fn log2(x: f64) -> f64 {
    x.ln() / std::f64::consts::LN_2
}

fn mi_from_pairs(pairs: &BTreeMap<(usize, String), f64>, left: &[f64], right: &BTreeMap<String, f64>) -> f64 {
    let mut total = 0.0;
    for ((l, r), &p) in pairs {
        if p > 0.0 {
            total += p * log2(p / (left[*l] * right[r]));
        }
    }
    total
}

pub fn oracle_metrics(e: &OutcomeEnumeration) -> OracleMetrics {
    let mut signal_marginal: BTreeMap<String, f64> = BTreeMap::new();
    let mut state_marginal = vec![0.0; e.num_states];
    let mut act_marginal = vec![0.0; e.num_acts];
    let mut state_signal: BTreeMap<(usize, String), f64> = BTreeMap::new();
    let mut act_signal: BTreeMap<(usize, String), f64> = BTreeMap::new();

    for o in &e.outcomes {
        let key = o.signal.to_string();
        *signal_marginal.entry(key.clone()).or_default() += o.probability;
        state_marginal[o.state] += o.probability;
        act_marginal[o.act] += o.probability;
        *state_signal.entry((o.state, key.clone())).or_default() += o.probability;
        *act_signal.entry((o.act, key)).or_default() += o.probability;
    }

    let prior = e.act_prior.clone().unwrap_or_else(|| act_marginal.clone());
    let mut receiver_average_info = 0.0;
    for ((act, key), &p) in &act_signal {
        if p > 0.0 {
            // p * log(P(a|sig) / prior(a)), summed over (a, sig).
            let conditional = p / signal_marginal[key];
            receiver_average_info += p * log2(conditional / prior[*act]);
        }
    }

    OracleMetrics {
        expected_payoff: oracle_expected_payoff(e),
        state_signal_mutual_info: mi_from_pairs(&state_signal, &state_marginal, &signal_marginal),
        signal_act_mutual_info: mi_from_pairs(&act_signal, &act_marginal, &signal_marginal),
        signal_marginal,
        receiver_average_info,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{Agents, ReceiverConfig};
    use crate::game::{make_atomic_game, make_two_sender_game};

    fn fresh(spec: &GameSpec) -> PolicySnapshot {
        Agents::new(spec, &ReceiverConfig::Conventional {})
            .unwrap()
            .snapshot()
            .unwrap()
    }

    #[test]
    fn cardinalities() {
        let spec = make_two_sender_game();
        assert_eq!(enumerate_outcomes(&spec, &fresh(&spec)).unwrap().outcomes.len(), 64);
        let spec = make_atomic_game(2).unwrap();
        let e = enumerate_outcomes(&spec, &fresh(&spec)).unwrap();
        assert_eq!(e.outcomes.len(), 8);
        let total: f64 = e.outcomes.iter().map(|o| o.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fresh_payoffs() {
        let spec = make_atomic_game(2).unwrap();
        let e = enumerate_outcomes(&spec, &fresh(&spec)).unwrap();
        assert!((oracle_expected_payoff(&e) - 0.5).abs() < 1e-12);
        let spec = make_two_sender_game();
        let e = enumerate_outcomes(&spec, &fresh(&spec)).unwrap();
        assert!((oracle_expected_payoff(&e) - 0.25).abs() < 1e-12);
        let m = oracle_metrics(&e);
        assert!(m.state_signal_mutual_info.abs() < 1e-12);
        assert!(m.receiver_average_info.abs() < 1e-12);
    }

    #[test]
    fn size_guard() {
        let spec = make_atomic_game(101).unwrap();
        let snapshot = fresh(&make_atomic_game(2).unwrap());
        assert!(matches!(
            enumerate_outcomes(&spec, &snapshot),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }
}
