//! Senders and the three receiver architectures.

mod conventional;
mod generalist;
mod minimalist;
mod sender;

pub use conventional::ConventionalReceiver;
pub use generalist::{GeneralistReceiver, IntroductionMode};
pub use minimalist::{tempered_softmax, MinimalistReceiver, ScoreScale};
pub use sender::Sender;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::infotheory::{AtomicRow, PolicySnapshot, ReceiverRow, SenderPolicy};
use crate::reinforcement::{sample, RngStream, DEFAULT_INITIAL_WEIGHT};
use crate::symbol::{CompoundSignal, Symbol};

/// Behaviour shared by every receiver architecture.
pub trait ReceiverPolicy {
    fn num_acts(&self) -> usize;

    /// Probability of each act given a complete signal.
    fn act_distribution(&self, signal: &CompoundSignal) -> Result<Vec<f64>>;

    /// Updates after playing `act` on `signal` and earning `reward`.
    fn learn(&mut self, signal: &CompoundSignal, act: usize, reward: f64) -> Result<()>;

    /// Prepares for a fresh message that sender `slot` starts using.
    fn introduce_message(&mut self, slot: usize, new: &Symbol) -> Result<()>;

    /// The receiver's own act distribution for a single message, when its
    /// architecture keeps one.
    fn atomic_distribution(&self, message: &Symbol) -> Option<Result<Vec<f64>>>;
}

pub(crate) fn require_complete(signal: &CompoundSignal) -> Result<()> {
    if signal.is_complete() {
        Ok(())
    } else {
        Err(Error::InvalidSignal(format!("`{signal}` has absent slots")))
    }
}

/// Receiver architecture and its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReceiverConfig {
    Conventional {},
    Minimalist {
        temperature: f64,
        #[serde(default)]
        score_scale: ScoreScale,
    },
    Generalist {
        #[serde(default)]
        mode: IntroductionMode,
        #[serde(default = "default_alpha")]
        alpha: f64,
    },
}

fn default_alpha() -> f64 {
    1.0
}

impl ReceiverConfig {
    pub fn build(&self, num_acts: usize, initial_weight: f64) -> Result<Receiver> {
        Ok(match *self {
            ReceiverConfig::Conventional {} => {
                Receiver::Conventional(ConventionalReceiver::new(num_acts, initial_weight)?)
            }
            ReceiverConfig::Minimalist {
                temperature,
                score_scale,
            } => Receiver::Minimalist(MinimalistReceiver::new(
                num_acts,
                initial_weight,
                temperature,
                score_scale,
            )?),
            ReceiverConfig::Generalist { mode, alpha } => Receiver::Generalist(
                GeneralistReceiver::new(num_acts, initial_weight, mode, alpha)?,
            ),
        })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ReceiverConfig::Conventional {} => "conventional",
            ReceiverConfig::Minimalist { .. } => "minimalist",
            ReceiverConfig::Generalist { .. } => "generalist",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Receiver {
    Conventional(ConventionalReceiver),
    Minimalist(MinimalistReceiver),
    Generalist(GeneralistReceiver),
}

impl Receiver {
    fn inner(&self) -> &dyn ReceiverPolicy {
        match self {
            Receiver::Conventional(r) => r,
            Receiver::Minimalist(r) => r,
            Receiver::Generalist(r) => r,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn ReceiverPolicy {
        match self {
            Receiver::Conventional(r) => r,
            Receiver::Minimalist(r) => r,
            Receiver::Generalist(r) => r,
        }
    }
}

impl ReceiverPolicy for Receiver {
    fn num_acts(&self) -> usize {
        self.inner().num_acts()
    }

    fn act_distribution(&self, signal: &CompoundSignal) -> Result<Vec<f64>> {
        self.inner().act_distribution(signal)
    }

    fn learn(&mut self, signal: &CompoundSignal, act: usize, reward: f64) -> Result<()> {
        self.inner_mut().learn(signal, act, reward)
    }

    fn introduce_message(&mut self, slot: usize, new: &Symbol) -> Result<()> {
        self.inner_mut().introduce_message(slot, new)
    }

    fn atomic_distribution(&self, message: &Symbol) -> Option<Result<Vec<f64>>> {
        self.inner().atomic_distribution(message)
    }
}

/// Everything that learns in one trajectory: the game as currently played,
/// the senders and the receiver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Agents {
    /// The game with the alphabets currently in use.
    pub spec: GameSpec,
    pub senders: Vec<Sender>,
    pub receiver: Receiver,
}

/// Outcome of one round of play.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Round {
    pub state: usize,
    pub messages: Vec<usize>,
    pub act: usize,
    pub rewarded: bool,
}

impl Agents {
    pub fn new(spec: &GameSpec, receiver: &ReceiverConfig) -> Result<Self> {
        Self::with_initial_weight(spec, receiver, DEFAULT_INITIAL_WEIGHT)
    }

    pub fn with_initial_weight(
        spec: &GameSpec,
        receiver: &ReceiverConfig,
        initial_weight: f64,
    ) -> Result<Self> {
        spec.validate().map_err(Error::InvalidSpec)?;
        let senders = spec
            .sender_alphabets
            .iter()
            .map(|a| Sender::new(a.clone(), initial_weight))
            .collect::<Result<Vec<_>>>()?;
        Ok(Agents {
            spec: spec.clone(),
            senders,
            receiver: receiver.build(spec.num_acts, initial_weight)?,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let agents: Agents =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        agents.spec.validate().map_err(Error::InvalidSpec)?;
        for (i, (sender, alphabet)) in agents
            .senders
            .iter()
            .zip(&agents.spec.sender_alphabets)
            .enumerate()
        {
            if sender.alphabet() != alphabet.as_slice() {
                return Err(Error::InvalidConfig(format!(
                    "sender {i} alphabet does not match the game"
                )));
            }
        }
        if agents.senders.len() != agents.spec.num_senders()
            || agents.receiver.num_acts() != agents.spec.num_acts
        {
            return Err(Error::InvalidConfig(
                "agents do not match the game's senders and acts".into(),
            ));
        }
        Ok(agents)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("agents serialize")
    }

    /// Plays one round and applies all reinforcement.
    ///
    /// Draw order: state, then each sender's message in slot order, then the act.
    pub fn play_round(&mut self, rng: &mut RngStream) -> Result<Round> {
        let state = sample(&self.spec.state_prior, rng);
        let mut messages = Vec::with_capacity(self.senders.len());
        for sender in &self.senders {
            messages.push(sender.choose(state, rng)?);
        }
        let signal = self.signal(&messages);
        let act = sample(&self.receiver.act_distribution(&signal)?, rng);
        let reward = self.spec.utility[state][act];

        for (sender, &m) in self.senders.iter_mut().zip(&messages) {
            sender.reinforce(state, m, reward)?;
        }
        self.receiver.learn(&signal, act, reward)?;
        Ok(Round {
            state,
            messages,
            act,
            rewarded: reward > 0.0,
        })
    }

    /// Signal made of the given message indices, one per sender.
    pub fn signal(&self, messages: &[usize]) -> CompoundSignal {
        CompoundSignal::complete(
            self.senders
                .iter()
                .zip(messages)
                .map(|(s, &m)| s.alphabet()[m].clone())
                .collect(),
        )
    }

    /// Sender `sender` starts sending `new` instead of `old`; the receiver is
    /// told a new message exists and reacts per its architecture.
    pub fn replace_message(&mut self, sender: usize, old: &Symbol, new: &Symbol) -> Result<()> {
        if sender >= self.senders.len() {
            return Err(Error::InvalidConfig(format!(
                "sender index {sender} out of range ({} senders)",
                self.senders.len()
            )));
        }
        if self.spec.sender_of(new).is_some() {
            return Err(Error::SymbolCollision(new.clone()));
        }
        if !self.senders[sender].alphabet().contains(old) {
            return Err(Error::UnknownSymbol(old.clone()));
        }
        self.receiver.introduce_message(sender, new)?;
        self.senders[sender].replace_message(old, new)?;
        for m in &mut self.spec.sender_alphabets[sender] {
            if m == old {
                *m = new.clone();
            }
        }
        Ok(())
    }

    /// Freezes every conditional distribution.
    ///
    /// The act prior is anchored to the game: the distribution of optimal acts
    /// under the state prior.
    pub fn snapshot(&self) -> Result<PolicySnapshot> {
        let senders = self
            .senders
            .iter()
            .map(|s| {
                Ok(SenderPolicy {
                    alphabet: s.alphabet().to_vec(),
                    conditionals: (0..self.spec.num_states)
                        .map(|state| s.distribution(state))
                        .collect::<Result<Vec<_>>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let receiver = self
            .spec
            .compound_signals()
            .into_iter()
            .map(|signal| {
                let acts = self.receiver.act_distribution(&signal)?;
                Ok(ReceiverRow { signal, acts })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut receiver_atomic = Vec::new();
        for alphabet in &self.spec.sender_alphabets {
            for message in alphabet {
                if let Some(acts) = self.receiver.atomic_distribution(message) {
                    receiver_atomic.push(AtomicRow {
                        message: message.clone(),
                        acts: acts?,
                    });
                }
            }
        }
        Ok(PolicySnapshot {
            state_prior: self.spec.state_prior.clone(),
            num_acts: self.spec.num_acts,
            senders,
            receiver,
            receiver_atomic,
            act_prior: Some(self.spec.optimal_act_prior()),
        })
    }
}
