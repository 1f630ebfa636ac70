//! Seeded trajectories with scheduled replacement events.

mod batch;
pub mod csv;

pub use batch::{run_batch, AggregateRow, Batch, Stat};

use serde::{Deserialize, Serialize};

use crate::agents::{Agents, ReceiverConfig};
use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::infotheory::{
    expected_payoff, info_table, receiver_average_info, sender_average_info, Axis, InfoTable,
    PolicySnapshot, RowKind,
};
use crate::reinforcement::{RngStream, DEFAULT_INITIAL_WEIGHT};
use crate::symbol::Symbol;

pub const DEFAULT_TOTAL_TURNS: u64 = 100_000;
pub const DEFAULT_SNAPSHOT_EVERY: u64 = 100;
/// Expected payoff at which a run is reported as a signaling system.
pub const SIGNALING_THRESHOLD: f64 = 0.95;

/// Sender `sender` starts sending `new` wherever it sent `old`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplacementEvent {
    pub turn: u64,
    pub sender: usize,
    pub old: Symbol,
    pub new: Symbol,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub spec: GameSpec,
    pub receiver: ReceiverConfig,
    #[serde(default = "default_total_turns")]
    pub total_turns: u64,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: u64,
    #[serde(default)]
    pub events: Vec<ReplacementEvent>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_initial_weight")]
    pub initial_weight: f64,
}

fn default_total_turns() -> u64 {
    DEFAULT_TOTAL_TURNS
}

fn default_snapshot_every() -> u64 {
    DEFAULT_SNAPSHOT_EVERY
}

fn default_initial_weight() -> f64 {
    DEFAULT_INITIAL_WEIGHT
}

impl TrajectoryConfig {
    pub fn new(spec: GameSpec, receiver: ReceiverConfig) -> Self {
        TrajectoryConfig {
            spec,
            receiver,
            total_turns: DEFAULT_TOTAL_TURNS,
            snapshot_every: DEFAULT_SNAPSHOT_EVERY,
            events: Vec::new(),
            seed: 0,
            initial_weight: DEFAULT_INITIAL_WEIGHT,
        }
    }

    /// Checks everything that can fail before the first turn, including a dry
    /// run of every event on fresh agents.
    pub fn validate(&self) -> Result<()> {
        if self.snapshot_every == 0 {
            return Err(Error::InvalidConfig("snapshot_every must be at least 1".into()));
        }
        let mut agents = Agents::with_initial_weight(&self.spec, &self.receiver, self.initial_weight)?;
        let mut last = 0;
        for event in self.sorted_events() {
            if event.turn == 0 || event.turn > self.total_turns {
                return Err(Error::InvalidConfig(format!(
                    "event turn {} outside 1..={}",
                    event.turn, self.total_turns
                )));
            }
            if event.turn == last {
                return Err(Error::InvalidConfig(format!(
                    "more than one event at turn {}",
                    event.turn
                )));
            }
            last = event.turn;
            agents.replace_message(event.sender, &event.old, &event.new)?;
        }
        Ok(())
    }

    fn sorted_events(&self) -> Vec<&ReplacementEvent> {
        let mut events: Vec<_> = self.events.iter().collect();
        events.sort_by_key(|e| e.turn);
        events
    }
}

/// Where a record sits relative to an event on the same turn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Regular,
    Pre,
    Post,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Regular => "regular",
            Phase::Pre => "pre",
            Phase::Post => "post",
        }
    }
}

/// Information tables frozen at an event boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportTables {
    pub atomic_states: InfoTable,
    pub compound_states: InfoTable,
    pub atomic_acts: InfoTable,
    pub compound_acts: InfoTable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfoReport {
    pub turn: u64,
    pub phase: Phase,
    pub expected_payoff: f64,
    pub sender_info_bits: f64,
    pub receiver_info_bits: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tables: Option<ReportTables>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventRecord {
    pub event: ReplacementEvent,
    pub pre: PolicySnapshot,
    pub post: PolicySnapshot,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub seed: u64,
    pub records: Vec<InfoReport>,
    pub events: Vec<EventRecord>,
    /// First snapshot turn whose expected payoff reached [`SIGNALING_THRESHOLD`].
    pub signaling_turn: Option<u64>,
    pub final_agents: Agents,
}

impl Trajectory {
    pub fn record(&self, turn: u64, phase: Phase) -> Option<&InfoReport> {
        self.records
            .iter()
            .find(|r| r.turn == turn && r.phase == phase)
    }
}

/// Metrics for the current policies.
pub fn report(agents: &Agents, turn: u64, phase: Phase, with_tables: bool) -> Result<(InfoReport, PolicySnapshot)> {
    let snapshot = agents.snapshot()?;
    let tables = if with_tables {
        Some(ReportTables {
            atomic_states: info_table(&snapshot, RowKind::Atomic, Axis::States)?,
            compound_states: info_table(&snapshot, RowKind::Compound, Axis::States)?,
            atomic_acts: info_table(&snapshot, RowKind::Atomic, Axis::Acts)?,
            compound_acts: info_table(&snapshot, RowKind::Compound, Axis::Acts)?,
        })
    } else {
        None
    };
    let report = InfoReport {
        turn,
        phase,
        expected_payoff: expected_payoff(&snapshot, &agents.spec.utility)?,
        sender_info_bits: sender_average_info(&snapshot)?,
        receiver_info_bits: receiver_average_info(&snapshot)?,
        tables,
    };
    Ok((report, snapshot))
}

/// Plays `config.total_turns` rounds.
///
/// Turn `t` is the `t`-th round. An event at turn `t` fires after that
/// round; the `pre` record replaces the regular one and `post` follows it.
pub fn run(config: &TrajectoryConfig) -> Result<Trajectory> {
    config.validate()?;
    let mut agents =
        Agents::with_initial_weight(&config.spec, &config.receiver, config.initial_weight)?;
    let mut rng = RngStream::new(config.seed);
    let events = config.sorted_events();
    let mut next_event = events.iter().peekable();

    let mut records = Vec::new();
    let mut event_records = Vec::new();
    records.push(report(&agents, 0, Phase::Regular, false)?.0);

    for turn in 1..=config.total_turns {
        agents.play_round(&mut rng)?;
        if let Some(event) = next_event.next_if(|e| e.turn == turn) {
            let (pre_report, pre) = report(&agents, turn, Phase::Pre, true)?;
            agents.replace_message(event.sender, &event.old, &event.new)?;
            let (post_report, post) = report(&agents, turn, Phase::Post, true)?;
            records.push(pre_report);
            records.push(post_report);
            event_records.push(EventRecord {
                event: (*event).clone(),
                pre,
                post,
            });
        } else if turn % config.snapshot_every == 0 {
            records.push(report(&agents, turn, Phase::Regular, false)?.0);
        }
    }

    let signaling_turn = records
        .iter()
        .find(|r| r.expected_payoff >= SIGNALING_THRESHOLD)
        .map(|r| r.turn);
    Ok(Trajectory {
        seed: config.seed,
        records,
        events: event_records,
        signaling_turn,
        final_agents: agents,
    })
}

/// Turns after an event until receiver info is back to `fraction` of its
/// pre-event value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Recovery {
    pub turns: u64,
    /// The run ended first; `turns` is then a lower bound.
    pub censored: bool,
}

/// Uses the post record and every later regular record until the next event.
/// A censored recovery is charged the remaining turns plus one cadence.
pub fn recovery(
    records: &[InfoReport],
    event_turn: u64,
    fraction: f64,
    total_turns: u64,
    snapshot_every: u64,
) -> Result<Recovery> {
    let pre = records
        .iter()
        .find(|r| r.turn == event_turn && r.phase == Phase::Pre)
        .ok_or_else(|| Error::InvalidConfig(format!("no pre-event record at turn {event_turn}")))?;
    let target = fraction * pre.receiver_info_bits;
    let after = records
        .iter()
        .skip_while(|r| !(r.turn == event_turn && r.phase == Phase::Post))
        .take_while(|r| r.turn == event_turn || r.phase == Phase::Regular);
    for r in after {
        if r.receiver_info_bits >= target {
            return Ok(Recovery {
                turns: r.turn - event_turn,
                censored: false,
            });
        }
    }
    Ok(Recovery {
        turns: total_turns - event_turn + snapshot_every,
        censored: true,
    })
}
