//! Urn-reinforcement signaling games with conventional, minimalist and
//! generalist receivers, and exact information measures over their policies.

pub mod agents;
pub mod error;
pub mod game;
pub mod infotheory;
pub mod oracle;
pub mod reinforcement;
pub mod sim;
pub mod symbol;

pub use agents::{
    tempered_softmax, Agents, ConventionalReceiver, GeneralistReceiver, IntroductionMode,
    MinimalistReceiver, Receiver, ReceiverConfig, ReceiverPolicy, Round, ScoreScale, Sender,
};
pub use error::{Error, Result};
pub use game::{make_atomic_game, make_two_sender_game, GameSpec, SpecViolation};
pub use infotheory::{
    average_info, compositional_expectation, entropy, expected_payoff, info_table, info_vector,
    mutual_info, pointwise_info, receiver_average_info, sender_average_info, signal_info, Axis,
    CompositionalExpectation, InfoCell, InfoTable, PolicySnapshot, RowKind, RowLabel,
};
pub use oracle::{enumerate_outcomes, oracle_expected_payoff, oracle_metrics, OracleMetrics, OutcomeEnumeration};
pub use reinforcement::{normalize, sample, ReinforcementTable, RngStream};
pub use sim::{
    recovery, run, run_batch, AggregateRow, Batch, InfoReport, Phase, Recovery,
    ReplacementEvent, Stat, Trajectory, TrajectoryConfig,
};
pub use symbol::{sym, CompoundSignal, ContextKey, Symbol};
