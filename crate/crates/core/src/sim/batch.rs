use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run, Phase, Trajectory, TrajectoryConfig};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation; zero for a single run.
    pub std: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        let n = values.len() as f64;
        if values.is_empty() {
            return Stat::default();
        }
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Stat { mean, std }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub turn: u64,
    pub phase: Phase,
    pub expected_payoff: Stat,
    pub sender_info_bits: Stat,
    pub receiver_info_bits: Stat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Batch {
    /// In seed order.
    pub trajectories: Vec<Trajectory>,
    pub aggregate: Vec<AggregateRow>,
}

impl Batch {
    pub fn aggregate_at(&self, turn: u64, phase: Phase) -> Option<&AggregateRow> {
        self.aggregate
            .iter()
            .find(|r| r.turn == turn && r.phase == phase)
    }
}

/// Runs seeds `config.seed`, `config.seed + 1`, ... in parallel.
pub fn run_batch(config: &TrajectoryConfig, num_runs: usize) -> Result<Batch> {
    if num_runs == 0 {
        return Err(Error::InvalidConfig("num_runs must be at least 1".into()));
    }
    config.validate()?;
    let trajectories = (0..num_runs as u64)
        .into_par_iter()
        .map(|i| {
            let mut c = config.clone();
            c.seed = config.seed.wrapping_add(i);
            run(&c)
        })
        .collect::<Result<Vec<_>>>()?;

    let first = &trajectories[0].records;
    let mut aggregate = Vec::with_capacity(first.len());
    for (i, r) in first.iter().enumerate() {
        let column = |f: fn(&super::InfoReport) -> f64| -> Vec<f64> {
            trajectories.iter().map(|t| f(&t.records[i])).collect()
        };
        aggregate.push(AggregateRow {
            turn: r.turn,
            phase: r.phase,
            expected_payoff: Stat::of(&column(|r| r.expected_payoff)),
            sender_info_bits: Stat::of(&column(|r| r.sender_info_bits)),
            receiver_info_bits: Stat::of(&column(|r| r.receiver_info_bits)),
        });
    }
    Ok(Batch {
        trajectories,
        aggregate,
    })
}
