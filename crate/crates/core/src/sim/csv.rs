//! Plain-text trajectory output. Floats use Rust's shortest round-trip form,
//! so equal runs give equal bytes.

use std::fmt::Write;

use super::{Batch, InfoReport};

pub const TRAJECTORY_HEADER: &str =
    "run_id,turn,phase,expected_payoff,sender_info_bits,receiver_info_bits";

pub const AGGREGATE_HEADER: &str = "turn,phase,runs,expected_payoff_mean,expected_payoff_std,\
sender_info_bits_mean,sender_info_bits_std,receiver_info_bits_mean,receiver_info_bits_std";

pub fn push_records(out: &mut String, run_id: usize, records: &[InfoReport]) {
    for r in records {
        writeln!(
            out,
            "{run_id},{},{},{},{},{}",
            r.turn,
            r.phase.as_str(),
            r.expected_payoff,
            r.sender_info_bits,
            r.receiver_info_bits
        )
        .expect("writing to a String");
    }
}

/// Every record of every run, runs in seed order.
pub fn trajectory_csv(batch: &Batch) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for (i, t) in batch.trajectories.iter().enumerate() {
        push_records(&mut out, i, &t.records);
    }
    out
}

pub fn aggregate_csv(batch: &Batch) -> String {
    let runs = batch.trajectories.len();
    let mut out = String::from(AGGREGATE_HEADER);
    out.push('\n');
    for r in &batch.aggregate {
        writeln!(
            out,
            "{},{},{runs},{},{},{},{},{},{}",
            r.turn,
            r.phase.as_str(),
            r.expected_payoff.mean,
            r.expected_payoff.std,
            r.sender_info_bits.mean,
            r.sender_info_bits.std,
            r.receiver_info_bits.mean,
            r.receiver_info_bits.std
        )
        .expect("writing to a String");
    }
    out
}
