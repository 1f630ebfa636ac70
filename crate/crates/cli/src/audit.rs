//! Compositionality audit of a saved policy.
//!
//! Replaces one message with a fresh symbol and compares how much the
//! receiver's compound signals still say about its acts against what a
//! compositional interpreter would keep.

use std::fmt;

use thiserror::Error;
use urnsig_core::{
    compositional_expectation, info_table, receiver_average_info, Agents, Axis, RowKind, Symbol,
};

pub const DEFAULT_THRESHOLD: f64 = 0.25;

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("cannot load policy: {0}")]
    Policy(urnsig_core::Error),
    #[error("no sender uses `{0}`")]
    UnknownSymbol(Symbol),
    #[error(transparent)]
    Core(#[from] urnsig_core::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RowDelta {
    pub signal: String,
    pub weight: f64,
    pub expected_bits: f64,
    pub actual_bits: f64,
    /// Expected minus actual.
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub sender: usize,
    pub old: Symbol,
    pub new: Symbol,
    pub expected_bits: f64,
    pub actual_bits: f64,
    /// Expected minus actual average information.
    pub gap: f64,
    pub threshold: f64,
    pub flagged: bool,
    pub rows: Vec<RowDelta>,
}

/// `mB0` becomes `mB?`.
pub fn default_replacement(old: &Symbol) -> Result<Symbol, urnsig_core::Error> {
    let stem = old.as_str().trim_end_matches(|c: char| c.is_ascii_digit());
    Symbol::new(format!("{stem}?"))
}

pub fn audit(
    agents: &Agents,
    old: &Symbol,
    new: Option<&Symbol>,
    threshold: f64,
) -> Result<AuditReport, AuditError> {
    let sender = agents
        .spec
        .sender_of(old)
        .ok_or_else(|| AuditError::UnknownSymbol(old.clone()))?;
    let new = match new {
        Some(n) => n.clone(),
        None => default_replacement(old)?,
    };
    let pre = agents.snapshot()?;
    let expected = compositional_expectation(&pre, old, &new)?;

    let mut replaced = agents.clone();
    replaced.replace_message(sender, old, &new)?;
    let post = replaced.snapshot()?;
    let actual = info_table(&post, RowKind::Compound, Axis::Acts)?;
    let actual_bits = receiver_average_info(&post)?;

    let expected_rows = expected.table.row_info()?;
    let actual_rows = actual.row_info()?;
    let rows = expected
        .table
        .rows
        .iter()
        .enumerate()
        .map(|(i, signal)| {
            let j = actual.rows.iter().position(|r| r == signal).unwrap_or(i);
            RowDelta {
                signal: signal.clone(),
                weight: expected.weights[i],
                expected_bits: expected_rows[i],
                actual_bits: actual_rows[j],
                delta: expected_rows[i] - actual_rows[j],
            }
        })
        .collect();
    let gap = expected.average_bits - actual_bits;
    Ok(AuditReport {
        sender,
        old: old.clone(),
        new,
        expected_bits: expected.average_bits,
        actual_bits,
        gap,
        threshold,
        flagged: gap > threshold,
        rows,
    })
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "replace {} -> {} (sender {})", self.old, self.new, self.sender)?;
        writeln!(f, "{:<16} {:>8} {:>10} {:>10} {:>10}", "signal", "weight", "expected", "actual", "delta")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<16} {:>8.4} {:>10.4} {:>10.4} {:>10.4}",
                r.signal, r.weight, r.expected_bits, r.actual_bits, r.delta
            )?;
        }
        writeln!(
            f,
            "average: expected {:.4} bits, actual {:.4} bits, gap {:.4} (threshold {})",
            self.expected_bits, self.actual_bits, self.gap, self.threshold
        )?;
        write!(
            f,
            "{}",
            if self.flagged {
                "FLAGGED: information lost beyond what composition predicts"
            } else {
                "ok"
            }
        )
    }
}
