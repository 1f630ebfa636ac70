//! Exact information measures over frozen policies, in bits.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::game::compound_signals;
use crate::symbol::{act_label, state_label, CompoundSignal, Symbol};

/// Allowed deviation of a probability vector's sum from 1.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

/// Conditionals below this are exact zeros for sentinel purposes.
pub const ZERO_CLAMP: f64 = 1e-15;

fn check_distribution(p: &[f64]) -> Result<()> {
    for (index, &value) in p.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index, value });
        }
        if value < 0.0 {
            return Err(Error::NegativeProbability { index, value });
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(Error::Unnormalized { sum });
    }
    Ok(())
}

fn check_shape(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::ShapeMismatch { expected, actual })
    }
}

pub fn entropy(p: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    let h: f64 = p
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum();
    Ok(h.max(0.0))
}

/// One cell of an information table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InfoCell {
    Bits(f64),
    /// The pair never co-occurs.
    NegInf,
}

impl InfoCell {
    pub fn is_neg_inf(&self) -> bool {
        matches!(self, InfoCell::NegInf)
    }

    /// The value as a float, with the sentinel mapped to `-inf`.
    pub fn to_f64(self) -> f64 {
        match self {
            InfoCell::Bits(b) => b,
            InfoCell::NegInf => f64::NEG_INFINITY,
        }
    }
}

impl fmt::Display for InfoCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            InfoCell::Bits(b) if b == 0.0 => f.write_str("0"),
            InfoCell::Bits(b) => write!(f, "{b}"),
            InfoCell::NegInf => f.write_str("-inf"),
        }
    }
}

impl Serialize for InfoCell {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            InfoCell::Bits(b) => serializer.serialize_f64(b),
            InfoCell::NegInf => serializer.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for InfoCell {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct CellVisitor;

        impl Visitor<'_> for CellVisitor {
            type Value = InfoCell;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number of bits or \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<InfoCell, E> {
                Ok(InfoCell::Bits(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<InfoCell, E> {
                Ok(InfoCell::Bits(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<InfoCell, E> {
                Ok(InfoCell::Bits(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<InfoCell, E> {
                if v == "-inf" {
                    Ok(InfoCell::NegInf)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        deserializer.deserialize_any(CellVisitor)
    }
}

/// `log2(p_cond / p_prior)`, or the sentinel when `p_cond` is zero.
pub fn pointwise_info(p_cond: f64, p_prior: f64) -> Result<InfoCell> {
    if !(p_prior > 0.0) {
        return Err(Error::UndefinedPrior(0));
    }
    if !p_cond.is_finite() {
        return Err(Error::NonFinite { index: 0, value: p_cond });
    }
    if p_cond < 0.0 {
        return Err(Error::NegativeProbability { index: 0, value: p_cond });
    }
    if p_cond < ZERO_CLAMP {
        return Ok(InfoCell::NegInf);
    }
    Ok(InfoCell::Bits((p_cond / p_prior).log2()))
}

/// Kullback-Leibler divergence of `p_cond` from `p_prior`.
pub fn signal_info(p_cond: &[f64], p_prior: &[f64]) -> Result<f64> {
    check_shape(p_prior.len(), p_cond.len())?;
    check_distribution(p_cond)?;
    check_distribution(p_prior)?;
    let mut total = 0.0;
    for (i, (&c, &p)) in p_cond.iter().zip(p_prior).enumerate() {
        if c == 0.0 {
            continue;
        }
        if p == 0.0 {
            return Err(Error::UndefinedPrior(i));
        }
        total += c * (c / p).log2();
    }
    Ok(total.max(0.0))
}

/// Mutual information of a joint distribution given as `joint[row][col]`.
pub fn mutual_info(joint: &[Vec<f64>]) -> Result<f64> {
    let cols = joint.first().map_or(0, Vec::len);
    for row in joint {
        check_shape(cols, row.len())?;
    }
    let flat: Vec<f64> = joint.iter().flatten().copied().collect();
    check_distribution(&flat)?;
    let row_marginal: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let col_marginal: Vec<f64> = (0..cols).map(|j| joint.iter().map(|r| r[j]).sum()).collect();
    let mut total = 0.0;
    for (i, row) in joint.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            if p > 0.0 {
                total += p * (p / (row_marginal[i] * col_marginal[j])).log2();
            }
        }
    }
    Ok(total.max(0.0))
}

/// `sum_j q[j] * signal_info(conditionals[j], prior)`.
pub fn average_info(q: &[f64], conditionals: &[Vec<f64>], prior: &[f64]) -> Result<f64> {
    check_shape(q.len(), conditionals.len())?;
    check_distribution(q)?;
    let mut total = 0.0;
    for (&weight, cond) in q.iter().zip(conditionals) {
        if weight > 0.0 {
            total += weight * signal_info(cond, prior)?;
        }
    }
    Ok(total)
}

/// A sender's policy as a `[state][message]` matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SenderPolicy {
    pub alphabet: Vec<Symbol>,
    pub conditionals: Vec<Vec<f64>>,
}

/// Act probabilities for one complete signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverRow {
    pub signal: CompoundSignal,
    pub acts: Vec<f64>,
}

/// The receiver's own act probabilities for a single message.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomicRow {
    pub message: Symbol,
    pub acts: Vec<f64>,
}

/// Every conditional distribution of a game at one instant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySnapshot {
    pub state_prior: Vec<f64>,
    pub num_acts: usize,
    pub senders: Vec<SenderPolicy>,
    /// One row per complete signal, sender 0 varying slowest.
    pub receiver: Vec<ReceiverRow>,
    #[serde(default)]
    pub receiver_atomic: Vec<AtomicRow>,
    /// Reference distribution over acts. `None` uses the distribution the
    /// current policies induce.
    #[serde(default)]
    pub act_prior: Option<Vec<f64>>,
}

/// Row labels of an information table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RowLabel {
    Atomic(Symbol),
    Compound(CompoundSignal),
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowLabel::Atomic(s) => write!(f, "{s}"),
            RowLabel::Compound(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    Atomic,
    Compound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    States,
    Acts,
}

impl PolicySnapshot {
    pub fn num_states(&self) -> usize {
        self.state_prior.len()
    }

    pub fn alphabets(&self) -> Vec<Vec<Symbol>> {
        self.senders.iter().map(|s| s.alphabet.clone()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        check_distribution(&self.state_prior)?;
        for sender in &self.senders {
            check_shape(self.num_states(), sender.conditionals.len())?;
            for row in &sender.conditionals {
                check_shape(sender.alphabet.len(), row.len())?;
                check_distribution(row)?;
            }
        }
        let expected = compound_signals(&self.alphabets());
        check_shape(expected.len(), self.receiver.len())?;
        for (want, row) in expected.iter().zip(&self.receiver) {
            if *want != row.signal {
                return Err(Error::InvalidSignal(format!(
                    "receiver row `{}` out of order, expected `{want}`",
                    row.signal
                )));
            }
            check_shape(self.num_acts, row.acts.len())?;
            check_distribution(&row.acts)?;
        }
        for row in &self.receiver_atomic {
            check_shape(self.num_acts, row.acts.len())?;
            check_distribution(&row.acts)?;
        }
        if let Some(prior) = &self.act_prior {
            check_shape(self.num_acts, prior.len())?;
            check_distribution(prior)?;
        }
        Ok(())
    }

    /// Message index per sender for receiver row `row`.
    pub fn message_indices(&self, mut row: usize) -> Vec<usize> {
        let mut out = vec![0; self.senders.len()];
        for (slot, sender) in self.senders.iter().enumerate().rev() {
            let n = sender.alphabet.len();
            out[slot] = row % n;
            row /= n;
        }
        out
    }

    /// `P(state, signal)` as `[state][signal row]`.
    pub fn state_signal_joint(&self) -> Vec<Vec<f64>> {
        let rows: Vec<Vec<usize>> = (0..self.receiver.len())
            .map(|r| self.message_indices(r))
            .collect();
        self.state_prior
            .iter()
            .enumerate()
            .map(|(s, &ps)| {
                rows.iter()
                    .map(|idx| {
                        self.senders
                            .iter()
                            .zip(idx)
                            .fold(ps, |acc, (sender, &m)| acc * sender.conditionals[s][m])
                    })
                    .collect()
            })
            .collect()
    }

    /// Probability of each complete signal, in receiver row order.
    pub fn signal_probabilities(&self) -> Vec<f64> {
        column_sums(&self.state_signal_joint(), self.receiver.len())
    }

    /// The reference act distribution.
    pub fn act_prior(&self) -> Vec<f64> {
        if let Some(prior) = &self.act_prior {
            return prior.clone();
        }
        let q = self.signal_probabilities();
        let mut prior = vec![0.0; self.num_acts];
        for (weight, row) in q.iter().zip(&self.receiver) {
            for (p, a) in prior.iter_mut().zip(&row.acts) {
                *p += weight * a;
            }
        }
        prior
    }

    pub fn prior(&self, axis: Axis) -> Vec<f64> {
        match axis {
            Axis::States => self.state_prior.clone(),
            Axis::Acts => self.act_prior(),
        }
    }

    pub fn col_labels(&self, axis: Axis) -> Vec<Symbol> {
        match axis {
            Axis::States => (0..self.num_states()).map(state_label).collect(),
            Axis::Acts => (0..self.num_acts).map(act_label).collect(),
        }
    }

    pub fn row_labels(&self, kind: RowKind) -> Vec<RowLabel> {
        match kind {
            RowKind::Atomic => self
                .senders
                .iter()
                .flat_map(|s| s.alphabet.iter().cloned().map(RowLabel::Atomic))
                .collect(),
            RowKind::Compound => self
                .receiver
                .iter()
                .map(|r| RowLabel::Compound(r.signal.clone()))
                .collect(),
        }
    }

    fn locate_atomic(&self, message: &Symbol) -> Result<(usize, usize)> {
        self.senders
            .iter()
            .enumerate()
            .find_map(|(slot, s)| s.alphabet.iter().position(|m| m == message).map(|i| (slot, i)))
            .ok_or_else(|| Error::UnknownLabel(message.to_string()))
    }

    fn locate_compound(&self, signal: &CompoundSignal) -> Result<usize> {
        self.receiver
            .iter()
            .position(|r| r.signal == *signal)
            .ok_or_else(|| Error::UnknownLabel(signal.to_string()))
    }

    /// `P(col | row)`. Rows that never occur fall back to the prior.
    pub fn conditional(&self, row: &RowLabel, axis: Axis) -> Result<Vec<f64>> {
        match (row, axis) {
            (RowLabel::Atomic(message), Axis::States) => {
                let (slot, m) = self.locate_atomic(message)?;
                let joint: Vec<f64> = self
                    .state_prior
                    .iter()
                    .zip(&self.senders[slot].conditionals)
                    .map(|(p, row)| p * row[m])
                    .collect();
                Ok(normalize_or(joint, || self.state_prior.clone()))
            }
            (RowLabel::Compound(signal), Axis::States) => {
                let r = self.locate_compound(signal)?;
                let joint = self.state_signal_joint();
                let column: Vec<f64> = joint.iter().map(|row| row[r]).collect();
                Ok(normalize_or(column, || self.state_prior.clone()))
            }
            (RowLabel::Atomic(message), Axis::Acts) => {
                self.locate_atomic(message)?;
                if let Some(own) = self.receiver_atomic.iter().find(|r| r.message == *message) {
                    return Ok(own.acts.clone());
                }
                let q = self.signal_probabilities();
                let mut mixed = vec![0.0; self.num_acts];
                for (weight, row) in q.iter().zip(&self.receiver) {
                    if row.signal.contains(message) {
                        for (p, a) in mixed.iter_mut().zip(&row.acts) {
                            *p += weight * a;
                        }
                    }
                }
                Ok(normalize_or(mixed, || self.act_prior()))
            }
            (RowLabel::Compound(signal), Axis::Acts) => {
                Ok(self.receiver[self.locate_compound(signal)?].acts.clone())
            }
        }
    }

    /// Probability of each row label occurring.
    pub fn row_probabilities(&self, kind: RowKind) -> Vec<f64> {
        match kind {
            RowKind::Compound => self.signal_probabilities(),
            RowKind::Atomic => self
                .senders
                .iter()
                .flat_map(|sender| {
                    (0..sender.alphabet.len()).map(move |m| {
                        self.state_prior
                            .iter()
                            .zip(&sender.conditionals)
                            .map(|(p, row)| p * row[m])
                            .sum::<f64>()
                    })
                })
                .collect(),
        }
    }
}

fn column_sums(matrix: &[Vec<f64>], cols: usize) -> Vec<f64> {
    (0..cols).map(|j| matrix.iter().map(|r| r[j]).sum()).collect()
}

fn normalize_or(v: Vec<f64>, fallback: impl FnOnce() -> Vec<f64>) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        v.into_iter().map(|x| x / total).collect()
    } else {
        fallback()
    }
}

/// Pointwise information of `row` about every column of `axis`.
pub fn info_vector(snapshot: &PolicySnapshot, row: &RowLabel, axis: Axis) -> Result<Vec<InfoCell>> {
    let cond = snapshot.conditional(row, axis)?;
    cells_for(&cond, &snapshot.prior(axis))
}

fn cells_for(cond: &[f64], prior: &[f64]) -> Result<Vec<InfoCell>> {
    check_shape(prior.len(), cond.len())?;
    cond.iter()
        .zip(prior)
        .enumerate()
        .map(|(i, (&c, &p))| {
            if p == 0.0 && (0.0..ZERO_CLAMP).contains(&c) {
                Ok(InfoCell::NegInf)
            } else {
                pointwise_info(c, p).map_err(|e| reindex(e, i))
            }
        })
        .collect()
}

fn reindex(e: Error, index: usize) -> Error {
    match e {
        Error::UndefinedPrior(_) => Error::UndefinedPrior(index),
        Error::NonFinite { value, .. } => Error::NonFinite { index, value },
        Error::NegativeProbability { value, .. } => Error::NegativeProbability { index, value },
        other => other,
    }
}

/// Information content of a set of rows about a set of columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfoTable {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub cells: Vec<Vec<InfoCell>>,
    /// The conditionals the cells were computed from, kept unclamped.
    pub conditionals: Vec<Vec<f64>>,
    pub prior: Vec<f64>,
}

impl InfoTable {
    pub fn from_conditionals(
        rows: Vec<String>,
        cols: Vec<String>,
        conditionals: Vec<Vec<f64>>,
        prior: Vec<f64>,
    ) -> Result<Self> {
        check_shape(rows.len(), conditionals.len())?;
        check_shape(cols.len(), prior.len())?;
        let cells = conditionals
            .iter()
            .map(|c| cells_for(c, &prior))
            .collect::<Result<Vec<_>>>()?;
        Ok(InfoTable {
            rows,
            cols,
            cells,
            conditionals,
            prior,
        })
    }

    pub fn row(&self, label: &str) -> Option<&[InfoCell]> {
        self.rows
            .iter()
            .position(|r| r == label)
            .map(|i| self.cells[i].as_slice())
    }

    /// Total information carried by each row.
    pub fn row_info(&self) -> Result<Vec<f64>> {
        self.conditionals
            .iter()
            .map(|c| signal_info(c, &self.prior))
            .collect()
    }

    /// Average information when row `j` occurs with probability `weights[j]`.
    pub fn average_info(&self, weights: &[f64]) -> Result<f64> {
        average_info(weights, &self.conditionals, &self.prior)
    }

    /// Label column, then one column per state or act; the sentinel is `-inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row");
        for c in &self.cols {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (label, cells) in self.rows.iter().zip(&self.cells) {
            out.push_str(label);
            for cell in cells {
                out.push(',');
                out.push_str(&cell.to_string());
            }
            out.push('\n');
        }
        out
    }
}

pub fn info_table(snapshot: &PolicySnapshot, kind: RowKind, axis: Axis) -> Result<InfoTable> {
    let labels = snapshot.row_labels(kind);
    let conditionals = labels
        .iter()
        .map(|l| snapshot.conditional(l, axis))
        .collect::<Result<Vec<_>>>()?;
    InfoTable::from_conditionals(
        labels.iter().map(ToString::to_string).collect(),
        snapshot.col_labels(axis).iter().map(ToString::to_string).collect(),
        conditionals,
        snapshot.prior(axis),
    )
}

/// Average information the complete signals carry about the states.
pub fn sender_average_info(snapshot: &PolicySnapshot) -> Result<f64> {
    mutual_info(&snapshot.state_signal_joint())
}

/// Average information the complete signals carry about the receiver's acts,
/// measured against the snapshot's act prior.
pub fn receiver_average_info(snapshot: &PolicySnapshot) -> Result<f64> {
    let q = snapshot.signal_probabilities();
    let conditionals: Vec<Vec<f64>> = snapshot.receiver.iter().map(|r| r.acts.clone()).collect();
    average_info(&q, &conditionals, &snapshot.act_prior())
}

/// Probability of reward under the snapshot's policies.
pub fn expected_payoff(snapshot: &PolicySnapshot, utility: &[Vec<f64>]) -> Result<f64> {
    check_shape(snapshot.num_states(), utility.len())?;
    let joint = snapshot.state_signal_joint();
    let mut total = 0.0;
    for (s, row) in joint.iter().enumerate() {
        check_shape(snapshot.num_acts, utility[s].len())?;
        for (p, receiver) in row.iter().zip(&snapshot.receiver) {
            let u: f64 = receiver.acts.iter().zip(&utility[s]).map(|(a, u)| a * u).sum();
            total += p * u;
        }
    }
    Ok(total)
}

/// Compound-by-acts table a compositional interpreter would show after `old`
/// is replaced by `new`, together with the probability of each row.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositionalExpectation {
    pub table: InfoTable,
    pub weights: Vec<f64>,
    pub average_bits: f64,
}

/// Rows without `new` keep their act distribution. A row with `new` keeps
/// what its other messages say: the signal-probability-weighted act
/// distribution over the old signals that agree on them. With nothing left
/// the row falls back to the act prior.
pub fn compositional_expectation(
    pre: &PolicySnapshot,
    old: &Symbol,
    new: &Symbol,
) -> Result<CompositionalExpectation> {
    let (slot, _) = pre.locate_atomic(old)?;
    if pre.locate_atomic(new).is_ok() {
        return Err(Error::SymbolCollision(new.clone()));
    }
    let q = pre.signal_probabilities();
    let prior = pre.act_prior();
    let mut labels = Vec::with_capacity(pre.receiver.len());
    let mut conditionals = Vec::with_capacity(pre.receiver.len());
    for row in &pre.receiver {
        labels.push(row.signal.renamed(old, new).to_string());
        if !row.signal.contains(old) {
            conditionals.push(row.acts.clone());
            continue;
        }
        let agrees = |other: &CompoundSignal| {
            other
                .slots()
                .iter()
                .zip(row.signal.slots())
                .enumerate()
                .all(|(i, (a, b))| i == slot || a == b)
        };
        let mut mixed = vec![0.0; pre.num_acts];
        for (weight, other) in q.iter().zip(&pre.receiver) {
            if agrees(&other.signal) {
                for (m, a) in mixed.iter_mut().zip(&other.acts) {
                    *m += weight * a;
                }
            }
        }
        conditionals.push(if pre.senders.len() == 1 {
            prior.clone()
        } else {
            normalize_or(mixed, || prior.clone())
        });
    }
    let table = InfoTable::from_conditionals(
        labels,
        pre.col_labels(Axis::Acts).iter().map(ToString::to_string).collect(),
        conditionals,
        prior,
    )?;
    let average_bits = table.average_info(&q)?;
    Ok(CompositionalExpectation {
        table,
        weights: q,
        average_bits,
    })
}
