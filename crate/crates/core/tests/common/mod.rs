//! Hand-built converged policies and table comparison helpers.
#![allow(dead_code)]

use urnsig_core::symbol::state_key;
use urnsig_core::*;

pub const NEG: f64 = f64::NEG_INFINITY;
/// Ball count for hand-built converged urns.
pub const BALLS: f64 = 100_000.0;
pub const FIXTURE_TEMPERATURE: f64 = 2000.0;

pub fn one_hot(n: usize, i: usize, weight: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = weight;
    v
}

/// Sender A names the high bit of the state, sender B the low bit.
pub fn set_compositional_senders(agents: &mut Agents) {
    for s in 0..4 {
        agents.senders[0]
            .table_mut()
            .set_weights(state_key(s), one_hot(2, s / 2, BALLS))
            .unwrap();
        agents.senders[1]
            .table_mut()
            .set_weights(state_key(s), one_hot(2, s % 2, BALLS))
            .unwrap();
    }
}

const PAIRS: [(&str, &str, usize); 4] = [
    ("mA0", "mB0", 0),
    ("mA0", "mB1", 1),
    ("mA1", "mB0", 2),
    ("mA1", "mB1", 3),
];

const SINGLES: [(usize, &str, [usize; 2]); 4] = [
    (0, "mA0", [0, 1]),
    (0, "mA1", [2, 3]),
    (1, "mB0", [0, 2]),
    (1, "mB1", [1, 3]),
];

fn two_hot(a: usize, b: usize) -> Vec<f64> {
    let mut v = vec![0.0; 4];
    v[a] = BALLS;
    v[b] = BALLS;
    v
}

/// A converged signaling system in the two-sender game.
pub fn converged_two_sender(receiver: &ReceiverConfig) -> Agents {
    let mut agents = Agents::new(&make_two_sender_game(), receiver).unwrap();
    set_compositional_senders(&mut agents);
    match &mut agents.receiver {
        Receiver::Conventional(r) => {
            for (a, b, act) in PAIRS {
                let key = CompoundSignal::complete(vec![sym(a), sym(b)]).key();
                r.table_mut().set_weights(key, one_hot(4, act, BALLS)).unwrap();
            }
        }
        Receiver::Minimalist(r) => {
            for (_, m, [x, y]) in SINGLES {
                r.table_mut()
                    .set_weights(ContextKey::single(sym(m)), two_hot(x, y))
                    .unwrap();
            }
        }
        Receiver::Generalist(r) => {
            for (a, b, act) in PAIRS {
                r.set_act_weights(&[(0, sym(a)), (1, sym(b))], one_hot(4, act, BALLS))
                    .unwrap();
            }
            for (slot, m, [x, y]) in SINGLES {
                r.set_act_weights(&[(slot, sym(m))], two_hot(x, y)).unwrap();
            }
            r.set_act_weights(&[], vec![2.0 * BALLS; 4]).unwrap();
        }
    }
    agents
}

/// A converged atomic 2-game.
pub fn converged_atomic_two() -> Agents {
    let mut agents = Agents::new(&make_atomic_game(2).unwrap(), &ReceiverConfig::Conventional {}).unwrap();
    for s in 0..2 {
        agents.senders[0]
            .table_mut()
            .set_weights(state_key(s), one_hot(2, s, BALLS))
            .unwrap();
    }
    let Receiver::Conventional(r) = &mut agents.receiver else { unreachable!() };
    for m in 0..2 {
        r.table_mut()
            .set_weights(ContextKey::single(sym(&format!("m{m}"))), one_hot(2, m, BALLS))
            .unwrap();
    }
    agents
}

pub fn conventional() -> ReceiverConfig {
    ReceiverConfig::Conventional {}
}

pub fn minimalist() -> ReceiverConfig {
    ReceiverConfig::Minimalist {
        temperature: FIXTURE_TEMPERATURE,
        score_scale: ScoreScale::Raw,
    }
}

pub fn generalist(mode: IntroductionMode) -> ReceiverConfig {
    ReceiverConfig::Generalist { mode, alpha: 1.0 }
}

pub fn replace_b0(agents: &mut Agents) {
    agents.replace_message(1, &sym("mB0"), &sym("mB?")).unwrap();
}

/// Sentinels must match exactly, reals within 1e-12.
pub fn compare_table(actual: &InfoTable, expected: &[(&str, &[f64])]) -> Result<(), String> {
    if actual.rows.len() != expected.len() {
        return Err(format!("{} rows, expected {}", actual.rows.len(), expected.len()));
    }
    for (i, (label, want)) in expected.iter().enumerate() {
        if actual.rows[i] != *label {
            return Err(format!("row {i} is `{}`, expected `{label}`", actual.rows[i]));
        }
        if actual.cells[i].len() != want.len() {
            return Err(format!("row `{label}` has {} cells", actual.cells[i].len()));
        }
        for (j, (cell, &w)) in actual.cells[i].iter().zip(want.iter()).enumerate() {
            let ok = match cell {
                InfoCell::NegInf => w == NEG,
                InfoCell::Bits(b) => w != NEG && (b - w).abs() <= 1e-12,
            };
            if !ok {
                return Err(format!("`{label}` column {j}: got {cell}, expected {w}"));
            }
        }
    }
    Ok(())
}

pub const ATOMIC_STATES: [(&str, &[f64]); 4] = [
    ("mA0", &[1.0, 1.0, NEG, NEG]),
    ("mA1", &[NEG, NEG, 1.0, 1.0]),
    ("mB0", &[1.0, NEG, 1.0, NEG]),
    ("mB1", &[NEG, 1.0, NEG, 1.0]),
];

pub const ATOMIC_STATES_REPLACED: [(&str, &[f64]); 4] = [
    ("mA0", &[1.0, 1.0, NEG, NEG]),
    ("mA1", &[NEG, NEG, 1.0, 1.0]),
    ("mB?", &[1.0, NEG, 1.0, NEG]),
    ("mB1", &[NEG, 1.0, NEG, 1.0]),
];

pub const COMPOUND_ACTS: [(&str, &[f64]); 4] = [
    ("mA0&mB0", &[2.0, NEG, NEG, NEG]),
    ("mA0&mB1", &[NEG, 2.0, NEG, NEG]),
    ("mA1&mB0", &[NEG, NEG, 2.0, NEG]),
    ("mA1&mB1", &[NEG, NEG, NEG, 2.0]),
];

pub const COMPOUND_ACTS_LOST: [(&str, &[f64]); 4] = [
    ("mA0&mB?", &[0.0, 0.0, 0.0, 0.0]),
    ("mA0&mB1", &[NEG, 2.0, NEG, NEG]),
    ("mA1&mB?", &[0.0, 0.0, 0.0, 0.0]),
    ("mA1&mB1", &[NEG, NEG, NEG, 2.0]),
];

pub const COMPOUND_ACTS_COMPOSITIONAL: [(&str, &[f64]); 4] = [
    ("mA0&mB?", &[1.0, 1.0, NEG, NEG]),
    ("mA0&mB1", &[NEG, 2.0, NEG, NEG]),
    ("mA1&mB?", &[NEG, NEG, 1.0, 1.0]),
    ("mA1&mB1", &[NEG, NEG, NEG, 2.0]),
];

pub const ATOMIC_ACTS_REPLACED: [(&str, &[f64]); 4] = [
    ("mA0", &[1.0, 1.0, NEG, NEG]),
    ("mA1", &[NEG, NEG, 1.0, 1.0]),
    ("mB?", &[0.0, 0.0, 0.0, 0.0]),
    ("mB1", &[NEG, 1.0, NEG, 1.0]),
];

pub const TWO_GAME_CONVERGED: [(&str, &[f64]); 2] = [("m0", &[1.0, NEG]), ("m1", &[NEG, 1.0])];
pub const TWO_GAME_FRESH: [(&str, &[f64]); 2] = [("m0", &[0.0, 0.0]), ("m1", &[0.0, 0.0])];

fn table(agents: &Agents, kind: RowKind, axis: Axis) -> InfoTable {
    info_table(&agents.snapshot().unwrap(), kind, axis).unwrap()
}

/// Every hand-built table check, labelled for reporting.
pub fn table_fixture_checks() -> Vec<(&'static str, Result<(), String>)> {
    let mut out = Vec::new();

    let fresh2 = Agents::new(&make_atomic_game(2).unwrap(), &conventional()).unwrap();
    out.push(("2-game fresh, states", compare_table(&table(&fresh2, RowKind::Atomic, Axis::States), &TWO_GAME_FRESH)));
    out.push(("2-game fresh, acts", compare_table(&table(&fresh2, RowKind::Atomic, Axis::Acts), &TWO_GAME_FRESH)));
    let conv2 = converged_atomic_two();
    out.push(("2-game converged, states", compare_table(&table(&conv2, RowKind::Atomic, Axis::States), &TWO_GAME_CONVERGED)));
    out.push(("2-game converged, acts", compare_table(&table(&conv2, RowKind::Atomic, Axis::Acts), &TWO_GAME_CONVERGED)));

    let mut conv = converged_two_sender(&conventional());
    out.push(("converged atomic x states", compare_table(&table(&conv, RowKind::Atomic, Axis::States), &ATOMIC_STATES)));
    out.push(("converged compound x acts", compare_table(&table(&conv, RowKind::Compound, Axis::Acts), &COMPOUND_ACTS)));
    let pre = conv.snapshot().unwrap();
    let expectation = compositional_expectation(&pre, &sym("mB0"), &sym("mB?")).unwrap();
    out.push(("compositional expectation", compare_table(&expectation.table, &COMPOUND_ACTS_COMPOSITIONAL)));
    out.push((
        "compositional expectation average 1.5",
        if (expectation.average_bits - 1.5).abs() <= 1e-12 {
            Ok(())
        } else {
            Err(format!("average {}", expectation.average_bits))
        },
    ));
    replace_b0(&mut conv);
    out.push(("conventional after replacement, compound x acts", compare_table(&table(&conv, RowKind::Compound, Axis::Acts), &COMPOUND_ACTS_LOST)));
    out.push(("after replacement, atomic x states", compare_table(&table(&conv, RowKind::Atomic, Axis::States), &ATOMIC_STATES_REPLACED)));

    let mut mini = converged_two_sender(&minimalist());
    out.push(("minimalist atomic x acts", compare_table(&table(&mini, RowKind::Atomic, Axis::Acts), &ATOMIC_STATES)));
    out.push(("minimalist compound x acts", compare_table(&table(&mini, RowKind::Compound, Axis::Acts), &COMPOUND_ACTS)));
    replace_b0(&mut mini);
    out.push(("minimalist after replacement, atomic x acts", compare_table(&table(&mini, RowKind::Atomic, Axis::Acts), &ATOMIC_ACTS_REPLACED)));
    out.push(("minimalist after replacement, compound x acts", compare_table(&table(&mini, RowKind::Compound, Axis::Acts), &COMPOUND_ACTS_COMPOSITIONAL)));

    let mut erasing = converged_two_sender(&generalist(IntroductionMode::Erasing));
    out.push(("generalist compound x acts", compare_table(&table(&erasing, RowKind::Compound, Axis::Acts), &COMPOUND_ACTS)));
    replace_b0(&mut erasing);
    out.push(("erasing generalist after replacement", compare_table(&table(&erasing, RowKind::Compound, Axis::Acts), &COMPOUND_ACTS_LOST)));

    let mut preserving = converged_two_sender(&generalist(IntroductionMode::Preserving));
    replace_b0(&mut preserving);
    out.push(("preserving generalist after replacement", compare_table(&table(&preserving, RowKind::Compound, Axis::Acts), &COMPOUND_ACTS_COMPOSITIONAL)));

    out
}

/// A random probability vector; about one entry in five is exactly zero.
pub fn random_distribution(n: usize, rng: &mut RngStream) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..n)
            .map(|_| if rng.next_unit() < 0.2 { 0.0 } else { rng.next_unit() })
            .collect();
        if let Some(p) = normalize(&raw) {
            return p;
        }
    }
}

/// Random policies for `spec`, with a strictly positive state prior.
pub fn random_snapshot(spec: &GameSpec, rng: &mut RngStream, fixed_act_prior: bool) -> PolicySnapshot {
    use urnsig_core::infotheory::{ReceiverRow, SenderPolicy};
    let state_prior = normalize(&(0..spec.num_states).map(|_| 0.05 + rng.next_unit()).collect::<Vec<_>>()).unwrap();
    let senders = spec
        .sender_alphabets
        .iter()
        .map(|alphabet| SenderPolicy {
            alphabet: alphabet.clone(),
            conditionals: (0..spec.num_states)
                .map(|_| random_distribution(alphabet.len(), rng))
                .collect(),
        })
        .collect();
    let receiver = spec
        .compound_signals()
        .into_iter()
        .map(|signal| ReceiverRow {
            signal,
            acts: random_distribution(spec.num_acts, rng),
        })
        .collect();
    let act_prior = fixed_act_prior.then(|| {
        normalize(&(0..spec.num_acts).map(|_| 0.05 + rng.next_unit()).collect::<Vec<_>>()).unwrap()
    });
    PolicySnapshot {
        state_prior,
        num_acts: spec.num_acts,
        senders,
        receiver,
        receiver_atomic: Vec::new(),
        act_prior,
    }
}

pub struct OracleGap {
    pub payoff: f64,
    pub state_signal_mi: f64,
    pub signal_act_mi: f64,
    pub average_info: f64,
}

impl OracleGap {
    pub fn max(&self) -> f64 {
        self.payoff
            .max(self.state_signal_mi)
            .max(self.signal_act_mi)
            .max(self.average_info)
    }
}

/// Largest analytic-vs-enumeration difference over `count` random snapshots.
pub fn oracle_gap(spec: &GameSpec, count: usize, seed: u64) -> OracleGap {
    let mut rng = RngStream::new(seed);
    let mut gap = OracleGap { payoff: 0.0, state_signal_mi: 0.0, signal_act_mi: 0.0, average_info: 0.0 };
    for i in 0..count {
        let snap = random_snapshot(spec, &mut rng, i % 2 == 1);
        snap.validate().unwrap();
        let e = enumerate_outcomes(spec, &snap).unwrap();
        let m = oracle_metrics(&e);

        gap.payoff = gap.payoff.max((expected_payoff(&snap, &spec.utility).unwrap() - m.expected_payoff).abs());
        gap.state_signal_mi = gap
            .state_signal_mi
            .max((sender_average_info(&snap).unwrap() - m.state_signal_mutual_info).abs());
        gap.average_info = gap
            .average_info
            .max((receiver_average_info(&snap).unwrap() - m.receiver_average_info).abs());

        let q = snap.signal_probabilities();
        let joint: Vec<Vec<f64>> = q
            .iter()
            .zip(&snap.receiver)
            .map(|(w, r)| r.acts.iter().map(|a| w * a).collect())
            .collect();
        gap.signal_act_mi = gap
            .signal_act_mi
            .max((mutual_info(&joint).unwrap() - m.signal_act_mutual_info).abs());
    }
    gap
}

pub fn check_softmax_shift(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed);
    for _ in 0..cases {
        let n = 1 + (rng.next_unit() * 8.0) as usize;
        let scores: Vec<f64> = (0..n).map(|_| (rng.next_unit() - 0.5) * 2e3).collect();
        let shift = (rng.next_unit() - 0.5) * 2e3;
        let t = 1.0 + rng.next_unit() * 1e4;
        let a = tempered_softmax(&scores, t).map_err(|e| e.to_string())?;
        let moved: Vec<f64> = scores.iter().map(|x| x + shift).collect();
        let b = tempered_softmax(&moved, t).map_err(|e| e.to_string())?;
        if let Some((x, y)) = a.iter().zip(&b).find(|(x, y)| (*x - *y).abs() > 1e-12) {
            return Err(format!("shift {shift} at T={t}: {x} vs {y}"));
        }
    }
    Ok(())
}

pub fn check_scale_invariance(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed);
    let key = ContextKey::single(sym("ctx"));
    for _ in 0..cases {
        let n = 2 + (rng.next_unit() * 6.0) as usize;
        let options: Vec<Symbol> = (0..n).map(|i| sym(&format!("o{i}"))).collect();
        let weights: Vec<f64> = (0..n).map(|_| 1e-3 + rng.next_unit() * 1e3).collect();
        let c = 1e-3 + rng.next_unit() * 1e3;
        let mut t = ReinforcementTable::new(options, 1.0).unwrap();
        t.set_weights(key.clone(), weights.clone()).unwrap();
        let a = t.proportional_distribution(&key).unwrap();
        t.set_weights(key.clone(), weights.iter().map(|w| w * c).collect()).unwrap();
        let b = t.proportional_distribution(&key).unwrap();
        if a.iter().zip(&b).any(|(x, y)| (x - y).abs() > 1e-12) {
            return Err(format!("scale {c} changed {a:?} to {b:?}"));
        }
    }
    Ok(())
}

pub fn check_signal_info_nonnegative(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed);
    for _ in 0..cases {
        let n = 2 + (rng.next_unit() * 7.0) as usize;
        let cond = random_distribution(n, &mut rng);
        let prior = normalize(&(0..n).map(|_| 1e-3 + rng.next_unit()).collect::<Vec<_>>()).unwrap();
        let v = signal_info(&cond, &prior).map_err(|e| e.to_string())?;
        if !(v >= 0.0) {
            return Err(format!("signal_info({cond:?}, {prior:?}) = {v}"));
        }
        let same = signal_info(&prior, &prior).map_err(|e| e.to_string())?;
        if same != 0.0 {
            return Err(format!("self-divergence {same}"));
        }
    }
    Ok(())
}

/// Random sender urns; replacing a message renames one row and leaves every
/// state-side cell bit-identical.
pub fn check_relabel_exactness(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed);
    let spec = make_two_sender_game();
    for _ in 0..cases {
        let mut agents = Agents::new(&spec, &conventional()).unwrap();
        for sender in &mut agents.senders {
            for s in 0..4 {
                let w: Vec<f64> = (0..2).map(|_| (rng.next_unit() * 50.0).floor()).collect();
                if w.iter().sum::<f64>() > 0.0 {
                    sender.table_mut().set_weights(state_key(s), w).unwrap();
                }
            }
        }
        let before = agents.snapshot().unwrap();
        replace_b0(&mut agents);
        let after = agents.snapshot().unwrap();
        for kind in [RowKind::Atomic, RowKind::Compound] {
            let a = info_table(&before, kind, Axis::States).map_err(|e| e.to_string())?;
            let b = info_table(&after, kind, Axis::States).map_err(|e| e.to_string())?;
            let renamed: Vec<String> = a.rows.iter().map(|r| r.replace("mB0", "mB?")).collect();
            if renamed != b.rows || a.cells != b.cells || a.conditionals != b.conditionals {
                return Err(format!("{kind:?} table changed under replacement"));
            }
        }
        if sender_average_info(&before).unwrap() != sender_average_info(&after).unwrap() {
            return Err("sender-side average info changed".into());
        }
    }
    Ok(())
}

/// Long-run urns R(a|mA0) = (n, n, 0, 0), R(a|mB0) = (n, 0, n, 0) under the
/// proportional rule.
pub fn check_naive_minimalist() -> Result<(), String> {
    let expected = [0.5, 0.25, 0.25, 0.0];
    for n in [1.0, 500.0, 123_456.0] {
        let mut r = MinimalistReceiver::new(4, 1.0, 1.0, ScoreScale::Raw).unwrap();
        r.table_mut()
            .set_weights(ContextKey::single(sym("mA0")), vec![n, n, 0.0, 0.0])
            .unwrap();
        r.table_mut()
            .set_weights(ContextKey::single(sym("mB0")), vec![n, 0.0, n, 0.0])
            .unwrap();
        let p = r
            .naive_distribution(&CompoundSignal::complete(vec![sym("mA0"), sym("mB0")]))
            .map_err(|e| e.to_string())?;
        if p.iter().zip(expected).any(|(x, y)| (x - y).abs() > 1e-12) {
            return Err(format!("n = {n}: {p:?}"));
        }
    }
    Ok(())
}
