//! Opaque identifiers for messages, states and acts, and the keys built from them.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Separator used when a [`ContextKey`] is rendered as a single string.
pub const KEY_SEPARATOR: char = '&';

/// An opaque, cheaply clonable identifier.
///
/// Symbols are compared and ordered by their text. They may not be empty and
/// may not contain the key separator, commas, quotes or whitespace, so that
/// they survive being embedded in CSV cells and joined context keys.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(text: impl AsRef<str>) -> Result<Self> {
        let text = text.as_ref();
        let bad = text.is_empty()
            || text
                .chars()
                .any(|c| c == KEY_SEPARATOR || c == ',' || c == '"' || c.is_whitespace());
        if bad {
            return Err(Error::InvalidSymbol(text.to_owned()));
        }
        Ok(Symbol(Arc::from(text)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Symbol::new(s).map_err(serde::de::Error::custom)
    }
}

/// Shorthand for building symbols from literals known to be valid.
///
/// # Panics
/// If `text` is not a valid symbol.
pub fn sym(text: &str) -> Symbol {
    Symbol::new(text).unwrap_or_else(|e| panic!("{e}"))
}

/// Label of state `i`, as used for sender urn contexts and table columns.
pub fn state_label(i: usize) -> Symbol {
    sym(&format!("s{i}"))
}

/// Label of act `i`.
pub fn act_label(i: usize) -> Symbol {
    sym(&format!("a{i}"))
}

/// Single-symbol context key for state `i`; the first 64 are cached.
pub fn state_key(i: usize) -> ContextKey {
    static CACHE: OnceLock<Vec<ContextKey>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| (0..64).map(|i| ContextKey::single(state_label(i))).collect());
    cache
        .get(i)
        .cloned()
        .unwrap_or_else(|| ContextKey::single(state_label(i)))
}

/// An ordered tuple of symbols identifying one urn in a reinforcement table.
///
/// The empty key is valid and denotes the unconditional context.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContextKey(Vec<Symbol>);

impl ContextKey {
    pub fn new(parts: Vec<Symbol>) -> Self {
        ContextKey(parts)
    }

    pub fn single(symbol: Symbol) -> Self {
        ContextKey(vec![symbol])
    }

    pub fn parts(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        self.0.contains(symbol)
    }

    /// Parses the `&`-joined form produced by `Display`. The empty string is the empty key.
    pub fn parse(text: &str) -> Result<Self> {
        if text.is_empty() {
            return Ok(ContextKey::default());
        }
        text.split(KEY_SEPARATOR)
            .map(Symbol::new)
            .collect::<Result<Vec<_>>>()
            .map(ContextKey)
    }

    pub(crate) fn rename(&mut self, old: &Symbol, new: &Symbol) -> bool {
        let mut touched = false;
        for part in &mut self.0 {
            if part == old {
                *part = new.clone();
                touched = true;
            }
        }
        touched
    }
}

impl fmt::Display for ContextKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, part) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "{KEY_SEPARATOR}")?;
            }
            write!(f, "{part}")?;
        }
        Ok(())
    }
}

/// One received signal: an atomic message per sender slot, possibly with gaps.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CompoundSignal {
    slots: Vec<Option<Symbol>>,
}

impl CompoundSignal {
    pub fn new(slots: Vec<Option<Symbol>>) -> Self {
        CompoundSignal { slots }
    }

    /// A signal with every slot present.
    pub fn complete(messages: Vec<Symbol>) -> Self {
        CompoundSignal {
            slots: messages.into_iter().map(Some).collect(),
        }
    }

    pub fn slots(&self) -> &[Option<Symbol>] {
        &self.slots
    }

    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    pub fn is_complete(&self) -> bool {
        self.slots.iter().all(Option::is_some)
    }

    /// Present messages in slot order, paired with their slot index.
    pub fn present(&self) -> impl Iterator<Item = (usize, &Symbol)> {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_ref().map(|s| (i, s)))
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        self.present().any(|(_, s)| s == symbol)
    }

    /// Key made of all present messages, in slot order.
    pub fn key(&self) -> ContextKey {
        ContextKey(self.present().map(|(_, s)| s.clone()).collect())
    }

    /// Every non-empty sub-combination of the present messages.
    ///
    /// Ordered by size, ties in slot order, so the full combination comes last.
    pub fn sub_combinations(&self) -> Vec<ContextKey> {
        let present: Vec<&Symbol> = self.present().map(|(_, s)| s).collect();
        let n = present.len();
        assert!(n < usize::BITS as usize, "too many sender slots");
        let mut keys = Vec::with_capacity((1usize << n) - 1);
        for mask in 1usize..(1 << n) {
            let parts = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| present[i].clone())
                .collect();
            keys.push(ContextKey(parts));
        }
        keys.sort_by_key(|k| k.len());
        keys
    }

    /// Replaces `old` by `new` wherever it occurs.
    pub fn renamed(&self, old: &Symbol, new: &Symbol) -> CompoundSignal {
        CompoundSignal {
            slots: self
                .slots
                .iter()
                .map(|s| match s {
                    Some(s) if s == old => Some(new.clone()),
                    other => other.clone(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for CompoundSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, slot) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, "{KEY_SEPARATOR}")?;
            }
            match slot {
                Some(s) => write!(f, "{s}")?,
                None => f.write_str("_")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_symbols() {
        assert!(Symbol::new("").is_err());
        assert!(Symbol::new("a&b").is_err());
        assert!(Symbol::new("a,b").is_err());
        assert!(Symbol::new("a b").is_err());
        assert!(Symbol::new("mB?").is_ok());
    }

    #[test]
    fn key_display_round_trips() {
        let key = ContextKey::new(vec![sym("mA0"), sym("mB1")]);
        assert_eq!(key.to_string(), "mA0&mB1");
        assert_eq!(ContextKey::parse("mA0&mB1").unwrap(), key);
        assert_eq!(ContextKey::parse("").unwrap(), ContextKey::default());
    }

    #[test]
    fn sub_combinations_of_pair() {
        let sig = CompoundSignal::complete(vec![sym("mA0"), sym("mB0")]);
        let subs = sig.sub_combinations();
        assert_eq!(
            subs,
            vec![
                ContextKey::single(sym("mA0")),
                ContextKey::single(sym("mB0")),
                ContextKey::new(vec![sym("mA0"), sym("mB0")]),
            ]
        );
    }

    #[test]
    fn partial_signal_skips_absent_slots() {
        let sig = CompoundSignal::new(vec![None, Some(sym("mB1"))]);
        assert!(!sig.is_complete());
        assert_eq!(sig.key(), ContextKey::single(sym("mB1")));
        assert_eq!(sig.sub_combinations().len(), 1);
        assert_eq!(sig.to_string(), "_&mB1");
    }
}
