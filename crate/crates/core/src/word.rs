use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite word over dense states `0..|S|`; index 0 is the leftmost cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Self {
        Word(symbols)
    }

    /// `len` copies of `symbol`.
    pub fn repeat(symbol: u8, len: usize) -> Self {
        Word(vec![symbol; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn into_symbols(self) -> Vec<u8> {
        self.0
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// Checks that every symbol is below `states`.
    pub fn check_states(&self, states: usize) -> Result<()> {
        match self.0.iter().position(|&s| usize::from(s) >= states) {
            Some(i) => Err(Error::invalid(format!(
                "symbol {} at position {i} is not a state of a {states}-state rule",
                self.0[i]
            ))),
            None => Ok(()),
        }
    }

    /// Lexicographic rank among words of the same length, leftmost symbol
    /// most significant.
    pub fn index(&self, states: usize) -> u64 {
        index_of(&self.0, states)
    }

    /// Inverse of [`Word::index`].
    pub fn from_index(mut index: u64, len: usize, states: usize) -> Word {
        let s = states as u64;
        let mut v = vec![0u8; len];
        for slot in v.iter_mut().rev() {
            *slot = (index % s) as u8;
            index /= s;
        }
        Word(v)
    }
}

pub(crate) fn index_of(symbols: &[u8], states: usize) -> u64 {
    let s = states as u64;
    symbols.iter().fold(0u64, |acc, &c| acc * s + u64::from(c))
}

impl From<Vec<u8>> for Word {
    fn from(v: Vec<u8>) -> Self {
        Word(v)
    }
}

impl AsRef<[u8]> for Word {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

/// Digits `0-9a-z`; states beyond 35 are not representable in this form.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| {
                c.to_digit(36)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::invalid(format!("`{c}` is not a state digit")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.0 {
            match char::from_digit(u32::from(c), 36) {
                Some(ch) => write!(f, "{ch}")?,
                None => write!(f, "[{c}]")?,
            }
        }
        Ok(())
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
