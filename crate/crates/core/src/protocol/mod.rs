//! One-round protocols and their exhaustive verification.
//!
//! A one-round protocol lets one party send a fixed-length message after
//! which the other party outputs `f^n` of the joint window. Verification
//! compares the receiver's output against the iterated table on every input
//! pair, optionally with the center cell pinned to one state.

mod linear;
mod rule178;
mod rule218;
mod tree;

use std::fmt;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::config::{checked_pow, Budget};
use crate::error::{Error, Result};
use crate::iterated::IterTable;
use crate::matrix::SplitSpec;
use crate::rule::RuleTable;
use crate::word::Word;

pub use linear::{linear_protocol, LinearProtocol};
pub use rule178::{rule178_displayed_set, rule178_fooling_set, Rule178Protocol};
pub use rule218::{
    additive, rule218_family_sets, rule218_lower_bound_family, rule218_params, LowerBoundFamily,
    Rule218Params, Rule218Protocol,
};
pub use tree::{
    tree_matrix, tree_multiround_cost, tree_value, verify_tree, Speaker, TranscriptStep,
    TreeInstance, TreeTranscript, TreeVerification, MAX_EXHAUSTIVE_TREE_INSTANCES,
    MAX_TREE_MATRIX_HEIGHT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

/// A message of `len` bits, first bit most significant in `bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Message {
    bits: u64,
    len: u32,
}

impl Message {
    pub fn new(bits: u64, len: u32) -> Self {
        assert!(len <= 64, "messages are limited to 64 bits");
        let mask = if len == 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        Message {
            bits: bits & mask,
            len,
        }
    }

    pub fn empty() -> Self {
        Message { bits: 0, len: 0 }
    }

    /// Appends the low `width` bits of `value`.
    pub fn push(self, value: u64, width: u32) -> Self {
        assert!(width < 64 && value < (1u64 << width), "field does not fit");
        Message::new(self.bits << width | value, self.len + width)
    }

    /// Splits off the leading `width` bits.
    pub fn pop(self, width: u32) -> (u64, Message) {
        assert!(width <= self.len);
        let rest = self.len - width;
        let head = if width == 0 { 0 } else { self.bits >> rest };
        (head, Message::new(self.bits, rest))
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in (0..self.len).rev() {
            write!(f, "{}", self.bits >> k & 1)?;
        }
        Ok(())
    }
}

/// A one-round protocol for a fixed rule, iteration count and split.
///
/// `encode` sees the sender's word and `decode` the receiver's word; for
/// `AliceToBob` the sender holds the first `split().i` cells.
pub trait OneRoundProtocol: Sync {
    fn name(&self) -> String;
    fn direction(&self) -> Direction;
    /// Length of every message.
    fn cost(&self) -> u32;
    fn split(&self) -> SplitSpec;
    fn encode(&self, sender: &Word) -> Message;
    fn decode(&self, receiver: &Word, message: Message) -> u8;
}

/// Input pair on which the receiver's output disagrees with `f^n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Counterexample {
    pub alice: Word,
    pub bob: Word,
    pub expected: u8,
    pub got: u8,
}

/// Counterexamples kept in memory; the count is always exact.
pub const MAX_STORED_COUNTEREXAMPLES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub domain_size: u64,
    pub counterexample_count: u64,
    /// The smallest counterexamples in (alice, bob) order, at most
    /// `MAX_STORED_COUNTEREXAMPLES` of them.
    pub counterexamples: Vec<Counterexample>,
}

impl Verification {
    pub fn holds(&self) -> bool {
        self.counterexample_count == 0
    }
}

/// Compares the protocol's output with `f^n` on every input pair.
///
/// With `center` set, only windows whose middle cell equals it are checked.
/// Messages are computed once per sender word and outputs once per receiver
/// word and distinct message, so the cost is dominated by the table of `f^n`.
pub fn verify_one_round(
    protocol: &dyn OneRoundProtocol,
    rule: &RuleTable,
    center: Option<u8>,
    budget: Budget,
) -> Result<Verification> {
    let split = protocol.split();
    split.validate(rule)?;
    let s = rule.states();
    if let Some(c) = center {
        if usize::from(c) >= s {
            return Err(Error::invalid(format!("center state {c} is not below {s}")));
        }
    }
    let alice_len = split.i;
    let bob_len = split.bob(rule);
    let rows = checked_pow(s, alice_len) as u64;
    let cols = checked_pow(s, bob_len) as u64;
    let table = IterTable::build(rule, split.n, budget)?;

    let mid = rule.radius() * split.n;
    let allowed = |word: &Word, offset: usize| match center {
        Some(c) if (offset..offset + word.len()).contains(&mid) => {
            word.symbols()[mid - offset] == c
        }
        _ => true,
    };
    let alice_words: Vec<Word> = (0..rows)
        .map(|r| Word::from_index(r, alice_len, s))
        .filter(|w| allowed(w, 0))
        .collect();
    let bob_words: Vec<Word> = (0..cols)
        .map(|c| Word::from_index(c, bob_len, s))
        .filter(|w| allowed(w, alice_len))
        .collect();

    let (senders, receivers) = match protocol.direction() {
        Direction::AliceToBob => (&alice_words, &bob_words),
        Direction::BobToAlice => (&bob_words, &alice_words),
    };
    let sent: Vec<Message> = senders.par_iter().map(|w| protocol.encode(w)).collect();
    if let Some(bad) = sent.iter().find(|m| m.len() != protocol.cost()) {
        return Err(Error::invalid(format!(
            "{} sent a {}-bit message, cost is {}",
            protocol.name(),
            bad.len(),
            protocol.cost()
        )));
    }
    let mut distinct: Vec<Message> = sent.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let msg_id: FxHashMap<Message, usize> =
        distinct.iter().enumerate().map(|(k, m)| (*m, k)).collect();
    let sent_id: Vec<usize> = sent.iter().map(|m| msg_id[m]).collect();
    let outputs: Vec<Vec<u8>> = receivers
        .par_iter()
        .map(|w| distinct.iter().map(|&m| protocol.decode(w, m)).collect())
        .collect();

    let per_row: Vec<(u64, Vec<Counterexample>)> = alice_words
        .par_iter()
        .enumerate()
        .map(|(a, x)| {
            let base = x.index(s) * cols;
            let mut count = 0;
            let mut found = Vec::new();
            for (b, y) in bob_words.iter().enumerate() {
                let expected = table.get((base + y.index(s)) as usize);
                let got = match protocol.direction() {
                    Direction::AliceToBob => outputs[b][sent_id[a]],
                    Direction::BobToAlice => outputs[a][sent_id[b]],
                };
                if got != expected {
                    count += 1;
                    if found.len() < MAX_STORED_COUNTEREXAMPLES {
                        found.push(Counterexample {
                            alice: x.clone(),
                            bob: y.clone(),
                            expected,
                            got,
                        });
                    }
                }
            }
            (count, found)
        })
        .collect();

    let mut counterexample_count = 0;
    let mut counterexamples = Vec::new();
    for (count, found) in per_row {
        counterexample_count += count;
        let room = MAX_STORED_COUNTEREXAMPLES - counterexamples.len();
        counterexamples.extend(found.into_iter().take(room));
    }
    Ok(Verification {
        domain_size: alice_words.len() as u64 * bob_words.len() as u64,
        counterexample_count,
        counterexamples,
    })
}

/// Counterexamples shown in reports.
pub const REPORTED_COUNTEREXAMPLES: usize = 32;

/// Serialized verification result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub rule: RuleTable,
    pub n: usize,
    pub protocol: String,
    pub cost: u32,
    pub domain_size: u64,
    pub counterexample_count: u64,
    /// `alice|bob` bitstrings.
    pub first_counterexamples: Vec<String>,
}

impl VerificationReport {
    pub fn new(protocol: &dyn OneRoundProtocol, rule: &RuleTable, v: &Verification) -> Self {
        VerificationReport {
            rule: rule.clone(),
            n: protocol.split().n,
            protocol: protocol.name(),
            cost: protocol.cost(),
            domain_size: v.domain_size,
            counterexample_count: v.counterexample_count,
            first_counterexamples: v
                .counterexamples
                .iter()
                .take(REPORTED_COUNTEREXAMPLES)
                .map(|c| format!("{}|{}", c.alice, c.bob))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct ConstantZero(SplitSpec);

    impl OneRoundProtocol for ConstantZero {
        fn name(&self) -> String {
            "constant-0".into()
        }
        fn direction(&self) -> Direction {
            Direction::AliceToBob
        }
        fn cost(&self) -> u32 {
            0
        }
        fn split(&self) -> SplitSpec {
            self.0
        }
        fn encode(&self, _: &Word) -> Message {
            Message::empty()
        }
        fn decode(&self, _: &Word, _: Message) -> u8 {
            0
        }
    }

    #[test]
    fn message_fields_round_trip() {
        let m = Message::empty().push(1, 1).push(5, 3).push(0, 2);
        assert_eq!(m.len(), 6);
        assert_eq!(m.to_string(), "110100");
        let (a, m) = m.pop(1);
        let (b, m) = m.pop(3);
        let (c, m) = m.pop(2);
        assert_eq!((a, b, c), (1, 5, 0));
        assert!(m.is_empty());
    }

    #[test]
    fn constant_protocol_fails_on_178() {
        let rule = RuleTable::eca(178).unwrap();
        let v = verify_one_round(
            &ConstantZero(SplitSpec::new(2, 2)),
            &rule,
            None,
            Budget::default(),
        )
        .unwrap();
        assert_eq!(v.domain_size, 32);
        assert!(v.counterexample_count > 0);
        assert_eq!(v.counterexample_count as usize, v.counterexamples.len());
        let mut sorted = v.counterexamples.clone();
        sorted.sort();
        assert_eq!(sorted, v.counterexamples);
        for c in &v.counterexamples {
            assert_eq!(
                rule.iterate(2, &c.alice.concat(&c.bob)).unwrap(),
                c.expected
            );
            assert_eq!(c.got, 0);
        }
    }

    #[test]
    fn constant_protocol_is_correct_for_rule_0() {
        let rule = RuleTable::eca(0).unwrap();
        let v = verify_one_round(
            &ConstantZero(SplitSpec::new(3, 2)),
            &rule,
            Some(0),
            Budget::default(),
        )
        .unwrap();
        assert!(v.holds());
        assert_eq!(v.domain_size, 64);
    }

    #[test]
    fn report_lists_at_most_32() {
        let rule = RuleTable::eca(255).unwrap();
        let p = ConstantZero(SplitSpec::new(3, 3));
        let v = verify_one_round(&p, &rule, None, Budget::default()).unwrap();
        let rep = VerificationReport::new(&p, &rule, &v);
        assert_eq!(rep.counterexample_count, 128);
        assert_eq!(rep.first_counterexamples.len(), 32);
        assert_eq!(rep.first_counterexamples[0], "000|0000");
    }
}
