//! One-bit protocols for XOR-linear and affine rules.
//!
//! If `f(u) = L(u) ⊕ b` with `L` linear then `f^n(w) = L^n(w) ⊕ f^n(0…0)`,
//! and `L^n(x·y) = L^n(x·0) ⊕ L^n(0·y)`. Alice sends `L^n(x·0)`, the value
//! her part would produce against an all-zero partner.

use super::{Direction, Message, OneRoundProtocol};
use crate::error::{Error, Result};
use crate::matrix::SplitSpec;
use crate::rule::RuleTable;
use crate::word::Word;

#[derive(Debug, Clone)]
pub struct LinearProtocol {
    rule: RuleTable,
    linear: RuleTable,
    split: SplitSpec,
    /// `f^n` of the all-zero window.
    trail: u8,
}

/// Protocol at the split where Alice holds the `rn` cells left of the center.
pub fn linear_protocol(rule: &RuleTable, n: usize) -> Result<LinearProtocol> {
    LinearProtocol::new(rule, SplitSpec::new(n, rule.radius() * n))
}

impl LinearProtocol {
    pub fn new(rule: &RuleTable, split: SplitSpec) -> Result<Self> {
        split.validate(rule)?;
        if !rule.detect_linearity()?.is_linear_or_affine() {
            return Err(Error::invalid(format!(
                "{rule} is neither linear nor affine"
            )));
        }
        let trail = rule.iterate(split.n, &Word::repeat(0, rule.window(split.n)))?;
        Ok(LinearProtocol {
            rule: rule.clone(),
            linear: rule.linear_part()?,
            split,
            trail,
        })
    }

    pub fn rule(&self) -> &RuleTable {
        &self.rule
    }

    fn linear_value(&self, alice: &Word, bob: &Word) -> u8 {
        self.linear
            .iterate(self.split.n, &alice.concat(bob))
            .expect("window length matches")
    }
}

impl OneRoundProtocol for LinearProtocol {
    fn name(&self) -> String {
        "linear".into()
    }

    fn direction(&self) -> Direction {
        Direction::AliceToBob
    }

    fn cost(&self) -> u32 {
        1
    }

    fn split(&self) -> SplitSpec {
        self.split
    }

    fn encode(&self, alice: &Word) -> Message {
        let bob_len = self.split.bob(&self.rule);
        let v = self.linear_value(alice, &Word::repeat(0, bob_len));
        Message::new(u64::from(v), 1)
    }

    fn decode(&self, bob: &Word, message: Message) -> u8 {
        let own = self.linear_value(&Word::repeat(0, self.split.i), bob);
        message.bits() as u8 ^ own ^ self.trail
    }
}
