//! Rule 178 at the split where Alice holds the `n` cells left of the center.
//!
//! Under rule 178 the blocks `01` and `10` swap at every step, so a run of
//! equal cells shrinks by one cell per step from each end while alternating
//! regions stay alternating. Bob's part of the window therefore only matters
//! through its center value `c` and the length `k` of the run of `c` that
//! starts it.

use super::{Direction, Message, OneRoundProtocol};
use crate::fooling::FoolingSet;
use crate::matrix::{ceil_log2, SplitSpec};
use crate::rule::RuleTable;
use crate::word::Word;

/// Bob sends the center value and the length of its leading run.
#[derive(Debug, Clone)]
pub struct Rule178Protocol {
    n: usize,
    rule: RuleTable,
}

impl Rule178Protocol {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "iteration count must be at least 1");
        Rule178Protocol {
            n,
            rule: RuleTable::eca(178).expect("valid code"),
        }
    }

    pub fn rule(&self) -> &RuleTable {
        &self.rule
    }

    fn run_width(&self) -> u32 {
        ceil_log2(self.n as u64 + 2)
    }

    /// The center value and the length of the run of it starting Bob's word.
    pub fn message_fields(bob: &Word) -> (u8, usize) {
        let cells = bob.symbols();
        let c = cells[0];
        (c, cells.iter().take_while(|&&v| v == c).count())
    }
}

impl OneRoundProtocol for Rule178Protocol {
    fn name(&self) -> String {
        "rule178".into()
    }

    fn direction(&self) -> Direction {
        Direction::BobToAlice
    }

    fn cost(&self) -> u32 {
        1 + self.run_width()
    }

    fn split(&self) -> SplitSpec {
        SplitSpec::new(self.n, self.n)
    }

    fn encode(&self, bob: &Word) -> Message {
        let (c, k) = Self::message_fields(bob);
        Message::empty()
            .push(u64::from(c), 1)
            .push(k as u64, self.run_width())
    }

    fn decode(&self, alice: &Word, message: Message) -> u8 {
        let (c, rest) = message.pop(1);
        let (k, _) = rest.pop(self.run_width());
        let (c, k) = (c as u8, (k as usize).min(self.n + 1));
        let mut bob = vec![c; k];
        if k <= self.n {
            bob.push(1 - c);
        }
        bob.resize(self.n + 1, 0);
        self.rule
            .iterate(self.n, &alice.concat(&Word::new(bob)))
            .expect("window length matches")
    }
}

/// The pair family `(0^{n-2k-1} 1 0^{2k}, c^{2k} c̄ c^{n-2k})` for
/// `0 ≤ 2k ≤ n-1` and both values of `c`, in that order, with the diagonal
/// value `n mod 2`.
///
/// Alice's word does not depend on `c`, so each Alice word appears twice and
/// the family is not a fooling set; see [`rule178_fooling_set`].
pub fn rule178_displayed_set(n: usize) -> FoolingSet {
    let mut pairs = Vec::new();
    for k in (0..n).filter(|k| 2 * k < n) {
        for c in [0u8, 1] {
            pairs.push((alice_word(n, k), bob_word(n, k, c)));
        }
    }
    FoolingSet {
        pairs,
        value: (n % 2) as u8,
    }
}

/// A fooling set of size `⌈n/2⌉` for `f^n` at split `(n, n)`: the pairs of
/// the displayed family with `c = 0`. Their diagonal value is `(n+1) mod 2`.
pub fn rule178_fooling_set(n: usize) -> FoolingSet {
    let pairs = (0..n)
        .filter(|k| 2 * k < n)
        .map(|k| (alice_word(n, k), bob_word(n, k, 0)))
        .collect();
    FoolingSet {
        pairs,
        value: ((n + 1) % 2) as u8,
    }
}

fn alice_word(n: usize, k: usize) -> Word {
    let mut x = vec![0u8; n];
    x[n - 2 * k - 1] = 1;
    Word::new(x)
}

fn bob_word(n: usize, k: usize, c: u8) -> Word {
    let mut y = vec![c; n + 1];
    y[2 * k] = 1 - c;
    Word::new(y)
}
