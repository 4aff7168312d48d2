//! Rule 218 with the center cell at 0.
//!
//! Alice holds `x = x_n … x_1` (left to right, `x_1` next to the center) and
//! Bob holds the center followed by `y = y_1 … y_n`. A word is additive when
//! its 1s are isolated and any two consecutive 1s are separated by an odd
//! number of 0s; such regions evolve like rule 90 under rule 218.

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use super::{Direction, Message, OneRoundProtocol};
use crate::config::Budget;
use crate::error::{Error, Result};
use crate::iterated::IterTable;
use crate::matrix::{ceil_log2, SplitSpec};
use crate::rule::RuleTable;
use crate::word::Word;

/// Whether no two 1s are adjacent and every 0-run between two 1s is odd.
pub fn additive(w: &Word) -> bool {
    let mut last_one: Option<usize> = None;
    for (pos, &v) in w.symbols().iter().enumerate() {
        if v == 1 {
            if let Some(prev) = last_one {
                let gap = pos - prev - 1;
                if gap % 2 == 0 {
                    return false;
                }
            }
            last_one = Some(pos);
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule218Params {
    /// Largest `i` with `x_i … x_1 0` additive.
    pub alpha: usize,
    /// Largest `j` with `0 y_1 … y_j` additive.
    pub beta: usize,
    /// Smallest `i` with `x_i = 1`, or 0.
    pub l: usize,
    /// Smallest `j` with `y_j = 1`, or 0.
    pub r: usize,
    /// `x_alpha … x_1`.
    pub x_prime: Word,
    /// `y_1 … y_beta`.
    pub y_prime: Word,
    /// `f^alpha(x′ 0 0^alpha)`, or 0 when `alpha = 0`.
    pub a: u8,
}

fn rule218() -> RuleTable {
    RuleTable::eca(218).expect("valid code")
}

fn zeros(len: usize) -> Word {
    Word::repeat(0, len)
}

/// Largest `j ≤ len` such that `0 y_1 … y_j` is additive.
fn bob_alpha(y: &Word) -> usize {
    (0..=y.len())
        .rev()
        .find(|&j| additive(&zeros(1).concat(&Word::new(y.symbols()[..j].to_vec()))))
        .unwrap_or(0)
}

fn alice_alpha(x: &Word) -> usize {
    let n = x.len();
    (0..=n)
        .rev()
        .find(|&i| additive(&Word::new(x.symbols()[n - i..].to_vec()).concat(&zeros(1))))
        .unwrap_or(0)
}

/// Smallest 1-based position of a 1 counted from the center, or 0.
fn first_one_from_center(cells_from_center: impl Iterator<Item = u8>) -> usize {
    cells_from_center
        .enumerate()
        .find(|&(_, v)| v == 1)
        .map_or(0, |(k, _)| k + 1)
}

fn alice_params(rule: &RuleTable, x: &Word) -> (usize, usize, u8) {
    let n = x.len();
    let alpha = alice_alpha(x);
    let l = first_one_from_center(x.symbols().iter().rev().copied());
    let a = if alpha == 0 {
        0
    } else {
        let x_prime = Word::new(x.symbols()[n - alpha..].to_vec());
        let window = x_prime.concat(&zeros(1 + alpha));
        rule.iterate(alpha, &window).expect("window length matches")
    };
    (alpha, l, a)
}

/// Computes the protocol quantities for Alice's `x` and Bob's `y` (center
/// excluded).
pub fn rule218_params(x: &Word, y: &Word) -> Result<Rule218Params> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "x has {} cells and y has {}",
            x.len(),
            y.len()
        )));
    }
    x.check_states(2)?;
    y.check_states(2)?;
    let rule = rule218();
    let (alpha, l, a) = alice_params(&rule, x);
    let beta = bob_alpha(y);
    let n = x.len();
    Ok(Rule218Params {
        alpha,
        beta,
        l,
        r: first_one_from_center(y.symbols().iter().copied()),
        x_prime: Word::new(x.symbols()[n - alpha..].to_vec()),
        y_prime: Word::new(y.symbols()[..beta].to_vec()),
        a,
    })
}

/// Alice sends `(alpha, l, a)`; Bob runs the case analysis on his side.
#[derive(Debug, Clone)]
pub struct Rule218Protocol {
    n: usize,
    rule: RuleTable,
}

impl Rule218Protocol {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("the rule 218 protocol needs n >= 2"));
        }
        Ok(Rule218Protocol { n, rule: rule218() })
    }

    pub fn rule(&self) -> &RuleTable {
        &self.rule
    }

    fn field_width(&self) -> u32 {
        ceil_log2(self.n as u64 + 1)
    }

    fn f(&self, k: usize, cells: Vec<u8>) -> u8 {
        if k == 0 {
            return cells[0];
        }
        self.rule
            .iterate(k, &Word::new(cells))
            .expect("window length matches")
    }
}

impl OneRoundProtocol for Rule218Protocol {
    fn name(&self) -> String {
        "rule218".into()
    }

    fn direction(&self) -> Direction {
        Direction::AliceToBob
    }

    fn cost(&self) -> u32 {
        2 * self.field_width() + 1
    }

    fn split(&self) -> SplitSpec {
        SplitSpec::new(self.n, self.n)
    }

    fn encode(&self, x: &Word) -> Message {
        let (alpha, l, a) = alice_params(&self.rule, x);
        Message::empty()
            .push(alpha as u64, self.field_width())
            .push(l as u64, self.field_width())
            .push(u64::from(a), 1)
    }

    /// `bob` is the center followed by `y`; the center is taken to be 0.
    fn decode(&self, bob: &Word, message: Message) -> u8 {
        let n = self.n;
        let (alpha, rest) = message.pop(self.field_width());
        let (l, rest) = rest.pop(self.field_width());
        let (a, _) = rest.pop(1);
        let (alpha, l, a) = (alpha as usize, l as usize, a as u8);
        let y = &bob.symbols()[1..];
        let beta = bob_alpha(&Word::new(y.to_vec()));
        let r = first_one_from_center(y.iter().copied());
        let with_alice = |alice: Vec<u8>| {
            let mut cells = alice;
            cells.push(0);
            cells.extend_from_slice(y);
            self.f(n, cells)
        };

        if l == 0 {
            return with_alice(vec![0; n]);
        }
        if r == 0 {
            return if alpha == n { a } else { 1 };
        }
        if (l + r - 1) % 2 == 1 {
            if alpha != beta {
                return 1;
            }
            let k = alpha;
            let mut cells = vec![0u8; k + 1];
            cells.extend_from_slice(&y[..k.min(y.len())]);
            cells.resize(2 * k + 1, 0);
            return a ^ self.f(k, cells);
        }
        if l + 1 >= r {
            if l >= r + 3 {
                let mut alice = vec![1u8; (n + 1).saturating_sub(l)];
                alice.resize(n, 0);
                with_alice(alice)
            } else {
                1
            }
        } else if r == alpha + 1 {
            a
        } else {
            1
        }
    }
}

/// The Alice-word sets `S_3, S_5, …` and whether all their rows differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBoundFamily {
    pub n: usize,
    /// `(2k+1, S_{2k+1})` for `2k+1 ≤ n`.
    pub sets: Vec<(usize, Vec<Word>)>,
    pub total: usize,
    /// All rows of the center-0 matrix indexed by the union are distinct.
    pub distinct: bool,
}

/// `S_{2k+1} = {1^{n-2k-1} 0^{2k+1}} ∪ {1^{n-2k-1} 0^a 1 0^b : a, b odd,
/// b ≥ 3, a + b = 2k}`.
pub fn rule218_family_sets(n: usize) -> Vec<(usize, Vec<Word>)> {
    let mut sets = Vec::new();
    for k in (1..).take_while(|k| 2 * k < n) {
        let ones = n - 2 * k - 1;
        let mut set = vec![Word::new([vec![1u8; ones], vec![0u8; 2 * k + 1]].concat())];
        for b in (3..2 * k).step_by(2) {
            let a = 2 * k - b;
            set.push(Word::new(
                [vec![1u8; ones], vec![0u8; a], vec![1u8], vec![0u8; b]].concat(),
            ));
        }
        sets.push((2 * k + 1, set));
    }
    sets
}

/// Builds the family and checks row distinctness in the matrix of `f^n` with
/// the center fixed to 0.
pub fn rule218_lower_bound_family(n: usize, budget: Budget) -> Result<LowerBoundFamily> {
    if n < 3 {
        return Err(Error::invalid("the family needs n >= 3"));
    }
    let sets = rule218_family_sets(n);
    let table = IterTable::build(&rule218(), n, budget)?;
    let bob_words = 1usize << (n + 1);
    let rows_with_center_0 = 1usize << n;
    let mut seen: FxHashSet<&[u8]> = FxHashSet::default();
    let mut total = 0;
    let mut distinct = true;
    for x in sets.iter().flat_map(|(_, s)| s) {
        let start = x.index(2) as usize * bob_words;
        total += 1;
        distinct &= seen.insert(&table.values()[start..start + rows_with_center_0]);
    }
    Ok(LowerBoundFamily {
        n,
        sets,
        total,
        distinct,
    })
}
