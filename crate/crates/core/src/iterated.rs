//! Truth tables of iterated local rules.
//!
//! `f^{n+1}(w) = f^n(step(w))`, so the table of `f^{n+1}` is built from the
//! table of `f^n` by one pass over all windows. The pass walks windows in
//! lexicographic order as a depth-first traversal, carrying the partially
//! computed index of `step(w)`, so each window costs a constant number of
//! lookups regardless of `n`.

use rayon::prelude::*;

use crate::config::{checked_pow, Budget};
use crate::error::{Error, Result};
use crate::rule::RuleTable;
use crate::word::{index_of, Word};

/// Values of `f^n` on every window of `2rn+1` cells, indexed
/// lexicographically (leftmost cell most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterTable {
    states: usize,
    radius: usize,
    n: usize,
    values: Vec<u8>,
}

/// Minimum number of window prefixes, each filled by one parallel task.
const PREFIX_TARGET: usize = 4096;

impl IterTable {
    /// Table of `f^1`, i.e. the rule table itself.
    pub fn first(rule: &RuleTable) -> IterTable {
        IterTable {
            states: rule.states(),
            radius: rule.radius(),
            n: 1,
            values: rule.table().to_vec(),
        }
    }

    /// Table of `f^n`, built by composing from `f^1`.
    pub fn build(rule: &RuleTable, n: usize, budget: Budget) -> Result<IterTable> {
        if n == 0 {
            return Err(Error::invalid("iteration count must be at least 1"));
        }
        Self::check_budget(rule, n, budget)?;
        let mut table = IterTable::first(rule);
        while table.n < n {
            table = table.next(rule, budget)?;
        }
        Ok(table)
    }

    /// Bytes needed to hold the table of `f^n`.
    pub fn required_bytes(rule: &RuleTable, n: usize) -> u128 {
        checked_pow(rule.states(), rule.window(n))
    }

    fn check_budget(rule: &RuleTable, n: usize, budget: Budget) -> Result<()> {
        budget.check(
            || format!("the table of {rule} iterated {n} times"),
            Self::required_bytes(rule, n),
        )
    }

    /// Table of `f^{n+1}` from the table of `f^n`.
    pub fn next(&self, rule: &RuleTable, budget: Budget) -> Result<IterTable> {
        assert_eq!(
            (rule.states(), rule.radius()),
            (self.states, self.radius),
            "table and rule disagree"
        );
        let n = self.n + 1;
        Self::check_budget(rule, n, budget)?;
        let s = self.states;
        let len = rule.window(n);
        let total = checked_pow(s, len) as usize;

        // Split the windows by prefix so that tasks write disjoint chunks.
        let mut prefix_len = 0;
        while prefix_len < len && checked_pow(s, prefix_len) < PREFIX_TARGET as u128 {
            prefix_len += 1;
        }
        let chunk = total / checked_pow(s, prefix_len) as usize;
        let mut values = vec![0u8; total];
        let walker = Walker {
            rule,
            prev: &self.values,
            states: s,
            len,
            width: rule.width(),
            nb_mod: checked_pow(s, rule.width()) as usize,
        };
        values
            .par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(p, out)| {
                let prefix = Word::from_index(p as u64, prefix_len, s);
                let mut nb = 0usize;
                let mut step_idx = 0usize;
                for (k, &c) in prefix.symbols().iter().enumerate() {
                    (nb, step_idx) = walker.push(k, nb, step_idx, c);
                }
                let mut pos = 0;
                walker.fill(prefix_len, nb, step_idx, out, &mut pos);
                debug_assert_eq!(pos, out.len());
            });
        Ok(IterTable {
            states: s,
            radius: self.radius,
            n,
            values,
        })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Window length `2rn+1`.
    pub fn window(&self) -> usize {
        2 * self.radius * self.n + 1
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u8> {
        self.values
    }

    #[inline]
    pub fn get(&self, index: usize) -> u8 {
        self.values[index]
    }

    /// `f^n` on an explicit window given as symbols.
    pub fn eval(&self, cells: &[u8]) -> u8 {
        debug_assert_eq!(cells.len(), self.window());
        self.values[index_of(cells, self.states) as usize]
    }
}

struct Walker<'a> {
    rule: &'a RuleTable,
    prev: &'a [u8],
    states: usize,
    len: usize,
    width: usize,
    nb_mod: usize,
}

impl Walker<'_> {
    /// Appends cell `c` at depth `k`; once a full neighborhood is available
    /// the corresponding cell of `step(w)` is appended to its index.
    #[inline]
    fn push(&self, k: usize, nb: usize, step_idx: usize, c: u8) -> (usize, usize) {
        let nb = (nb * self.states + usize::from(c)) % self.nb_mod;
        let step_idx = if k + 1 >= self.width {
            step_idx * self.states + usize::from(self.rule.lookup(nb))
        } else {
            step_idx
        };
        (nb, step_idx)
    }

    fn fill(&self, depth: usize, nb: usize, step_idx: usize, out: &mut [u8], pos: &mut usize) {
        if depth == self.len {
            out[*pos] = self.prev[step_idx];
            *pos += 1;
            return;
        }
        for c in 0..self.states as u8 {
            let (nb2, idx2) = self.push(depth, nb, step_idx, c);
            self.fill(depth + 1, nb2, idx2, out, pos);
        }
    }
}
