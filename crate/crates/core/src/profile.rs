//! One-round complexity profiles over all splits.
//!
//! The rows of split `i` are the subfunctions of `f^n` obtained by fixing the
//! first `i` cells. The rows of split `i+1` are the `|S|` equal parts of the
//! rows of split `i`, so the distinct rows of every split come out of one
//! pass that deduplicates level by level. Columns are handled the same way
//! on the table with the cell order reversed.

use std::borrow::Cow;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::config::{checked_pow, Config};
use crate::error::Result;
use crate::iterated::IterTable;
use crate::matrix::{ceil_log2, matrix_from_table, DistinctCounts, SplitSpec};
use crate::rank::rank_report;
use crate::rule::RuleTable;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub i: usize,
    pub rows: u64,
    pub cols: u64,
    pub d: u64,
    pub cc1: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CCProfile {
    pub rule: RuleTable,
    pub n: usize,
    pub splits: Vec<SplitRecord>,
    pub worst_cc1: u32,
    /// Splits attaining `worst_cc1`, ascending.
    pub s_n: Vec<usize>,
    /// Rank lower bound on the split with the largest `d`.
    pub rank_lb: u64,
}

impl CCProfile {
    /// Largest `d` over all splits.
    pub fn worst_d(&self) -> u64 {
        self.splits.iter().map(|s| s.d).max().unwrap_or(1)
    }

    /// First split with the largest `d`.
    pub fn worst_d_split(&self) -> usize {
        let best = self.worst_d();
        self.splits.iter().find(|s| s.d == best).map_or(0, |s| s.i)
    }

    pub const CSV_HEADER: &'static str = "rule,n,i,rows,cols,d,cc1";

    /// One CSV line per split, without the header.
    pub fn csv_lines(&self) -> Vec<String> {
        self.splits
            .iter()
            .map(|s| {
                format!(
                    "{},{},{},{},{},{},{}",
                    self.rule, self.n, s.i, s.rows, s.cols, s.d, s.cc1
                )
            })
            .collect()
    }
}

/// Number of distinct subfunctions after fixing the first `k` cells, for
/// `k = 0..=len`. `values` is a table over `len` cells of `states` symbols.
pub fn prefix_class_counts(values: &[u8], states: usize, len: usize) -> Vec<u64> {
    assert_eq!(values.len() as u128, checked_pow(states, len));
    let mut counts = Vec::with_capacity(len + 1);
    counts.push(1);
    let mut level: Cow<[u8]> = Cow::Borrowed(values);
    let mut row_len = values.len();
    for _ in 0..len {
        let part = row_len / states;
        let mut seen: FxHashSet<&[u8]> = FxHashSet::default();
        let mut next = Vec::new();
        for piece in level.chunks(part) {
            if seen.insert(piece) {
                next.extend_from_slice(piece);
            }
        }
        counts.push(seen.len() as u64);
        drop(seen);
        level = Cow::Owned(next);
        row_len = part;
    }
    counts
}

/// The table with the cell order reversed.
fn reverse_cells(values: &[u8], states: usize, len: usize) -> Vec<u8> {
    let mut out = vec![0u8; values.len()];
    if states == 2 {
        for (idx, &v) in values.iter().enumerate() {
            let rev = if len == 0 {
                0
            } else {
                idx.reverse_bits() >> (usize::BITS as usize - len)
            };
            out[rev] = v;
        }
    } else {
        for (idx, &v) in values.iter().enumerate() {
            let (mut x, mut rev) = (idx, 0usize);
            for _ in 0..len {
                rev = rev * states + x % states;
                x /= states;
            }
            out[rev] = v;
        }
    }
    out
}

/// Distinct row and column counts of every split of one iterated table.
pub fn split_counts(table: &IterTable) -> Vec<DistinctCounts> {
    let (s, len) = (table.states(), table.window());
    let rows = prefix_class_counts(table.values(), s, len);
    let reversed = reverse_cells(table.values(), s, len);
    let cols_rev = prefix_class_counts(&reversed, s, len);
    (0..=len)
        .map(|i| DistinctCounts::new(rows[i], cols_rev[len - i]))
        .collect()
}

fn check_profile_budget(rule: &RuleTable, n: usize, cfg: &Config) -> Result<()> {
    // Table, reversed table and one deduplicated level.
    cfg.budget().check(
        || format!("the profile of {rule} at n={n}"),
        IterTable::required_bytes(rule, n).saturating_mul(3),
    )
}

/// Profile of `f^n` over all splits `0..=2rn+1`.
pub fn cc1_profile(rule: &RuleTable, n: usize, cfg: &Config) -> Result<CCProfile> {
    check_profile_budget(rule, n, cfg)?;
    let table = IterTable::build(rule, n, cfg.budget())?;
    profile_from_table(rule, &table, cfg)
}

/// Profile from an already computed table of `f^n`.
pub fn profile_from_table(rule: &RuleTable, table: &IterTable, cfg: &Config) -> Result<CCProfile> {
    let n = table.n();
    check_profile_budget(rule, n, cfg)?;
    let splits: Vec<SplitRecord> = split_counts(table)
        .into_iter()
        .enumerate()
        .map(|(i, c)| SplitRecord {
            i,
            rows: c.rows,
            cols: c.cols,
            d: c.d,
            cc1: ceil_log2(c.d),
        })
        .collect();
    let worst_cc1 = splits.iter().map(|s| s.cc1).max().unwrap_or(0);
    let s_n = splits
        .iter()
        .filter(|s| s.cc1 == worst_cc1)
        .map(|s| s.i)
        .collect();
    let mut profile = CCProfile {
        rule: rule.clone(),
        n,
        splits,
        worst_cc1,
        s_n,
        rank_lb: 0,
    };
    let split = SplitSpec::new(n, profile.worst_d_split());
    let matrix = matrix_from_table(rule, split, table);
    profile.rank_lb = rank_report(&matrix, &cfg.primes, Some(cfg.rank_work_cap))?.max;
    Ok(profile)
}
