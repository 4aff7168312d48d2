//! Communication matrices of split functions.
//!
//! For a split `(n, i)` Alice holds the leftmost `i` cells of the window of
//! `f^n` and Bob the remaining `2rn+1-i`. Rows are indexed by Alice's word,
//! columns by Bob's, both in lexicographic order, so the matrix is the truth
//! table of `f^n` read row-major.

use std::fmt;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::config::{checked_pow, Budget};
use crate::error::{Error, Result};
use crate::iterated::IterTable;
use crate::rule::RuleTable;

/// Alice's share of the window of `f^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SplitSpec {
    pub n: usize,
    /// Number of cells held by Alice.
    pub i: usize,
}

impl SplitSpec {
    pub fn new(n: usize, i: usize) -> Self {
        SplitSpec { n, i }
    }

    /// Checks the split against the window of `rule`.
    pub fn validate(&self, rule: &RuleTable) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("iteration count must be at least 1"));
        }
        let window = rule.window(self.n);
        if self.i > window {
            return Err(Error::invalid(format!(
                "split gives Alice {} cells of a {window}-cell window",
                self.i
            )));
        }
        Ok(())
    }

    /// Bob's cell count.
    pub fn bob(&self, rule: &RuleTable) -> usize {
        rule.window(self.n) - self.i
    }
}

impl fmt::Display for SplitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} i={}", self.n, self.i)
    }
}

/// What a matrix was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixSource {
    Rule { rule: RuleTable, split: SplitSpec },
    Tree { height: usize },
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Entries {
    /// Rows packed least-significant bit first; padding bits are zero.
    Bits {
        words_per_row: usize,
        words: Vec<u64>,
    },
    Symbols(Vec<u8>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationMatrix {
    states: usize,
    rows: usize,
    cols: usize,
    entries: Entries,
    source: MatrixSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinctCounts {
    pub rows: u64,
    pub cols: u64,
    pub d: u64,
}

impl DistinctCounts {
    pub fn new(rows: u64, cols: u64) -> Self {
        DistinctCounts {
            rows,
            cols,
            d: rows.min(cols),
        }
    }

    /// One-round complexity `⌈log₂ d⌉`.
    pub fn cc1(&self) -> u32 {
        ceil_log2(self.d)
    }
}

/// `⌈log₂ x⌉`, with `x <= 1` mapping to 0.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

fn words_for(cols: usize) -> usize {
    cols.div_ceil(64)
}

impl IterationMatrix {
    /// Bytes occupied by a matrix of this shape.
    pub fn required_bytes(states: usize, rows: u128, cols: u128) -> u128 {
        if states == 2 {
            rows.saturating_mul(cols.div_ceil(64)).saturating_mul(8)
        } else {
            rows.saturating_mul(cols)
        }
    }

    /// Matrix with `entry(r, c) = f(r, c)`.
    pub fn from_fn(
        states: usize,
        rows: usize,
        cols: usize,
        source: MatrixSource,
        f: impl Fn(usize, usize) -> u8,
    ) -> Result<Self> {
        if states < 2 {
            return Err(Error::invalid("a matrix needs at least two states"));
        }
        let entries = if states == 2 {
            let wpr = words_for(cols);
            let mut words = vec![0u64; rows * wpr];
            for r in 0..rows {
                let row = &mut words[r * wpr..(r + 1) * wpr];
                for c in 0..cols {
                    match f(r, c) {
                        0 => {}
                        1 => row[c / 64] |= 1 << (c % 64),
                        v => return Err(Error::invalid(format!("entry {v} is not binary"))),
                    }
                }
            }
            Entries::Bits {
                words_per_row: wpr,
                words,
            }
        } else {
            let mut v = Vec::with_capacity(rows * cols);
            for r in 0..rows {
                for c in 0..cols {
                    let e = f(r, c);
                    if usize::from(e) >= states {
                        return Err(Error::invalid(format!(
                            "entry {e} is not a state of {states}"
                        )));
                    }
                    v.push(e);
                }
            }
            Entries::Symbols(v)
        };
        Ok(IterationMatrix {
            states,
            rows,
            cols,
            entries,
            source,
        })
    }

    /// Matrix from explicit rows.
    pub fn from_rows(states: usize, rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("rows have different lengths"));
        }
        Self::from_fn(states, rows.len(), cols, MatrixSource::Explicit, |r, c| {
            rows[r][c]
        })
    }

    /// Binary matrix from packed rows (least-significant bit first).
    pub(crate) fn from_packed_rows(
        rows: usize,
        cols: usize,
        words: Vec<u64>,
        source: MatrixSource,
    ) -> Self {
        let wpr = words_for(cols);
        assert_eq!(words.len(), rows * wpr);
        IterationMatrix {
            states: 2,
            rows,
            cols,
            entries: Entries::Bits {
                words_per_row: wpr,
                words,
            },
            source,
        }
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn source(&self) -> &MatrixSource {
        &self.source
    }

    #[inline]
    pub fn entry(&self, r: usize, c: usize) -> u8 {
        match &self.entries {
            Entries::Bits {
                words_per_row,
                words,
            } => ((words[r * words_per_row + c / 64] >> (c % 64)) & 1) as u8,
            Entries::Symbols(v) => v[r * self.cols + c],
        }
    }

    /// Row `r` as symbols.
    pub fn row(&self, r: usize) -> Vec<u8> {
        (0..self.cols).map(|c| self.entry(r, c)).collect()
    }

    /// Packed words of row `r`, for binary matrices.
    pub fn packed_row(&self, r: usize) -> Option<&[u64]> {
        match &self.entries {
            Entries::Bits {
                words_per_row,
                words,
            } => Some(&words[r * words_per_row..(r + 1) * words_per_row]),
            Entries::Symbols(_) => None,
        }
    }

    pub fn transpose(&self) -> IterationMatrix {
        let source = self.source.clone();
        match &self.entries {
            Entries::Bits { .. } => {
                let wpr = words_for(self.rows);
                let mut words = vec![0u64; self.cols * wpr];
                for r in 0..self.rows {
                    let row = self.packed_row(r).expect("binary");
                    for (wi, &word) in row.iter().enumerate() {
                        let mut bits = word;
                        while bits != 0 {
                            let c = wi * 64 + bits.trailing_zeros() as usize;
                            words[c * wpr + r / 64] |= 1 << (r % 64);
                            bits &= bits - 1;
                        }
                    }
                }
                IterationMatrix::from_packed_rows(self.cols, self.rows, words, source)
            }
            Entries::Symbols(v) => {
                let mut t = vec![0u8; v.len()];
                for r in 0..self.rows {
                    for c in 0..self.cols {
                        t[c * self.rows + r] = v[r * self.cols + c];
                    }
                }
                IterationMatrix {
                    states: self.states,
                    rows: self.cols,
                    cols: self.rows,
                    entries: Entries::Symbols(t),
                    source,
                }
            }
        }
    }

    /// Number of distinct rows, by hashing with exact comparison.
    pub fn distinct_rows(&self) -> usize {
        self.distinct_row_indices().len()
    }

    /// Index of the first occurrence of each distinct row, ascending.
    pub fn distinct_row_indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        match &self.entries {
            Entries::Bits {
                words_per_row,
                words,
            } => {
                let mut seen: FxHashSet<&[u64]> = FxHashSet::default();
                if *words_per_row == 0 {
                    return if self.rows > 0 { vec![0] } else { vec![] };
                }
                for (r, row) in words.chunks(*words_per_row).enumerate() {
                    if seen.insert(row) {
                        out.push(r);
                    }
                }
            }
            Entries::Symbols(v) => {
                let mut seen: FxHashSet<&[u8]> = FxHashSet::default();
                if self.cols == 0 {
                    return if self.rows > 0 { vec![0] } else { vec![] };
                }
                for (r, row) in v.chunks(self.cols).enumerate() {
                    if seen.insert(row) {
                        out.push(r);
                    }
                }
            }
        }
        out
    }

    /// Sub-matrix keeping the listed rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> IterationMatrix {
        IterationMatrix::from_fn(
            self.states,
            rows.len(),
            self.cols,
            self.source.clone(),
            |r, c| self.entry(rows[r], c),
        )
        .expect("entries already validated")
    }

    /// The matrix with duplicate rows and duplicate columns removed.
    pub fn deduplicated(&self) -> IterationMatrix {
        let rows = self.select_rows(&self.distinct_row_indices());
        let t = rows.transpose();
        t.select_rows(&t.distinct_row_indices()).transpose()
    }

    /// True when every entry equals the first.
    pub fn is_constant(&self) -> bool {
        if self.rows == 0 || self.cols == 0 {
            return true;
        }
        let first = self.entry(0, 0);
        (0..self.rows).all(|r| (0..self.cols).all(|c| self.entry(r, c) == first))
    }
}

/// Matrix of `f^n` for the given split.
pub fn build_matrix(rule: &RuleTable, split: SplitSpec, budget: Budget) -> Result<IterationMatrix> {
    split.validate(rule)?;
    let s = rule.states();
    let rows = checked_pow(s, split.i);
    let cols = checked_pow(s, split.bob(rule));
    let need = IterationMatrix::required_bytes(s, rows, cols)
        .saturating_add(IterTable::required_bytes(rule, split.n));
    budget.check(|| format!("the matrix of {rule} at {split}"), need)?;
    let table = IterTable::build(rule, split.n, budget)?;
    Ok(matrix_from_table(rule, split, &table))
}

/// Reshapes an iterated table into the matrix of one split.
pub fn matrix_from_table(rule: &RuleTable, split: SplitSpec, table: &IterTable) -> IterationMatrix {
    assert_eq!(table.n(), split.n);
    let s = rule.states();
    let rows = checked_pow(s, split.i) as usize;
    let cols = checked_pow(s, split.bob(rule)) as usize;
    let values = table.values();
    let source = MatrixSource::Rule {
        rule: rule.clone(),
        split,
    };
    if s == 2 {
        let wpr = words_for(cols);
        let mut words = vec![0u64; rows * wpr];
        for r in 0..rows {
            let src = &values[r * cols..(r + 1) * cols];
            let dst = &mut words[r * wpr..(r + 1) * wpr];
            for (c, &v) in src.iter().enumerate() {
                dst[c / 64] |= u64::from(v) << (c % 64);
            }
        }
        IterationMatrix::from_packed_rows(rows, cols, words, source)
    } else {
        IterationMatrix {
            states: s,
            rows,
            cols,
            entries: Entries::Symbols(values.to_vec()),
            source,
        }
    }
}

/// Distinct row and column counts; columns are counted on the transpose.
pub fn distinct_counts(matrix: &IterationMatrix) -> DistinctCounts {
    let rows = matrix.distinct_rows() as u64;
    let cols = matrix.transpose().distinct_rows() as u64;
    DistinctCounts::new(rows, cols)
}
