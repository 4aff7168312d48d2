//! Fooling sets.
//!
//! A fooling set for value `v` is a list of pairs `(x_k, y_k)` with
//! `f(x_k y_k) = v` such that for `k ≠ j` one of the cross products
//! `f(x_k y_j)`, `f(x_j y_k)` differs from `v`. No monochromatic rectangle
//! contains two of its pairs, and no two `x_k` share a row (nor two `y_k` a
//! column), so a valid set of size `s` gives `d ≥ s`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SplitSpec;
use crate::rule::RuleTable;
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoolingSet {
    pub pairs: Vec<(Word, Word)>,
    /// Common value on the diagonal.
    pub value: u8,
}

impl FoolingSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FoolingViolation {
    /// `f(x_k y_k) ≠ v`.
    Diagonal { k: usize, got: u8 },
    /// Both cross products of pairs `k < j` equal `v`.
    Cross { k: usize, j: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoolingVerdict {
    pub holds: bool,
    pub size: usize,
    pub violation: Option<FoolingViolation>,
}

/// Checks the fooling-set conditions by evaluating every diagonal and cross
/// product with `f^n`. Reports the first violation in pair order.
pub fn verify_fooling_set(
    rule: &RuleTable,
    split: SplitSpec,
    fs: &FoolingSet,
) -> Result<FoolingVerdict> {
    split.validate(rule)?;
    let bob = split.bob(rule);
    for (k, (x, y)) in fs.pairs.iter().enumerate() {
        if x.len() != split.i || y.len() != bob {
            return Err(Error::invalid(format!(
                "pair {k} has lengths ({}, {}), split needs ({}, {bob})",
                x.len(),
                y.len(),
                split.i
            )));
        }
    }
    let eval = |x: &Word, y: &Word| rule.iterate(split.n, &x.concat(y));
    let verdict = |violation| FoolingVerdict {
        holds: false,
        size: fs.len(),
        violation: Some(violation),
    };
    for (k, (x, y)) in fs.pairs.iter().enumerate() {
        let got = eval(x, y)?;
        if got != fs.value {
            return Ok(verdict(FoolingViolation::Diagonal { k, got }));
        }
    }
    for k in 0..fs.len() {
        for j in k + 1..fs.len() {
            let (xk, yk) = &fs.pairs[k];
            let (xj, yj) = &fs.pairs[j];
            if eval(xk, yj)? == fs.value && eval(xj, yk)? == fs.value {
                return Ok(verdict(FoolingViolation::Cross { k, j }));
            }
        }
    }
    Ok(FoolingVerdict {
        holds: true,
        size: fs.len(),
        violation: None,
    })
}
