//! Matrix rank modulo small primes.
//!
//! The rank over GF(p) of an integer matrix never exceeds its rational rank,
//! so the maximum over several primes is a lower bound on the rational rank.
//! Duplicate rows and columns are removed first; this does not change the
//! rank.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IterationMatrix;

/// Primes are limited so that products of residues fit in `u64`.
pub const MAX_PRIME: u32 = 1 << 16;

pub fn check_prime(p: u32) -> Result<()> {
    if p < 2 {
        return Err(Error::invalid(format!("{p} is not a prime")));
    }
    if p > MAX_PRIME {
        return Err(Error::invalid(format!("prime {p} exceeds {MAX_PRIME}")));
    }
    if (2..).take_while(|d| d * d <= p).any(|d| p % d == 0) {
        return Err(Error::invalid(format!("{p} is not a prime")));
    }
    Ok(())
}

/// Rank over GF(2) of packed rows, each `words` long.
fn rank_gf2(mut rows: Vec<Vec<u64>>, cols: usize) -> u64 {
    let mut rank = 0usize;
    for c in 0..cols {
        let (w, bit) = (c / 64, 1u64 << (c % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = std::mem::take(&mut rows[rank]);
        for row in rows.iter_mut().skip(rank + 1) {
            if row[w] & bit != 0 {
                for (a, b) in row.iter_mut().zip(&pivot).skip(w) {
                    *a ^= b;
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank as u64
}

fn inverse_mod(a: u64, p: u64) -> u64 {
    // p is prime, so a^(p-2) is the inverse.
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn rank_gfp(mut rows: Vec<Vec<u64>>, cols: usize, p: u64) -> u64 {
    let mut rank = 0usize;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = inverse_mod(rows[rank][c], p);
        let pivot: Vec<u64> = rows[rank].iter().map(|&v| v * inv % p).collect();
        for row in rows.iter_mut().skip(rank + 1) {
            let factor = row[c];
            if factor != 0 {
                for (a, &b) in row.iter_mut().zip(&pivot).skip(c) {
                    *a = (*a + (p - factor) * b) % p;
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank as u64
}

/// Rank of `matrix` over GF(p).
pub fn rank_mod_p(matrix: &IterationMatrix, p: u32) -> Result<u64> {
    check_prime(p)?;
    let m = matrix.deduplicated();
    Ok(rank_mod_p_dedup(&m, p))
}

fn rank_mod_p_dedup(m: &IterationMatrix, p: u32) -> u64 {
    if p == 2 && m.states() == 2 {
        let rows = (0..m.rows())
            .map(|r| m.packed_row(r).expect("binary").to_vec())
            .collect();
        rank_gf2(rows, m.cols())
    } else {
        let p = u64::from(p);
        let rows = (0..m.rows())
            .map(|r| m.row(r).into_iter().map(|v| u64::from(v) % p).collect())
            .collect();
        rank_gfp(rows, m.cols(), p)
    }
}

/// Maximum rank over the given primes.
pub fn rank_lower_bound(matrix: &IterationMatrix, primes: &[u32]) -> Result<u64> {
    Ok(rank_report(matrix, primes, None)?.max)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRank {
    pub prime: u32,
    /// `None` when the elimination was skipped by the work cap.
    pub rank: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub per_prime: Vec<PrimeRank>,
    pub max: u64,
    /// Shape after removing duplicate rows and columns.
    pub reduced_rows: u64,
    pub reduced_cols: u64,
}

/// Per-prime ranks. With a work cap, eliminations over odd primes (and
/// over 2 for non-binary matrices) estimated above `cap` multiply-adds are
/// skipped; binary GF(2) elimination is always run.
pub fn rank_report(
    matrix: &IterationMatrix,
    primes: &[u32],
    cap: Option<u64>,
) -> Result<RankReport> {
    if primes.is_empty() {
        return Err(Error::invalid("prime list is empty"));
    }
    for &p in primes {
        check_prime(p)?;
    }
    let m = matrix.deduplicated();
    let (r, c) = (m.rows() as u64, m.cols() as u64);
    let work = r.saturating_mul(c).saturating_mul(r.min(c));
    let per_prime: Vec<PrimeRank> = primes
        .iter()
        .map(|&p| {
            let bitset = p == 2 && m.states() == 2;
            let skip = !bitset && cap.is_some_and(|cap| work > cap);
            PrimeRank {
                prime: p,
                rank: (!skip).then(|| rank_mod_p_dedup(&m, p)),
            }
        })
        .collect();
    let max = per_prime.iter().filter_map(|p| p.rank).max().unwrap_or(0);
    Ok(RankReport {
        per_prime,
        max,
        reduced_rows: r,
        reduced_cols: c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Budget, DEFAULT_PRIMES};
    use crate::matrix::{build_matrix, SplitSpec};
    use crate::rule::RuleTable;

    fn explicit(states: usize, rows: &[&[u8]]) -> IterationMatrix {
        let rows: Vec<Vec<u8>> = rows.iter().map(|r| r.to_vec()).collect();
        IterationMatrix::from_rows(states, &rows).unwrap()
    }

    #[test]
    fn prime_checks() {
        assert!(check_prime(0).is_err());
        assert!(check_prime(1).is_err());
        assert!(check_prime(9).is_err());
        for p in DEFAULT_PRIMES {
            assert!(check_prime(p).is_ok());
        }
    }

    #[test]
    fn zero_and_single_row() {
        let z = explicit(2, &[&[0, 0], &[0, 0]]);
        assert_eq!(rank_lower_bound(&z, &DEFAULT_PRIMES).unwrap(), 0);
        let m = build_matrix(
            &RuleTable::eca(204).unwrap(),
            SplitSpec::new(3, 3),
            Budget::default(),
        )
        .unwrap();
        assert_eq!(rank_lower_bound(&m, &DEFAULT_PRIMES).unwrap(), 1);
    }

    #[test]
    fn rule_90_xor_structure() {
        let m = build_matrix(
            &RuleTable::eca(90).unwrap(),
            SplitSpec::new(3, 3),
            Budget::default(),
        )
        .unwrap();
        assert_eq!(rank_mod_p(&m, 2).unwrap(), 2);
        assert_eq!(rank_mod_p(&m, 3).unwrap(), 2);
        assert_eq!(rank_lower_bound(&m, &DEFAULT_PRIMES).unwrap(), 2);
    }

    #[test]
    fn field_dependence() {
        // Rows 110, 011, 101 sum to zero over GF(2) but are independent over GF(3).
        let m = explicit(2, &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
        assert_eq!(rank_mod_p(&m, 2).unwrap(), 2);
        assert_eq!(rank_mod_p(&m, 3).unwrap(), 3);
        assert_eq!(rank_lower_bound(&m, &[2, 3]).unwrap(), 3);
        // Three states: [[1,2],[2,1]] has determinant -3.
        let m = explicit(3, &[&[1, 2], &[2, 1]]);
        assert_eq!(rank_mod_p(&m, 3).unwrap(), 1);
        assert_eq!(rank_mod_p(&m, 5).unwrap(), 2);
    }

    #[test]
    fn rejects_bad_primes() {
        let m = explicit(2, &[&[1]]);
        assert!(rank_lower_bound(&m, &[1]).is_err());
        assert!(rank_lower_bound(&m, &[]).is_err());
    }

    #[test]
    fn cap_skips_only_expensive_primes() {
        let m = explicit(2, &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
        let rep = rank_report(&m, &[2, 3], Some(1)).unwrap();
        assert_eq!(rep.per_prime[0].rank, Some(2));
        assert_eq!(rep.per_prime[1].rank, None);
        assert_eq!(rep.max, 2);
    }
}
