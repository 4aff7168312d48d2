//! Exact partition number of tiny matrices.
//!
//! Minimum number of monochromatic combinatorial rectangles partitioning all
//! entries. The search covers the lowest uncovered cell with every
//! monochromatic rectangle of uncovered cells containing it, memoized on the
//! uncovered set. Duplicate rows and columns are merged first, which leaves
//! the partition number unchanged.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::matrix::IterationMatrix;

pub const MAX_PARTITION_ENTRIES: usize = 64;

pub fn partition_number_exact(matrix: &IterationMatrix) -> Result<u32> {
    let total = matrix.rows() * matrix.cols();
    if total > MAX_PARTITION_ENTRIES {
        return Err(Error::unsupported(format!(
            "exact partition number is limited to {MAX_PARTITION_ENTRIES} entries, matrix has {total}"
        )));
    }
    if total == 0 {
        return Ok(0);
    }
    let m = matrix.deduplicated();
    let search = Search {
        rows: m.rows(),
        cols: m.cols(),
        values: (0..m.rows()).flat_map(|r| m.row(r)).collect(),
        memo: FxHashMap::default(),
    };
    let full = if m.rows() * m.cols() == 64 {
        u64::MAX
    } else {
        (1u64 << (m.rows() * m.cols())) - 1
    };
    let mut search = search;
    Ok(search.solve(full))
}

struct Search {
    rows: usize,
    cols: usize,
    values: Vec<u8>,
    memo: FxHashMap<u64, u32>,
}

impl Search {
    fn bit(&self, r: usize, c: usize) -> u64 {
        1 << (r * self.cols + c)
    }

    fn solve(&mut self, uncovered: u64) -> u32 {
        if uncovered == 0 {
            return 0;
        }
        if let Some(&v) = self.memo.get(&uncovered) {
            return v;
        }
        let cell = uncovered.trailing_zeros() as usize;
        let (r0, c0) = (cell / self.cols, cell % self.cols);
        let value = self.values[cell];
        let other_rows: Vec<usize> = (0..self.rows).filter(|&r| r != r0).collect();
        let mut best = u32::MAX;
        for row_mask in 0u32..(1 << other_rows.len()) {
            let mut rows = vec![r0];
            rows.extend(
                other_rows
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| row_mask >> k & 1 == 1)
                    .map(|(_, &r)| r),
            );
            // Columns usable with every chosen row.
            let usable: Vec<usize> = (0..self.cols)
                .filter(|&c| {
                    rows.iter().all(|&r| {
                        uncovered & self.bit(r, c) != 0 && self.values[r * self.cols + c] == value
                    })
                })
                .collect();
            if !usable.contains(&c0) {
                continue;
            }
            let others: Vec<usize> = usable.into_iter().filter(|&c| c != c0).collect();
            for col_mask in 0u32..(1 << others.len()) {
                let mut rect = 0u64;
                let cols = std::iter::once(c0).chain(
                    others
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| col_mask >> k & 1 == 1)
                        .map(|(_, &c)| c),
                );
                for c in cols {
                    for &r in &rows {
                        rect |= self.bit(r, c);
                    }
                }
                let sub = self.solve(uncovered & !rect);
                best = best.min(sub + 1);
            }
        }
        self.memo.insert(uncovered, best);
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn explicit(rows: &[&[u8]]) -> IterationMatrix {
        let rows: Vec<Vec<u8>> = rows.iter().map(|r| r.to_vec()).collect();
        IterationMatrix::from_rows(2, &rows).unwrap()
    }

    #[test]
    fn small_cases() {
        assert_eq!(partition_number_exact(&explicit(&[&[1]])).unwrap(), 1);
        assert_eq!(
            partition_number_exact(&explicit(&[&[0, 1], &[1, 0]])).unwrap(),
            4
        );
        assert_eq!(
            partition_number_exact(&explicit(&[&[1, 1, 1], &[1, 1, 1]])).unwrap(),
            1
        );
        // Identity 3x3: three ones, and the zeros need three more rectangles.
        assert_eq!(
            partition_number_exact(&explicit(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])).unwrap(),
            6
        );
        // Upper-triangular 2x2: [[1,1],[0,1]] takes 3.
        assert_eq!(
            partition_number_exact(&explicit(&[&[1, 1], &[0, 1]])).unwrap(),
            3
        );
    }

    #[test]
    fn cap() {
        let big = IterationMatrix::from_rows(2, &vec![vec![0u8; 13]; 5]).unwrap();
        assert!(matches!(
            partition_number_exact(&big),
            Err(Error::Unsupported(_))
        ));
    }

    /// Brute force over all assignments of cells to rectangle labels.
    fn brute(rows: &[&[u8]]) -> u32 {
        let (r, c) = (rows.len(), rows[0].len());
        let cells: Vec<(usize, usize)> = (0..r).flat_map(|i| (0..c).map(move |j| (i, j))).collect();
        for k in 1..=cells.len() as u32 {
            let mut labels = vec![0u32; cells.len()];
            loop {
                // A labeling is valid if each label class is a monochromatic
                // combinatorial rectangle.
                let ok = (0..k).all(|l| {
                    let members: Vec<_> = cells
                        .iter()
                        .zip(&labels)
                        .filter(|(_, &x)| x == l)
                        .map(|(p, _)| *p)
                        .collect();
                    if members.is_empty() {
                        return true;
                    }
                    let rs: Vec<usize> = members.iter().map(|p| p.0).collect();
                    let cs: Vec<usize> = members.iter().map(|p| p.1).collect();
                    let v = rows[members[0].0][members[0].1];
                    cells.iter().zip(&labels).all(|(&(i, j), &x)| {
                        let inside = rs.contains(&i) && cs.contains(&j);
                        (inside == (x == l)) && (!inside || rows[i][j] == v)
                    })
                });
                if ok {
                    return k;
                }
                let mut pos = 0;
                loop {
                    if pos == labels.len() {
                        break;
                    }
                    labels[pos] += 1;
                    if labels[pos] < k {
                        break;
                    }
                    labels[pos] = 0;
                    pos += 1;
                }
                if pos == labels.len() {
                    break;
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn agrees_with_brute_force() {
        let cases: [&[&[u8]]; 4] = [
            &[&[0, 1], &[1, 1]],
            &[&[0, 1, 1], &[1, 0, 1]],
            &[&[1, 0], &[0, 1], &[1, 1]],
            &[&[0, 0, 1], &[0, 1, 1]],
        ];
        for rows in cases {
            assert_eq!(
                partition_number_exact(&explicit(rows)).unwrap(),
                brute(rows),
                "{rows:?}"
            );
        }
    }
}
