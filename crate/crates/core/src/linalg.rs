//! Exact Gaussian elimination over the rationals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::coeffring::Rational;

/// Result of solving an augmented system `A x = b`.
#[derive(Debug, Clone, Default)]
pub struct Solution {
    /// Unknowns whose value is forced by the system.
    pub determined: BTreeMap<usize, Rational>,
    /// Indices of input rows that reduced to `0 = nonzero`.
    pub inconsistent: Vec<usize>,
    pub rank: usize,
}

/// Reduces `rows` (each of length `ncols`) to reduced row echelon form in place
/// and returns the pivot columns.
pub fn rref(rows: &mut [Vec<Rational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&t| !rows[t][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][col];
        if !inv.is_one() {
            for x in rows[r].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
        }
        let pivot_row = rows[r].clone();
        for (t, row) in rows.iter_mut().enumerate() {
            if t == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Solves the system whose rows are `[a_0 .. a_{n-1} | b]`.
pub fn solve(mut rows: Vec<Vec<Rational>>, nvars: usize) -> Solution {
    let original = rows.clone();
    let pivots = rref(&mut rows, nvars);
    let rank = pivots.len();
    let mut determined = BTreeMap::new();
    for (t, &col) in pivots.iter().enumerate() {
        if (0..nvars).all(|c| c == col || rows[t][c].is_zero()) {
            determined.insert(col, rows[t][nvars].clone());
        }
    }
    let mut inconsistent = Vec::new();
    if rows[rank..].iter().any(|row| !row[nvars].is_zero()) {
        // Report the original rows that are violated by any particular solution.
        let mut x = vec![Rational::zero(); nvars];
        for (t, &col) in pivots.iter().enumerate() {
            x[col] = rows[t][nvars].clone();
        }
        for (i, row) in original.iter().enumerate() {
            let lhs: Rational = row[..nvars].iter().zip(&x).map(|(a, b)| a * b).sum();
            if lhs != row[nvars] {
                inconsistent.push(i);
            }
        }
    }
    Solution { determined, inconsistent, rank }
}

/// Exact inverse of a square matrix, or `None` if it is singular.
pub fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut rows: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut rows, n);
    if pivots.len() < n {
        return None;
    }
    Some(rows.into_iter().map(|r| r[n..].to_vec()).collect())
}
