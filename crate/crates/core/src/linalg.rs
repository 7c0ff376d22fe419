//! Exact linear algebra: rational row reduction and generic rank over the
//! expression ring.

use num_traits::{One, Zero};

use crate::expr::{Expr, RatExpr};
use crate::matrix::Matrix;
use crate::scalar::Rational;

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(rows: &mut Vec<Vec<Rational>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.retain(|row| row.iter().any(|x| !x.is_zero()));
    pivots
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of `{ v : A v = 0 }` for `A` given by rows with `ncols` columns.
pub fn kernel(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let pivots = rref(&mut m);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (row, &p) in m.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        out.push(v);
    }
    out
}

/// Canonical basis (rows in RREF) of the span of the given vectors.
pub fn span_basis(vectors: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut m = vectors.to_vec();
    rref(&mut m);
    m
}

/// Rank over the field of fractions of the expression ring, by fraction-free
/// elimination. Each row is first cleared of denominators.
pub fn generic_rank(rows: &[Vec<RatExpr>]) -> usize {
    let mut m: Vec<Vec<Expr>> = rows.iter().map(|r| clear_denominators(r)).collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(rank, p);
        let piv = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&piv) {
                *x = &(&piv[c] * &*x) - &(&f * y);
            }
        }
        rank += 1;
    }
    rank
}

pub fn generic_rank_matrix(m: &Matrix<RatExpr>) -> usize {
    let rows: Vec<Vec<RatExpr>> = (0..m.rows()).map(|i| m.row(i)).collect();
    generic_rank(&rows)
}

/// Multiply a row by the product of its distinct denominators.
pub fn clear_denominators(row: &[RatExpr]) -> Vec<Expr> {
    let mut dens: Vec<Expr> = Vec::new();
    for q in row {
        if !q.den().is_one() && !dens.contains(q.den()) {
            dens.push(q.den().clone());
        }
    }
    row.iter()
        .map(|q| {
            let mut e = q.num().clone();
            let mut skipped = false;
            for d in &dens {
                if !skipped && d == q.den() {
                    skipped = true;
                } else {
                    e = &e * d;
                }
            }
            e
        })
        .collect()
}
