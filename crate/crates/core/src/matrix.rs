//! Small dense matrices over exact rings.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};

use crate::expr::{Expr, RatExpr};
use crate::scalar::{Rational, Scalar};

/// Minimal commutative-ring interface used by [`Matrix`].
pub trait Ring: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
}

macro_rules! impl_ring {
    ($t:ty, $zero:expr, $one:expr, $isz:expr) => {
        impl Ring for $t {
            fn zero_like(&self) -> Self {
                $zero
            }
            fn one_like(&self) -> Self {
                $one
            }
            fn is_zero_elem(&self) -> bool {
                $isz(self)
            }
            fn add_ref(&self, o: &Self) -> Self {
                self + o
            }
            fn sub_ref(&self, o: &Self) -> Self {
                self - o
            }
            fn mul_ref(&self, o: &Self) -> Self {
                self * o
            }
            fn neg_ref(&self) -> Self {
                -self
            }
        }
    };
}

impl_ring!(Expr, Expr::zero(), Expr::one(), |e: &Expr| e.is_zero());
impl_ring!(RatExpr, RatExpr::zero(), RatExpr::one(), |e: &RatExpr| e.is_zero());
impl_ring!(Scalar, Scalar::zero(), Scalar::one(), |e: &Scalar| e.is_zero());
impl_ring!(Rational, Rational::zero(), Rational::one(), |e: &Rational| e.is_zero());

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, v: T) -> Self {
        Matrix { rows, cols, data: vec![v; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_cols(cols: &[Vec<T>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        Matrix::from_fn(r, c, |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<U: Clone, E>(&self, f: impl FnMut(&T) -> Result<U, E>) -> Result<Matrix<U>, E> {
        Ok(Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect::<Result<_, E>>()? })
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }
}

impl<T: Ring> Matrix<T> {
    pub fn identity_like(n: usize, proto: &T) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { proto.one_like() } else { proto.zero_like() })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero_elem())
    }

    pub fn mul(&self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let zero = self.data.first().or(o.data.first()).map(|x| x.zero_like());
        Matrix::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = zero.clone().unwrap();
            for k in 0..self.cols {
                let a = &self[(i, k)];
                let b = &o[(k, j)];
                if !a.is_zero_elem() && !b.is_zero_elem() {
                    acc = acc.add_ref(&a.mul_ref(b));
                }
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| {
                let mut acc = v[0].zero_like();
                for (k, vk) in v.iter().enumerate() {
                    let a = &self[(i, k)];
                    if !a.is_zero_elem() && !vk.is_zero_elem() {
                        acc = acc.add_ref(&a.mul_ref(vk));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Matrix<T>) -> Matrix<T> {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].add_ref(&o[(i, j)]))
    }

    pub fn sub(&self, o: &Matrix<T>) -> Matrix<T> {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].sub_ref(&o[(i, j)]))
    }

    pub fn scale(&self, s: &T) -> Matrix<T> {
        self.map(|x| x.mul_ref(s))
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> Matrix<T> {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in (0..self.rows).filter(|&i| i != skip_r) {
            for j in (0..self.cols).filter(|&j| j != skip_c) {
                data.push(self[(i, j)].clone());
            }
        }
        Matrix { rows: self.rows - 1, cols: self.cols - 1, data }
    }

    /// Determinant by cofactor expansion (division-free, so valid over any
    /// commutative ring); intended for the small sizes used here.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        if n == 0 {
            panic!("det of empty matrix needs a ring prototype");
        }
        if n == 1 {
            return self.data[0].clone();
        }
        if n == 2 {
            return self[(0, 0)].mul_ref(&self[(1, 1)]).sub_ref(&self[(0, 1)].mul_ref(&self[(1, 0)]));
        }
        // expand along the sparsest row
        let row = (0..n)
            .max_by_key(|&i| (0..n).filter(|&j| self[(i, j)].is_zero_elem()).count())
            .unwrap();
        let mut acc = self.data[0].zero_like();
        for j in 0..n {
            let a = &self[(row, j)];
            if a.is_zero_elem() {
                continue;
            }
            let term = a.mul_ref(&self.minor(row, j).det());
            acc = if (row + j) % 2 == 0 { acc.add_ref(&term) } else { acc.sub_ref(&term) };
        }
        acc
    }

    /// Classical adjoint: `adj(A) * A = det(A) * I`.
    pub fn adjugate(&self) -> Matrix<T> {
        let n = self.rows;
        assert_eq!(n, self.cols);
        if n == 1 {
            return Matrix::identity_like(1, &self.data[0]);
        }
        Matrix::from_fn(n, n, |i, j| {
            let c = self.minor(j, i).det();
            if (i + j) % 2 == 0 {
                c
            } else {
                c.neg_ref()
            }
        })
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
