//! Truncated power series in the coordinates with parameter-polynomial
//! coefficients.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use super::{original_ad, prepare, provenance, to_original_basis, Backend, Realization, VectorField};
use crate::error::{Error, Result};
use crate::expr::{CoordMono, Expr, RatExpr};
use crate::liealg::{StructureConstants, SubalgebraFamily};
use crate::matrix::{Matrix, Ring};
use crate::scalar::{Rational, Scalar};

/// Polynomial in the coordinates truncated above total degree `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesExpr {
    order: u32,
    expr: Expr,
}

fn truncate(e: &Expr, order: u32) -> Expr {
    let mut out = Expr::zero();
    for (k, c) in e.terms() {
        if k.coord_degree() <= order {
            out.insert_add(k.clone(), c.clone());
        }
    }
    out
}

fn inv_factorial(k: u32) -> Scalar {
    let f = (1..=k as i64).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
    Scalar::real(Rational::new(BigInt::one(), f))
}

impl SeriesExpr {
    pub fn zero(order: u32) -> Self {
        SeriesExpr { order, expr: Expr::zero() }
    }

    pub fn one(order: u32) -> Self {
        SeriesExpr { order, expr: Expr::one() }
    }

    /// Taylor expansion; exponentials become truncated sums.
    pub fn from_expr(e: &Expr, order: u32) -> Self {
        let mut out = Expr::zero();
        for (k, c) in e.terms() {
            let mut plain = k.clone();
            plain.freq = Default::default();
            let mut t = Expr::term(plain, c.clone());
            for (&v, lam) in &k.freq.0 {
                let arg = &lam.to_expr() * &Expr::coord(v);
                let mut s = Expr::zero();
                let mut p = Expr::one();
                for j in 0..=order {
                    s = &s + &p.scale(&inv_factorial(j));
                    p = truncate(&(&p * &arg), order);
                }
                t = truncate(&(&t * &s), order);
            }
            out = &out + &t;
        }
        SeriesExpr { order, expr: truncate(&out, order) }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn as_expr(&self) -> &Expr {
        &self.expr
    }

    /// Coefficient of every coordinate monomial.
    pub fn coefficients(&self) -> BTreeMap<CoordMono, Expr> {
        let mut out: BTreeMap<CoordMono, Expr> = BTreeMap::new();
        for (k, c) in self.expr.terms() {
            let mut rest = k.clone();
            rest.coord.clear();
            let e = out.entry(k.coord.clone()).or_default();
            *e = &*e + &Expr::term(rest, c.clone());
        }
        out
    }

    pub fn constant_term(&self) -> Expr {
        self.coefficients().remove(&CoordMono::new()).unwrap_or_default()
    }

    /// Multiplicative inverse when the constant term is a nonzero scalar.
    pub fn inverse(&self) -> Option<SeriesExpr> {
        let c0 = self.constant_term().as_scalar()?.inv()?;
        let u = SeriesExpr { order: self.order, expr: self.expr.scale(&c0) };
        let d = u.sub_ref(&SeriesExpr::one(self.order)).neg_ref();
        let mut acc = SeriesExpr::one(self.order);
        let mut p = SeriesExpr::one(self.order);
        for _ in 0..self.order {
            p = p.mul_ref(&d);
            acc = acc.add_ref(&p);
        }
        Some(SeriesExpr { order: self.order, expr: acc.expr.scale(&c0) })
    }
}

impl Ring for SeriesExpr {
    fn zero_like(&self) -> Self {
        SeriesExpr::zero(self.order)
    }
    fn one_like(&self) -> Self {
        SeriesExpr::one(self.order)
    }
    fn is_zero_elem(&self) -> bool {
        self.expr.is_zero()
    }
    fn add_ref(&self, o: &Self) -> Self {
        SeriesExpr { order: self.order, expr: &self.expr + &o.expr }
    }
    fn sub_ref(&self, o: &Self) -> Self {
        SeriesExpr { order: self.order, expr: &self.expr - &o.expr }
    }
    fn mul_ref(&self, o: &Self) -> Self {
        SeriesExpr { order: self.order, expr: truncate(&(&self.expr * &o.expr), self.order) }
    }
    fn neg_ref(&self) -> Self {
        SeriesExpr { order: self.order, expr: -&self.expr }
    }
}

/// `q` expanded to `order` equals the polynomial `s` through that order.
pub fn series_agrees(q: &RatExpr, s: &Expr, order: u32) -> bool {
    let num = SeriesExpr::from_expr(q.num(), order);
    let den = SeriesExpr::from_expr(q.den(), order);
    let s = SeriesExpr { order, expr: truncate(s, order) };
    match den.inverse() {
        Some(inv) => num.mul_ref(&inv) == s,
        None => num == s.mul_ref(&den),
    }
}

fn series_exp(a: &Matrix<Expr>, var: usize, order: u32) -> Matrix<SeriesExpr> {
    let n = a.rows();
    let step = a.map(|e| SeriesExpr { order, expr: truncate(&-(e * &Expr::coord(var)), order) });
    let mut acc = Matrix::identity_like(n, &SeriesExpr::zero(order));
    let mut p = acc.clone();
    for k in 1..=order {
        p = p.mul(&step);
        acc = acc.add(&p.map(|x| SeriesExpr { order, expr: x.expr.scale(&inv_factorial(k)) }));
    }
    acc
}

/// Same pipeline as the closed form with every exponential and the inverse
/// of Ω replaced by truncated series. The homomorphism property is verified
/// through degree `order - 1`.
pub fn realize_series(c: &StructureConstants, fam: &SubalgebraFamily, order: u32) -> Result<Realization> {
    if order < 2 {
        return Err(Error::InvalidArgument("series order must be at least 2".into()));
    }
    let (fam, ab) = prepare(c, fam)?;
    let n = c.dim();
    let m = n - fam.dim();
    let t_inv = ab.t_inv.try_map(|q| {
        q.as_expr().cloned().ok_or_else(|| {
            Error::InvalidArgument(format!("{}: series backend needs a polynomial inverse basis change", fam.name))
        })
    })?;
    let lift = |mm: &Matrix<Expr>| mm.map(|e| SeriesExpr { order, expr: e.clone() });
    let t_s = lift(&ab.t);
    let t_inv_s = lift(&t_inv);
    let ident = Matrix::identity_like(n, &SeriesExpr::zero(order));
    let mut prod = ident.clone();
    let mut omega = ident.clone();
    for j in 1..n {
        let f = t_inv_s.mul(&series_exp(&original_ad(c, &ab.t, j - 1)?, j - 1, order)).mul(&t_s);
        prod = prod.mul(&f);
        for i in 0..n {
            omega[(i, j)] = prod[(i, j)].clone();
        }
    }
    // Ω = I + (terms of positive degree), so the Neumann series terminates.
    let d = omega.sub(&ident);
    let neg_d = d.map(|x| x.neg_ref());
    let mut inv = ident.clone();
    let mut p = ident;
    for _ in 0..order {
        p = p.mul(&neg_d);
        inv = inv.add(&p);
    }
    let mut adapted = vec![vec![RatExpr::zero(); m]; n];
    for i in 0..m {
        for (j, f) in adapted.iter_mut().enumerate() {
            let e = &inv[(i, j)].expr;
            if e.terms().any(|(k, _)| k.coord.keys().any(|&v| v >= m)) {
                return Err(Error::Internal(format!("Ω^-1 entry ({}, {}) depends on trailing variables", i + 1, j + 1)));
            }
            f[i] = RatExpr::from_expr(e.clone());
        }
    }
    let t_inv_r = t_inv.map(|e| RatExpr::from_expr(e.clone()));
    let fields: Vec<VectorField> = to_original_basis(&t_inv_r, &adapted, m)
        .into_iter()
        .map(|f| {
            VectorField::new(
                f.components.iter().map(|q| RatExpr::from_expr(truncate(q.num(), order))).collect(),
            )
        })
        .collect();
    let r = Realization { algebra: c.clone(), m, fields, provenance: provenance(&fam), backend: Backend::Series(order) };
    r.certify()?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, parse_rat_expr};

    #[test]
    fn exp_expansion() {
        let s = SeriesExpr::from_expr(&parse_expr("-exp(x2)").unwrap(), 2);
        assert_eq!(s.as_expr(), &parse_expr("-1 - x2 - 1/2*x2^2").unwrap());
    }

    #[test]
    fn agreement_through_division() {
        let q = parse_rat_expr("x1/(1 + x1)").unwrap();
        assert!(series_agrees(&q, &parse_expr("x1 - x1^2 + x1^3").unwrap(), 3));
        assert!(!series_agrees(&q, &parse_expr("x1 - x1^2").unwrap(), 3));
    }
}
