//! Certification of realizations: brackets, homomorphism residuals, ranks,
//! kernel and faithfulness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::expr::{Bindings, Expr, RatExpr, Style, Symbol, TermKey};
use crate::liealg::{combinations, rat_expr};
use crate::linalg;
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};
use crate::transitive::{Backend, Realization, VectorField};

/// `[X, Y]^j = Σ_i (X^i ∂_i Y^j - Y^i ∂_i X^j)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    let m = x.components.len();
    if m != y.components.len() {
        return Err(Error::Environment(format!("fields on {} and {} variables", m, y.components.len())));
    }
    let mut out = vec![RatExpr::zero(); m];
    for (j, o) in out.iter_mut().enumerate() {
        for i in 0..m {
            if !x.components[i].is_zero() {
                let d = y.components[j].derive(i)?;
                if !d.is_zero() {
                    *o = &*o + &(&x.components[i] * &d);
                }
            }
            if !y.components[i].is_zero() {
                let d = x.components[j].derive(i)?;
                if !d.is_zero() {
                    *o = &*o - &(&y.components[i] * &d);
                }
            }
        }
    }
    Ok(VectorField::new(out))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BracketResidual {
    pub i: usize,
    pub j: usize,
    pub residual: VectorField,
}

impl fmt::Display for BracketResidual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "residual (e{}, e{}): {}", self.i + 1, self.j + 1, self.residual.render(Style::Plain))
    }
}

fn truncate_below(q: &RatExpr, order: u32) -> RatExpr {
    let mut e = Expr::zero();
    for (k, c) in q.num().terms() {
        if k.coord_degree() < order {
            e.insert_add(k.clone(), c.clone());
        }
    }
    RatExpr::from_expr(e)
}

/// All residuals `[R(e_i), R(e_j)] - Σ_k C_ij^k R(e_k)` that do not vanish.
/// Series realizations of order `N` are compared through degree `N - 1`.
pub fn check_homomorphism(r: &Realization) -> Result<Vec<BracketResidual>> {
    let c = &r.algebra;
    let n = c.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let br = lie_bracket(&r.fields[i], &r.fields[j])?;
            let mut res = br.components;
            for (k, f) in r.fields.iter().enumerate() {
                let ck = c.get(i, j, k);
                if ck.is_zero() {
                    continue;
                }
                let s = Scalar::real(ck.clone());
                for (a, b) in res.iter_mut().zip(&f.components) {
                    *a = &*a - &b.scale(&s);
                }
            }
            if let Backend::Series(order) = r.backend {
                res = res.iter().map(|q| truncate_below(q, order)).collect();
            }
            if res.iter().any(|q| !q.is_zero()) {
                out.push(BracketResidual { i, j, residual: VectorField::new(res) });
            }
        }
    }
    Ok(out)
}

fn component_rows(r: &Realization) -> Vec<Vec<RatExpr>> {
    r.fields.iter().map(|f| f.components.clone()).collect()
}

/// Rank of `ξ(0)` with opaque atoms at their normal-form value `0`,
/// generic in the remaining parameters.
pub fn rank_at_origin(r: &Realization) -> Result<usize> {
    let coords: Vec<usize> = (0..r.m).collect();
    let rows = r
        .fields
        .iter()
        .map(|f| f.components.iter().map(|q| q.drop_opaque()?.at_zero(&coords)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(linalg::generic_rank(&rows))
}

pub fn generic_rank(r: &Realization) -> usize {
    linalg::generic_rank(&component_rows(r))
}

pub fn is_regular_at_origin(r: &Realization) -> Result<bool> {
    Ok(rank_at_origin(r)? == generic_rank(r))
}

pub fn is_transitive(r: &Realization) -> Result<bool> {
    Ok(rank_at_origin(r)? == r.m)
}

/// Per column, numerators over a common denominator.
fn cleared_columns(r: &Realization) -> Vec<Vec<Expr>> {
    (0..r.m)
        .map(|j| {
            let col: Vec<RatExpr> = r.fields.iter().map(|f| f.components[j].clone()).collect();
            linalg::clear_denominators(&col)
        })
        .collect()
}

/// `{ v ∈ Q^n : Σ_i v_i R(e_i) ≡ 0 }` as an RREF basis.
pub fn kernel(r: &Realization) -> Vec<Vec<Rational>> {
    let n = r.fields.len();
    let mut eqs: Vec<Vec<Rational>> = Vec::new();
    for col in cleared_columns(r) {
        let keys: BTreeSet<&TermKey> = col.iter().flat_map(|e| e.terms().map(|(k, _)| k)).collect();
        for key in keys {
            let coeffs: Vec<Scalar> = col
                .iter()
                .map(|e| e.terms().find(|(k, _)| *k == key).map(|(_, c)| c.clone()).unwrap_or_else(Scalar::zero))
                .collect();
            eqs.push(coeffs.iter().map(|c| c.re.clone()).collect());
            eqs.push(coeffs.iter().map(|c| c.im.clone()).collect());
        }
    }
    linalg::span_basis(&linalg::kernel(&eqs, n))
}

pub fn is_faithful(r: &Realization) -> bool {
    kernel(r).is_empty()
}

/// Where in parameter space the realization is faithful.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FaithfulCondition {
    Always,
    Never,
    /// Faithful exactly when every listed parameter is nonzero.
    IfNonzero(Vec<String>),
    /// Faithful for generic parameters; the exceptional set is not a
    /// union of coordinate hyperplanes.
    Generic,
}

impl fmt::Display for FaithfulCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaithfulCondition::Always => write!(f, "Yes."),
            FaithfulCondition::Never => write!(f, "No."),
            FaithfulCondition::IfNonzero(ps) => {
                let parts: Vec<String> = ps.iter().map(|p| format!("{} != 0", p)).collect();
                write!(f, "If {}.", parts.join(" and "))
            }
            FaithfulCondition::Generic => write!(f, "Generically."),
        }
    }
}

fn split_key(k: &TermKey) -> (TermKey, TermKey) {
    let mut rest = k.clone();
    rest.param.clear();
    let p = TermKey { param: k.param.clone(), ..Default::default() };
    (rest, p)
}

/// Exact faithfulness locus: the realization fails to be faithful at a
/// parameter point iff every maximal minor of the coefficient system
/// vanishes there.
pub fn faithful_condition(r: &Realization) -> Result<FaithfulCondition> {
    let n = r.fields.len();
    if !is_faithful(r) {
        return Ok(FaithfulCondition::Never);
    }
    if n == 0 {
        return Ok(FaithfulCondition::Always);
    }
    let mut rows: Vec<Vec<Expr>> = Vec::new();
    for col in cleared_columns(r) {
        let mut table: BTreeMap<TermKey, Vec<Expr>> = BTreeMap::new();
        for (i, e) in col.iter().enumerate() {
            for (k, c) in e.terms() {
                let (rest, p) = split_key(k);
                let row = table.entry(rest).or_insert_with(|| vec![Expr::zero(); n]);
                row[i] = &row[i] + &Expr::term(p, c.clone());
            }
        }
        for row in table.into_values() {
            let re: Vec<Expr> = row.iter().map(|e| (e + &e.conj()).scale(&Scalar::real(Rational::new(1.into(), 2.into())))).collect();
            let im: Vec<Expr> = row.iter().map(|e| (e - &e.conj()).scale(&Scalar::new(Rational::zero(), Rational::new((-1).into(), 2.into())))).collect();
            for v in [re, im] {
                if v.iter().any(|x| !x.is_zero()) {
                    rows.push(v);
                }
            }
        }
    }
    let mut minors = Vec::new();
    for s in combinations(rows.len(), n) {
        let d = Matrix::from_fn(n, n, |i, j| rows[s[i]][j].clone()).det();
        if d.is_zero() {
            continue;
        }
        if d.as_scalar().is_some() {
            return Ok(FaithfulCondition::Always);
        }
        minors.push(d);
    }
    let mut monomials: Vec<&Expr> = minors.iter().filter(|d| d.len() == 1).collect();
    monomials.sort_by_key(|d| d.leading().unwrap().0.param.values().sum::<u32>());
    for mono in monomials {
        let params: Vec<String> = mono.leading().unwrap().0.param.keys().cloned().collect();
        let all_vanish = params.iter().all(|p| {
            let b: Bindings = BTreeMap::from([(Symbol::Param(p.clone()), Expr::zero())]);
            minors.iter().all(|d| d.substitute(&b).map(|x| x.is_zero()).unwrap_or(false))
        });
        if all_vanish {
            return Ok(FaithfulCondition::IfNonzero(params));
        }
    }
    Ok(FaithfulCondition::Generic)
}

/// Kernel at a numeric parameter point, for cross-checks against ideals.
pub fn kernel_at(r: &Realization, values: &BTreeMap<String, Rational>) -> Result<Vec<Vec<Rational>>> {
    let b: Bindings = values.iter().map(|(k, v)| (Symbol::Param(k.clone()), rat_expr(v))).collect();
    Ok(kernel(&r.substitute(&b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_rat_expr;

    fn vf(cs: &[&str]) -> VectorField {
        VectorField::new(cs.iter().map(|s| parse_rat_expr(s).unwrap()).collect())
    }

    #[test]
    fn brackets() {
        assert_eq!(lie_bracket(&vf(&["1"]), &vf(&["x1"])).unwrap(), vf(&["1"]));
        assert_eq!(lie_bracket(&vf(&["1", "0"]), &vf(&["0", "1"])).unwrap(), vf(&["0", "0"]));
        let b = lie_bracket(&vf(&["0", "1"]), &vf(&["-c*exp(x2)", "0"])).unwrap();
        assert_eq!(b, vf(&["-c*exp(x2)", "0"]));
    }
}
