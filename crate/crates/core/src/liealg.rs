//! Structure constants, adjoint matrices, subalgebras, ideals and automorphisms.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr::{Bindings, Expr, RatExpr, Symbol};
use crate::linalg;
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};

/// `C[i][j][k]` is the coefficient of `e_k` in `[e_i, e_j]`.
#[derive(Clone, PartialEq, Debug)]
pub struct StructureConstants {
    pub name: String,
    pub basis_names: Vec<String>,
    c: Vec<Vec<Vec<Rational>>>,
}

/// Violations found by [`StructureConstants::validate`]; zero-based indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub antisymmetry: Vec<(usize, usize, usize)>,
    pub jacobi: Vec<(usize, usize, usize, usize)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.antisymmetry.is_empty() && self.jacobi.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return writeln!(f, "valid");
        }
        for (i, j, k) in &self.antisymmetry {
            writeln!(f, "antisymmetry violated: C[{}][{}][{}]", i + 1, j + 1, k + 1)?;
        }
        for (i, j, k, m) in &self.jacobi {
            writeln!(f, "jacobi violated: (e{}, e{}, e{}) component e{}", i + 1, j + 1, k + 1, m + 1)?;
        }
        Ok(())
    }
}

pub(crate) fn rat_expr(r: &Rational) -> Expr {
    Expr::scalar(Scalar::real(r.clone()))
}

impl StructureConstants {
    pub fn zero(name: impl Into<String>, n: usize) -> Self {
        StructureConstants {
            name: name.into(),
            basis_names: (1..=n).map(|i| format!("e{}", i)).collect(),
            c: vec![vec![vec![Rational::zero(); n]; n]; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[i][j][k]
    }

    /// Raw write of one entry; no mirror entry is touched.
    pub fn set_raw(&mut self, i: usize, j: usize, k: usize, v: Rational) {
        self.c[i][j][k] = v;
    }

    /// Set `[e_i, e_j] = Σ coeff e_k` together with the antisymmetric mirror.
    pub fn set_bracket(&mut self, i: usize, j: usize, terms: &[(usize, Rational)]) {
        let n = self.dim();
        for k in 0..n {
            self.c[i][j][k] = Rational::zero();
            self.c[j][i][k] = Rational::zero();
        }
        for (k, v) in terms {
            self.c[i][j][*k] = &self.c[i][j][*k] + v;
            self.c[j][i][*k] = -self.c[i][j][*k].clone();
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().flatten().flatten().all(|x| x.is_zero())
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let mut rep = ValidationReport::default();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.c[i][j][k] != -self.c[j][i][k].clone() {
                        rep.antisymmetry.push((i, j, k));
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        let mut s = Rational::zero();
                        for l in 0..n {
                            s += &self.c[i][j][l] * &self.c[l][k][m];
                            s += &self.c[j][k][l] * &self.c[l][i][m];
                            s += &self.c[k][i][l] * &self.c[l][j][m];
                        }
                        if !s.is_zero() {
                            rep.jacobi.push((i, j, k, m));
                        }
                    }
                }
            }
        }
        rep
    }

    /// Matrix of `ad_{e_i}`: column `j` holds the coordinates of `[e_i, e_j]`.
    pub fn adjoint(&self, i: usize) -> Result<Matrix<Rational>> {
        let n = self.dim();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i + 1, dim: n });
        }
        Ok(Matrix::from_fn(n, n, |k, j| self.c[i][j][k].clone()))
    }

    pub fn bracket(&self, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
        let n = self.dim();
        let mut out = vec![Rational::zero(); n];
        for i in (0..n).filter(|&i| !u[i].is_zero()) {
            for j in (0..n).filter(|&j| !v[j].is_zero()) {
                let uv = &u[i] * &v[j];
                for (o, c) in out.iter_mut().zip(&self.c[i][j]) {
                    if !c.is_zero() {
                        *o += &uv * c;
                    }
                }
            }
        }
        out
    }

    pub fn bracket_expr(&self, u: &[Expr], v: &[Expr]) -> Vec<Expr> {
        let n = self.dim();
        let mut out = vec![Expr::zero(); n];
        for i in (0..n).filter(|&i| !u[i].is_zero()) {
            for j in (0..n).filter(|&j| !v[j].is_zero()) {
                let uv = &u[i] * &v[j];
                for (o, c) in out.iter_mut().zip(&self.c[i][j]) {
                    if !c.is_zero() {
                        *o = &*o + &(&uv * &rat_expr(c));
                    }
                }
            }
        }
        out
    }

    fn unit(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::one();
        v
    }

    /// Whether the span of `h` is an ideal of the algebra.
    pub fn is_ideal(&self, h: &[Vec<Rational>]) -> bool {
        let r = linalg::rank(h);
        (0..self.dim()).all(|i| {
            h.iter().all(|v| {
                let mut ext = h.to_vec();
                ext.push(self.bracket(v, &self.unit(i)));
                linalg::rank(&ext) == r
            })
        })
    }

    /// Largest ideal of the algebra contained in the subspace spanned by `h`,
    /// as an RREF basis.
    pub fn largest_contained_ideal(&self, h: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
        let n = self.dim();
        let mut cur = linalg::span_basis(h);
        for _ in 0..=n {
            if cur.is_empty() {
                return cur;
            }
            // annihilator of the current subspace
            let ann = linalg::kernel(&cur, n);
            let mut constraints: Vec<Vec<Rational>> = Vec::new();
            for i in 0..n {
                let ei = self.unit(i);
                let images: Vec<Vec<Rational>> = cur.iter().map(|v| self.bracket(v, &ei)).collect();
                for w in &ann {
                    constraints.push(
                        images.iter().map(|img| img.iter().zip(w).map(|(a, b)| a * b).sum()).collect(),
                    );
                }
            }
            let ys = linalg::kernel(&constraints, cur.len());
            if ys.len() == cur.len() {
                return cur;
            }
            let next: Vec<Vec<Rational>> = ys
                .iter()
                .map(|y| {
                    (0..n)
                        .map(|k| y.iter().zip(&cur).map(|(c, v)| c * &v[k]).sum())
                        .collect()
                })
                .collect();
            cur = linalg::span_basis(&next);
        }
        cur
    }
}

impl fmt::Display for StructureConstants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        for i in 0..n {
            for j in i + 1..n {
                let terms: Vec<String> = (0..n)
                    .filter(|&k| !self.c[i][j][k].is_zero())
                    .map(|k| format!("{}*{}", self.c[i][j][k], self.basis_names[k]))
                    .collect();
                if !terms.is_empty() {
                    writeln!(f, "[{}, {}] = {}", self.basis_names[i], self.basis_names[j], terms.join(" + "))?;
                }
            }
        }
        Ok(())
    }
}

/// A vector whose coordinates are polynomials in the parameters.
pub type ParamVector = Vec<Expr>;

/// Bracket coefficients `[b_p, b_q] = Σ_k w_k b_k` for every pair `p < q`.
pub type ClosureWitness = BTreeMap<(usize, usize), Vec<RatExpr>>;

/// A parameter-dependent subspace in one affine chart.
#[derive(Clone, Debug, PartialEq)]
pub struct SubalgebraFamily {
    pub name: String,
    pub params: Vec<String>,
    pub basis: Vec<ParamVector>,
    pub witness: Option<ClosureWitness>,
}

impl SubalgebraFamily {
    pub fn new(name: impl Into<String>, params: Vec<String>, basis: Vec<ParamVector>) -> Self {
        SubalgebraFamily { name: name.into(), params, basis, witness: None }
    }

    pub fn from_rational(name: impl Into<String>, basis: &[Vec<Rational>]) -> Self {
        SubalgebraFamily::new(name, vec![], basis.iter().map(|v| v.iter().map(rat_expr).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn rat_rows(&self) -> Vec<Vec<RatExpr>> {
        self.basis.iter().map(|v| v.iter().map(|e| RatExpr::from_expr(e.clone())).collect()).collect()
    }

    pub fn substitute(&self, b: &Bindings) -> Result<SubalgebraFamily> {
        let basis = self
            .basis
            .iter()
            .map(|v| v.iter().map(|e| e.substitute(b)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let params = self
            .params
            .iter()
            .filter(|p| !b.contains_key(&Symbol::Param((*p).clone())))
            .cloned()
            .collect();
        Ok(SubalgebraFamily { name: self.name.clone(), params, basis, witness: None })
    }

    /// Basis vectors at a numeric parameter point.
    pub fn instantiate(&self, values: &BTreeMap<String, Rational>) -> Result<Vec<Vec<Rational>>> {
        let b: Bindings = values.iter().map(|(k, v)| (Symbol::Param(k.clone()), rat_expr(v))).collect();
        self.basis
            .iter()
            .map(|v| {
                v.iter()
                    .map(|e| {
                        let s = e.substitute(&b)?.as_scalar().filter(|s| s.is_real()).ok_or_else(|| {
                            Error::InvalidArgument(format!("entry {} is not fixed by the parameter values", e))
                        })?;
                        Ok(s.re)
                    })
                    .collect()
            })
            .collect()
    }

    /// Rational basis if no parameters occur.
    pub fn as_rational(&self) -> Option<Vec<Vec<Rational>>> {
        self.instantiate(&BTreeMap::new()).ok()
    }
}

fn check_param_poly(f: &SubalgebraFamily) -> Result<()> {
    for v in &f.basis {
        for e in v {
            if !e.is_param_poly() {
                return Err(Error::InvalidArgument(format!(
                    "subalgebra {}: entry {} is not a polynomial in the parameters",
                    f.name, e
                )));
            }
        }
    }
    Ok(())
}

/// Row subset of size `d` whose minor has a nonzero constant determinant,
/// falling back to any generically nonzero minor.
fn pick_minor(rows: &[Vec<Expr>], d: usize) -> Option<(Vec<usize>, Expr)> {
    let n = rows.len();
    let mut fallback = None;
    for s in combinations(n, d) {
        let m = Matrix::from_fn(d, d, |i, j| rows[s[i]][j].clone());
        let det = m.det();
        if det.is_zero() {
            continue;
        }
        if det.as_scalar().is_some() {
            return Some((s, det));
        }
        if fallback.is_none() {
            fallback = Some((s, det));
        }
    }
    fallback
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Solve `B λ = w` for the family basis `B` (columns = basis vectors),
/// returning `None` if `w` is not in the span identically.
fn solve_in_span(cols: &[ParamVector], minor: &(Vec<usize>, Expr), w: &[Expr]) -> Option<Vec<RatExpr>> {
    let d = cols.len();
    let (rows, det) = minor;
    let bs = Matrix::from_fn(d, d, |i, j| cols[j][rows[i]].clone());
    let adj = bs.adjugate();
    let ws: Vec<Expr> = rows.iter().map(|&r| w[r].clone()).collect();
    let num = adj.mul_vec(&ws);
    let lambda: Vec<RatExpr> = num.into_iter().map(|e| RatExpr::new(e, det.clone()).unwrap()).collect();
    // check every row, not only the minor
    for (k, wk) in w.iter().enumerate() {
        let mut s = RatExpr::zero();
        for (j, l) in lambda.iter().enumerate() {
            s = &s + &l.mul_expr(&cols[j][k]);
        }
        if s != RatExpr::from_expr(wk.clone()) {
            return None;
        }
    }
    Some(lambda)
}

/// Check closure under the bracket identically in the parameters and
/// attach the witness.
pub fn is_subalgebra(c: &StructureConstants, fam: &SubalgebraFamily) -> Result<(bool, SubalgebraFamily)> {
    check_param_poly(fam)?;
    let n = c.dim();
    if fam.basis.iter().any(|v| v.len() != n) {
        return Err(Error::InvalidArgument(format!("subalgebra {}: vectors must have {} entries", fam.name, n)));
    }
    let d = fam.dim();
    let mut out = fam.clone();
    if d == 0 {
        out.witness = Some(ClosureWitness::new());
        return Ok((true, out));
    }
    if linalg::generic_rank(&fam.rat_rows()) < d {
        return Err(Error::DegenerateFamily(format!("subalgebra {}: basis is rank deficient", fam.name)));
    }
    let rows: Vec<Vec<Expr>> = (0..n).map(|i| fam.basis.iter().map(|v| v[i].clone()).collect()).collect();
    let minor = pick_minor(&rows, d).ok_or_else(|| Error::Internal("no nonzero minor".into()))?;
    let mut witness = ClosureWitness::new();
    for p in 0..d {
        for q in p + 1..d {
            let w = c.bracket_expr(&fam.basis[p], &fam.basis[q]);
            match solve_in_span(&fam.basis, &minor, &w) {
                Some(l) => {
                    witness.insert((p, q), l);
                }
                None => return Ok((false, out)),
            }
        }
    }
    out.witness = Some(witness);
    Ok((true, out))
}

/// Subspaces coincide identically in the parameters.
pub fn span_equal(v1: &[ParamVector], v2: &[ParamVector]) -> bool {
    let rows = |v: &[ParamVector]| -> Vec<Vec<RatExpr>> {
        v.iter().map(|x| x.iter().map(|e| RatExpr::from_expr(e.clone())).collect()).collect()
    };
    let r1 = linalg::generic_rank(&rows(v1));
    let r2 = linalg::generic_rank(&rows(v2));
    let mut both = rows(v1);
    both.extend(rows(v2));
    r1 == r2 && linalg::generic_rank(&both) == r1
}

/// Basis change `T` whose last columns span the subalgebra.
#[derive(Clone, Debug)]
pub struct AdaptedBasis {
    pub t: Matrix<Expr>,
    pub t_inv: Matrix<RatExpr>,
    pub det: Expr,
    /// Standard basis indices used for the first `m` columns.
    pub completion: Vec<usize>,
}

pub fn adapted_basis(c: &StructureConstants, fam: &SubalgebraFamily) -> Result<AdaptedBasis> {
    check_param_poly(fam)?;
    let n = c.dim();
    let d = fam.dim();
    if d > n {
        return Err(Error::DegenerateFamily(format!("subalgebra {} has more than {} vectors", fam.name, n)));
    }
    let m = n - d;
    let build = |s: &[usize]| -> Matrix<Expr> {
        Matrix::from_fn(n, n, |i, j| {
            if j < m {
                if i == s[j] {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            } else {
                fam.basis[j - m][i].clone()
            }
        })
    };
    let mut fallback: Option<(Vec<usize>, Matrix<Expr>, Expr)> = None;
    let mut chosen = None;
    for s in combinations(n, m) {
        let t = build(&s);
        let det = t.det();
        if det.is_zero() {
            continue;
        }
        if det.as_scalar().is_some() {
            chosen = Some((s, t, det));
            break;
        }
        if fallback.is_none() {
            fallback = Some((s, t, det));
        }
    }
    let (completion, t, det) = chosen
        .or(fallback)
        .ok_or_else(|| Error::DegenerateFamily(format!("subalgebra {}: basis is rank deficient", fam.name)))?;
    let adj = t.adjugate();
    let t_inv = adj.try_map(|e| RatExpr::new(e.clone(), det.clone()))?;
    Ok(AdaptedBasis { t, t_inv, det, completion })
}

/// A bracket-preserving invertible rational matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct AutMatrix {
    m: Matrix<Rational>,
}

impl AutMatrix {
    pub fn new(c: &StructureConstants, m: Matrix<Rational>) -> Result<AutMatrix> {
        let n = c.dim();
        if m.rows() != n || m.cols() != n {
            return Err(Error::InvalidArgument(format!("automorphism must be {}x{}", n, n)));
        }
        if m.det().is_zero() {
            return Err(Error::NotAnAutomorphism("matrix is singular".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                let lhs = c.bracket(&m.col(i), &m.col(j));
                let rhs = m.mul_vec(&c.bracket(&c.unit(i), &c.unit(j)));
                if lhs != rhs {
                    return Err(Error::NotAnAutomorphism(format!(
                        "[a(e{}), a(e{})] != a([e{}, e{}])",
                        i + 1,
                        j + 1,
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(AutMatrix { m })
    }

    pub fn matrix(&self) -> &Matrix<Rational> {
        &self.m
    }

    pub fn inverse(&self) -> AutMatrix {
        let det = self.m.det();
        AutMatrix { m: self.m.adjugate().map(|x| x / &det) }
    }

    pub fn apply(&self, v: &[Expr]) -> Vec<Expr> {
        self.m.map(rat_expr).mul_vec(v)
    }
}

/// Image `α(h)` with closure re-verified.
pub fn apply_aut(c: &StructureConstants, a: &AutMatrix, fam: &SubalgebraFamily) -> Result<SubalgebraFamily> {
    let img = SubalgebraFamily::new(
        fam.name.clone(),
        fam.params.clone(),
        fam.basis.iter().map(|v| a.apply(v)).collect(),
    );
    let (ok, img) = is_subalgebra(c, &img)?;
    if !ok {
        return Err(Error::NotSubalgebra(format!("image of {} is not closed", fam.name)));
    }
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn g31() -> StructureConstants {
        let mut c = StructureConstants::zero("g3.1", 3);
        c.set_bracket(1, 2, &[(0, int(1))]);
        c
    }

    fn v(xs: &[&str]) -> ParamVector {
        xs.iter().map(|s| crate::expr::parse_expr(s).unwrap()).collect()
    }

    #[test]
    fn heisenberg_basics() {
        let c = g31();
        assert!(c.validate().is_valid());
        let ad2 = c.adjoint(1).unwrap();
        assert_eq!(ad2[(0, 2)], int(1));
        assert_eq!(ad2.entries().filter(|x| !x.is_zero()).count(), 1);
        assert!(c.adjoint(3).is_err());
    }

    #[test]
    fn subalgebra_checks() {
        let c = g31();
        let h = SubalgebraFamily::new("h2", vec!["a".into()], vec![v(&["-a", "1", "0"])]);
        assert!(is_subalgebra(&c, &h).unwrap().0);
        let h = SubalgebraFamily::new("bad", vec![], vec![v(&["0", "1", "0"]), v(&["0", "0", "1"])]);
        assert!(!is_subalgebra(&c, &h).unwrap().0);
        let h = SubalgebraFamily::new("deg", vec![], vec![v(&["0", "1", "0"]), v(&["0", "2", "0"])]);
        assert!(matches!(is_subalgebra(&c, &h), Err(Error::DegenerateFamily(_))));
    }

    #[test]
    fn adapted_basis_completion() {
        let c = g31();
        let h = SubalgebraFamily::new("h2", vec!["a".into()], vec![v(&["-a", "1", "0"])]);
        let ab = adapted_basis(&c, &h).unwrap();
        assert_eq!(ab.completion, vec![0, 2]);
        assert!(ab.det.as_scalar().is_some_and(|s| !s.is_zero()));
        let h0 = SubalgebraFamily::new("0", vec![], vec![]);
        let ab = adapted_basis(&c, &h0).unwrap();
        assert_eq!(ab.t, Matrix::identity_like(3, &Expr::zero()));
    }

    #[test]
    fn span_equality() {
        assert!(span_equal(&[v(&["1", "0"])], &[v(&["2", "0"])]));
        assert!(!span_equal(&[v(&["-a", "1"])], &[v(&["0", "1"])]));
    }
}
