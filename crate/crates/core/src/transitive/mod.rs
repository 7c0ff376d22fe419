//! Transitive realizations from subalgebras through the Ω matrix, with a
//! closed-form backend and a truncated power-series backend.

mod expm;
mod series;

pub use expm::{char_poly, matrix_exp_closed, split_roots};
pub use series::{realize_series, series_agrees, SeriesExpr};

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{render_field, Bindings, Expr, RatExpr, Style};
use crate::liealg::{adapted_basis, is_subalgebra, rat_expr, AdaptedBasis, StructureConstants, SubalgebraFamily};
use crate::matrix::Matrix;
use crate::verify;

/// `Σ_j components[j] ∂_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub components: Vec<RatExpr>,
}

impl VectorField {
    pub fn new(components: Vec<RatExpr>) -> Self {
        VectorField { components }
    }

    pub fn zero(m: usize) -> Self {
        VectorField { components: vec![RatExpr::zero(); m] }
    }

    pub fn m(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn render(&self, style: Style) -> String {
        render_field(&self.components, style)
    }

    pub fn substitute(&self, b: &Bindings) -> Result<VectorField> {
        Ok(VectorField { components: self.components.iter().map(|c| c.substitute(b)).collect::<Result<_>>()? })
    }

    /// Same components on more variables.
    pub fn extend_to(&self, m: usize) -> VectorField {
        let mut c = self.components.clone();
        c.resize(m, RatExpr::zero());
        VectorField { components: c }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Closed,
    Series(u32),
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Closed => write!(f, "closed"),
            Backend::Series(n) => write!(f, "series({})", n),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Provenance {
    pub subalgebra: String,
    pub params: Vec<String>,
    /// Row label such as `h3^{a+x4,1}`.
    pub label: String,
    pub assignment: Option<String>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub algebra: StructureConstants,
    pub m: usize,
    pub fields: Vec<VectorField>,
    pub provenance: Provenance,
    pub backend: Backend,
}

impl Realization {
    pub fn render_lines(&self, style: Style) -> Vec<String> {
        self.fields
            .iter()
            .enumerate()
            .map(|(i, f)| format!("{} -> {}", self.algebra.basis_names[i], f.render(style)))
            .collect()
    }

    /// The images of `e_1..e_n` separated by ` ; `.
    pub fn render_row(&self, style: Style) -> String {
        self.fields.iter().map(|f| f.render(style)).collect::<Vec<_>>().join(" ; ")
    }

    pub fn substitute(&self, b: &Bindings) -> Result<Realization> {
        let mut r = self.clone();
        r.fields = self.fields.iter().map(|f| f.substitute(b)).collect::<Result<_>>()?;
        r.provenance.params.retain(|p| !b.contains_key(&crate::expr::Symbol::Param(p.clone())));
        Ok(r)
    }

    pub fn is_real(&self) -> bool {
        self.fields.iter().all(|f| f.components.iter().all(|c| c.is_real()))
    }

    /// Fails with a verification error unless every residual vanishes and
    /// every component is real.
    pub fn certify(&self) -> Result<()> {
        let res = verify::check_homomorphism(self)?;
        if let Some(r) = res.first() {
            return Err(Error::Verification(format!("{}: {}", self.provenance.label, r)));
        }
        if !self.is_real() {
            return Err(Error::Verification(format!("{}: components are not real", self.provenance.label)));
        }
        Ok(())
    }
}

/// Ω together with the exponential factors it was built from.
#[derive(Clone, Debug)]
pub struct OmegaMatrix {
    pub omega: Matrix<RatExpr>,
    pub factors: Vec<Matrix<RatExpr>>,
}

fn lift(m: &Matrix<Expr>) -> Matrix<RatExpr> {
    m.map(|e| RatExpr::from_expr(e.clone()))
}

/// Column `j` of Ω is column `j` of `F_0 F_1 ... F_{j-1}`.
fn assemble_omega(factors: Vec<Matrix<RatExpr>>, n: usize) -> OmegaMatrix {
    let mut prod = Matrix::identity_like(n, &RatExpr::zero());
    let mut omega = prod.clone();
    for j in 1..n {
        prod = prod.mul(&factors[j - 1]);
        for i in 0..n {
            omega[(i, j)] = prod[(i, j)].clone();
        }
    }
    OmegaMatrix { omega, factors }
}

/// Ω from adjoint matrices already written in the adapted basis.
pub fn build_omega(ads: &[Matrix<Expr>]) -> Result<OmegaMatrix> {
    let n = ads.len();
    let factors = ads
        .iter()
        .take(n.saturating_sub(1))
        .enumerate()
        .map(|(k, a)| matrix_exp_closed(a, k).map(|e| lift(&e)))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_omega(factors, n))
}

/// `Σ_i T_ik ad_{e_i}`: the adjoint of the k-th adapted vector in the
/// original basis.
pub(crate) fn original_ad(c: &StructureConstants, t: &Matrix<Expr>, k: usize) -> Result<Matrix<Expr>> {
    let n = c.dim();
    let mut acc = Matrix::filled(n, n, Expr::zero());
    for i in 0..n {
        if t[(i, k)].is_zero() {
            continue;
        }
        acc = acc.add(&c.adjoint(i)?.map(rat_expr).scale(&t[(i, k)]));
    }
    Ok(acc)
}

/// Ω in the adapted basis; each factor is `T^{-1} exp(-x_k A_k) T` with
/// `A_k` the original-basis adjoint of the k-th adapted vector.
pub fn build_omega_adapted(c: &StructureConstants, ab: &AdaptedBasis) -> Result<OmegaMatrix> {
    let n = c.dim();
    let t = lift(&ab.t);
    let mut factors = Vec::new();
    for k in 0..n.saturating_sub(1) {
        let e = matrix_exp_closed(&original_ad(c, &ab.t, k)?, k)?;
        factors.push(ab.t_inv.mul(&lift(&e)).mul(&t));
    }
    Ok(assemble_omega(factors, n))
}

fn minor(m: &Matrix<RatExpr>, skip_r: usize, skip_c: usize) -> Matrix<RatExpr> {
    let n = m.rows();
    Matrix::from_fn(n - 1, n - 1, |i, j| {
        let ii = if i >= skip_r { i + 1 } else { i };
        let jj = if j >= skip_c { j + 1 } else { j };
        m[(ii, jj)].clone()
    })
}

/// First `m` rows of `Ω^{-1}` through the adjugate.
pub fn omega_inverse_rows(omega: &Matrix<RatExpr>, m: usize) -> Result<Matrix<RatExpr>> {
    let n = omega.rows();
    if n == 0 {
        return Ok(Matrix::filled(0, 0, RatExpr::zero()));
    }
    let det = omega.det();
    if det.is_zero() {
        return Err(Error::Internal("det Ω vanishes identically".into()));
    }
    let mut out = Matrix::filled(m, n, RatExpr::zero());
    for i in 0..m {
        for j in 0..n {
            let cof = if n == 1 { RatExpr::one() } else { minor(omega, j, i).det() };
            let cof = if (i + j) % 2 == 0 { cof } else { -cof };
            out[(i, j)] = cof.div(&det)?;
        }
    }
    Ok(out)
}

/// Map fields of the adapted basis back: `R(e_k) = Σ_j (T^{-1})_{jk} R(f_j)`.
pub(crate) fn to_original_basis(t_inv: &Matrix<RatExpr>, adapted: &[Vec<RatExpr>], m: usize) -> Vec<VectorField> {
    let n = adapted.len();
    (0..n)
        .map(|k| {
            let mut comps = vec![RatExpr::zero(); m];
            for (j, f) in adapted.iter().enumerate() {
                let w = &t_inv[(j, k)];
                if w.is_zero() {
                    continue;
                }
                for (a, b) in comps.iter_mut().zip(f) {
                    *a = &*a + &(w * b);
                }
            }
            VectorField::new(comps)
        })
        .collect()
}

/// Checked subalgebra and its adapted basis.
pub(crate) fn prepare(c: &StructureConstants, fam: &SubalgebraFamily) -> Result<(SubalgebraFamily, AdaptedBasis)> {
    let (ok, fam) = is_subalgebra(c, fam)?;
    if !ok {
        return Err(Error::NotSubalgebra(format!("{} is not closed under the bracket", fam.name)));
    }
    let ab = adapted_basis(c, &fam)?;
    Ok((fam, ab))
}

pub(crate) fn provenance(fam: &SubalgebraFamily) -> Provenance {
    Provenance {
        subalgebra: fam.name.clone(),
        params: fam.params.clone(),
        label: fam.name.clone(),
        assignment: None,
        notes: vec![],
    }
}

/// The transitive realization on `codim h` variables attached to the
/// subalgebra family, verified before it is returned.
pub fn realize_transitive(c: &StructureConstants, fam: &SubalgebraFamily) -> Result<Realization> {
    let (fam, ab) = prepare(c, fam)?;
    let n = c.dim();
    let m = n - fam.dim();
    let om = build_omega_adapted(c, &ab)?;
    let rows = omega_inverse_rows(&om.omega, m)?;
    let trailing: Vec<usize> = (m..n).collect();
    let mut adapted = vec![vec![RatExpr::zero(); m]; n];
    for i in 0..m {
        for (j, f) in adapted.iter_mut().enumerate() {
            let q = &rows[(i, j)];
            for &v in &trailing {
                if !q.independent_of(v)? {
                    return Err(Error::Internal(format!("Ω^-1 entry ({}, {}) depends on x{}", i + 1, j + 1, v + 1)));
                }
            }
            f[i] = q.at_zero(&trailing)?;
        }
    }
    let r = Realization {
        algebra: c.clone(),
        m,
        fields: to_original_basis(&ab.t_inv, &adapted, m),
        provenance: provenance(&fam),
        backend: Backend::Closed,
    };
    r.certify()?;
    Ok(r)
}
