//! Closed-form `exp(-x_k M)` for the matrix shapes that arise from adjoint
//! representations of low-dimensional algebras.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::expr::{Affine, Expr, Frequency};
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};

fn factorial(k: u32) -> Rational {
    (1..=k as i64).fold(Rational::one(), |acc, i| acc * Rational::from_integer(BigInt::from(i)))
}

/// `(-x_v)^k / k!` as an expression.
fn neg_x_pow(v: usize, k: u32) -> Expr {
    let s = if k.is_multiple_of(2) { Rational::one() } else { -Rational::one() };
    Expr::coord(v).pow(k).scale(&Scalar::real(s / factorial(k)))
}

fn scalar_matrix(m: &Matrix<Scalar>) -> Matrix<Expr> {
    m.map(|s| Expr::scalar(s.clone()))
}

/// Powers `M^k` until one vanishes; `None` if `M^n != 0`.
fn nilpotent_powers(m: &Matrix<Expr>) -> Option<Vec<Matrix<Expr>>> {
    let n = m.rows();
    let mut pows = vec![Matrix::identity_like(n, &Expr::zero())];
    let mut p = m.clone();
    for _ in 0..n {
        if p.is_zero() {
            return Some(pows);
        }
        pows.push(p.clone());
        p = p.mul(m);
    }
    p.is_zero().then_some(pows)
}

fn series_from_powers(pows: &[Matrix<Expr>], var: usize) -> Matrix<Expr> {
    let mut acc = pows[0].clone();
    for (k, p) in pows.iter().enumerate().skip(1) {
        acc = acc.add(&p.scale(&neg_x_pow(var, k as u32)));
    }
    acc
}

/// Order in which the nonzero off-diagonal pattern becomes upper triangular.
fn triangular_order(m: &Matrix<Expr>) -> Option<Vec<usize>> {
    let n = m.rows();
    let mut indeg = vec![0usize; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && !m[(i, j)].is_zero() {
                indeg[j] += 1;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut done = vec![false; n];
    while order.len() < n {
        let next = (0..n).find(|&i| !done[i] && indeg[i] == 0)?;
        done[next] = true;
        order.push(next);
        for j in 0..n {
            if j != next && !m[(next, j)].is_zero() {
                indeg[j] -= 1;
            }
        }
    }
    Some(order)
}

fn try_triangular(m: &Matrix<Expr>, var: usize) -> Result<Option<Matrix<Expr>>> {
    let n = m.rows();
    if triangular_order(m).is_none() {
        return Ok(None);
    }
    let d = Matrix::from_fn(n, n, |i, j| if i == j { m[(i, i)].clone() } else { Expr::zero() });
    let nil = m.sub(&d);
    if d.mul(&nil) != nil.mul(&d) {
        return Ok(None);
    }
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        let exponent = -(&m[(i, i)] * &Expr::coord(var));
        match Frequency::from_exponent(&exponent) {
            Ok(f) => diag.push(Expr::exp(f)),
            Err(_) => return Ok(None),
        }
    }
    let pows = nilpotent_powers(&nil).ok_or_else(|| Error::Internal("strictly triangular part not nilpotent".into()))?;
    let en = series_from_powers(&pows, var);
    Ok(Some(Matrix::from_fn(n, n, |i, j| &diag[i] * &en[(i, j)])))
}

/// Characteristic polynomial coefficients `c_0..c_n` (monic) by
/// Faddeev-LeVerrier.
pub fn char_poly(a: &Matrix<Rational>) -> Vec<Rational> {
    let n = a.rows();
    let mut c = vec![Rational::zero(); n + 1];
    c[n] = Rational::one();
    let ident = Matrix::identity_like(n, &Rational::zero());
    let mut mk = Matrix::filled(n, n, Rational::zero());
    for k in 1..=n {
        mk = a.mul(&mk).add(&ident.scale(&c[n - k + 1]));
        let amk = a.mul(&mk);
        let tr: Rational = (0..n).map(|i| amk[(i, i)].clone()).sum();
        c[n - k] = -tr / Rational::from_integer(BigInt::from(k));
    }
    c
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

fn horner(c: &[Rational], x: &Rational) -> Rational {
    c.iter().rev().fold(Rational::zero(), |acc, ci| acc * x + ci)
}

/// Divide by `(λ - r)`; coefficients low to high.
fn deflate(c: &[Rational], r: &Rational) -> Vec<Rational> {
    let n = c.len() - 1;
    let mut q = vec![Rational::zero(); n];
    let mut carry = Rational::zero();
    for k in (0..n).rev() {
        carry = &c[k + 1] + &carry * r;
        q[k] = carry.clone();
    }
    q
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    let sn = n.sqrt();
    let sd = d.sqrt();
    (&sn * &sn == *n && &sd * &sd == *d).then(|| Rational::new(sn, sd))
}

/// All roots (with multiplicity) in the Gaussian rationals, or `None`.
pub fn split_roots(coeffs: &[Rational]) -> Option<Vec<Scalar>> {
    let mut c = coeffs.to_vec();
    let mut roots = Vec::new();
    loop {
        let deg = c.len() - 1;
        if deg == 0 {
            return Some(roots);
        }
        if c[0].is_zero() {
            roots.push(Scalar::zero());
            c.remove(0);
            continue;
        }
        if deg <= 2 {
            break;
        }
        let lcm = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = c.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let ps = divisors(&ints[0])?;
        let qs = divisors(&ints[deg])?;
        let mut found = None;
        'outer: for p in &ps {
            for q in &qs {
                for sign in [1, -1] {
                    let cand = Rational::new(p * sign, q.clone());
                    if horner(&c, &cand).is_zero() {
                        found = Some(cand);
                        break 'outer;
                    }
                }
            }
        }
        let r = found?;
        c = deflate(&c, &r);
        roots.push(Scalar::real(r));
    }
    match c.len() - 1 {
        1 => roots.push(Scalar::real(-&c[0] / &c[1])),
        2 => {
            let (a, b, cc) = (&c[2], &c[1], &c[0]);
            let disc = b * b - Rational::from_integer(4.into()) * a * cc;
            let two_a = a * Rational::from_integer(2.into());
            let s = rational_sqrt(&disc.abs())?;
            let base = -b / &two_a;
            let off = s / &two_a;
            if disc.is_negative() {
                roots.push(Scalar::new(base.clone(), off.clone()));
                roots.push(Scalar::new(base, -off));
            } else {
                roots.push(Scalar::real(&base + &off));
                roots.push(Scalar::real(base - off));
            }
        }
        _ => {}
    }
    Some(roots)
}

/// Exponential polynomial in one variable `t`: `Σ c t^p e^{μ t}`.
type ExpPoly = BTreeMap<(u32, Scalar), Scalar>;

fn ep_add(acc: &mut ExpPoly, p: u32, mu: Scalar, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let key = (p, mu);
    let v = acc.get(&key).map(|x| x + &c).unwrap_or(c);
    if v.is_zero() {
        acc.remove(&key);
    } else {
        acc.insert(key, v);
    }
}

/// `∫_0^t e^{λ(t-s)} r(s) ds`.
fn putzer_step(r: &ExpPoly, lambda: &Scalar) -> ExpPoly {
    let mut out = ExpPoly::new();
    for ((p, mu), c) in r {
        let p = *p;
        if mu == lambda {
            ep_add(&mut out, p + 1, mu.clone(), c * &Scalar::real(Rational::new(1.into(), (p + 1).into())));
            continue;
        }
        let nu = mu - lambda;
        let nu_inv = nu.inv().unwrap();
        let pf = factorial(p);
        for k in 0..=p {
            // (-1)^k p!/(p-k)! t^{p-k} / ν^{k+1}
            let sign = if k.is_multiple_of(2) { Rational::one() } else { -Rational::one() };
            let coef = Scalar::real(sign * &pf / factorial(p - k));
            ep_add(&mut out, p - k, mu.clone(), &(c * &coef) * &nu_inv.pow(k + 1));
        }
        let sign = if p % 2 == 0 { Rational::one() } else { -Rational::one() };
        let tail = Scalar::real(-(sign * &pf));
        ep_add(&mut out, 0, lambda.clone(), &(c * &tail) * &nu_inv.pow(p + 1));
    }
    out
}

fn ep_at_neg_x(r: &ExpPoly, var: usize) -> Expr {
    let mut e = Expr::zero();
    for ((p, mu), c) in r {
        let t_pow = neg_x_pow(var, *p).scale(&Scalar::real(factorial(*p)));
        let f = if mu.is_zero() {
            Frequency::default()
        } else {
            Frequency(BTreeMap::from([(var, Affine::constant(-mu))]))
        };
        e = &e + &(&t_pow * &Expr::exp(f)).scale(c);
    }
    e
}

fn try_parameter_free(m: &Matrix<Expr>, var: usize) -> Result<Option<Matrix<Expr>>> {
    let n = m.rows();
    let mut a = Matrix::filled(n, n, Rational::zero());
    for i in 0..n {
        for j in 0..n {
            match m[(i, j)].as_scalar() {
                Some(s) if s.is_real() => a[(i, j)] = s.re,
                _ => return Ok(None),
            }
        }
    }
    let Some(roots) = split_roots(&char_poly(&a)) else { return Ok(None) };
    let ms = a.map(|x| Scalar::real(x.clone()));
    let ident = Matrix::identity_like(n, &Scalar::zero());
    let mut r = ExpPoly::new();
    ep_add(&mut r, 0, roots[0].clone(), Scalar::one());
    let mut p = ident.clone();
    let mut acc = Matrix::filled(n, n, Expr::zero());
    for k in 0..n {
        if k > 0 {
            p = p.mul(&ms.sub(&ident.scale(&roots[k - 1])));
            r = putzer_step(&r, &roots[k]);
        }
        acc = acc.add(&scalar_matrix(&p).scale(&ep_at_neg_x(&r, var)));
    }
    Ok(Some(acc))
}

/// Exact `exp(-x_var * M)` for nilpotent, permutation-triangular with
/// commuting diagonal, or parameter-free split matrices.
pub fn matrix_exp_closed(m: &Matrix<Expr>, var: usize) -> Result<Matrix<Expr>> {
    if let Some(pows) = nilpotent_powers(m) {
        return Ok(series_from_powers(&pows, var));
    }
    if let Some(e) = try_triangular(m, var)? {
        return Ok(e);
    }
    if let Some(e) = try_parameter_free(m, var)? {
        return Ok(e);
    }
    Err(Error::ClosedFormUnavailable(format!("no closed form for exp(-x{} M) with M =\n{}", var + 1, m)))
}
