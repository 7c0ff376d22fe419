//! Canonical exponential-polynomial expressions.
//!
//! An [`Expr`] is a finite sum of terms `c * x^α * a^β * exp(Σ λ_v x_v) * f(..)...`
//! where `c` is a Gaussian rational, `x` are coordinate variables, `a` are
//! parameter symbols, every frequency `λ_v` is affine in the parameters, and
//! `f(..)` are opaque function atoms. Terms live in a `BTreeMap` keyed by
//! everything except the coefficient, so like terms are always merged and
//! structural equality is mathematical equality.

pub(crate) mod parse;
mod rat;
mod render;

pub use parse::{parse_expr, parse_rat_expr};
pub use rat::RatExpr;
pub use render::{render_component, render_expr, render_field, render_rat, Style};

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type CoordMono = BTreeMap<usize, u32>;
pub type ParamMono = BTreeMap<String, u32>;

/// `constant + Σ coeff_k * a_k` over parameter symbols.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Affine {
    pub constant: Scalar,
    pub coeffs: BTreeMap<String, Scalar>,
}

impl Affine {
    pub fn zero() -> Self {
        Affine { constant: Scalar::zero(), coeffs: BTreeMap::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        Affine { constant: c, coeffs: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Affine) -> Affine {
        let mut out = self.clone();
        out.constant = &out.constant + &other.constant;
        for (p, c) in &other.coeffs {
            let v = out.coeffs.get(p).map(|x| x + c).unwrap_or_else(|| c.clone());
            if v.is_zero() {
                out.coeffs.remove(p);
            } else {
                out.coeffs.insert(p.clone(), v);
            }
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> Affine {
        if s.is_zero() {
            return Affine::zero();
        }
        Affine {
            constant: &self.constant * s,
            coeffs: self.coeffs.iter().map(|(p, c)| (p.clone(), c * s)).collect(),
        }
    }

    pub fn conj(&self) -> Affine {
        Affine {
            constant: self.constant.conj(),
            coeffs: self.coeffs.iter().map(|(p, c)| (p.clone(), c.conj())).collect(),
        }
    }

    /// Real and imaginary parts, each again an affine form.
    pub fn split_re_im(&self) -> (Affine, Affine) {
        let re = Affine {
            constant: Scalar::real(self.constant.re.clone()),
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, c)| !c.re.is_zero())
                .map(|(p, c)| (p.clone(), Scalar::real(c.re.clone())))
                .collect(),
        };
        let im = Affine {
            constant: Scalar::real(self.constant.im.clone()),
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, c)| !c.im.is_zero())
                .map(|(p, c)| (p.clone(), Scalar::real(c.im.clone())))
                .collect(),
        };
        (re, im)
    }

    pub fn to_expr(&self) -> Expr {
        let mut e = Expr::scalar(self.constant.clone());
        for (p, c) in &self.coeffs {
            e = &e + &Expr::param(p).scale(c);
        }
        e
    }
}

/// Exponent `Σ_v λ_v x_v`; zero forms are never stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Frequency(pub BTreeMap<usize, Affine>);

impl Frequency {
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &Frequency) -> Frequency {
        let mut out = self.0.clone();
        for (v, a) in &other.0 {
            let s = out.get(v).map(|x| x.add(a)).unwrap_or_else(|| a.clone());
            if s.is_zero() {
                out.remove(v);
            } else {
                out.insert(*v, s);
            }
        }
        Frequency(out)
    }

    pub fn neg(&self) -> Frequency {
        let m1 = Scalar::from_int(-1);
        Frequency(self.0.iter().map(|(v, a)| (*v, a.scale(&m1))).collect())
    }

    pub fn real_part(&self) -> Frequency {
        Frequency(
            self.0
                .iter()
                .map(|(v, a)| (*v, a.split_re_im().0))
                .filter(|(_, a)| !a.is_zero())
                .collect(),
        )
    }

    pub fn conj(&self) -> Frequency {
        Frequency(self.0.iter().map(|(v, a)| (*v, a.conj())).collect())
    }

    /// The exponent as a plain polynomial expression.
    pub fn exponent(&self) -> Expr {
        let mut e = Expr::zero();
        for (v, a) in &self.0 {
            e = &e + &(&a.to_expr() * &Expr::coord(*v));
        }
        e
    }

    /// Inverse of [`Frequency::exponent`]; fails unless every term is
    /// `(affine in params) * x_v`.
    pub fn from_exponent(e: &Expr) -> Result<Frequency> {
        let mut out = Frequency::default();
        for (k, c) in e.terms() {
            let ok_shape = k.freq.is_zero()
                && k.opaque.is_empty()
                && k.coord.len() == 1
                && k.coord.values().all(|&p| p == 1)
                && k.param.values().sum::<u32>() <= 1;
            if !ok_shape {
                return Err(Error::UnsupportedSubstitution(format!(
                    "exponent `{}` is not linear in coordinates with parameter-affine coefficients",
                    e
                )));
            }
            let v = *k.coord.keys().next().unwrap();
            let aff = match k.param.keys().next() {
                None => Affine::constant(c.clone()),
                Some(p) => Affine {
                    constant: Scalar::zero(),
                    coeffs: BTreeMap::from([(p.clone(), c.clone())]),
                },
            };
            out = out.add(&Frequency(BTreeMap::from([(v, aff)])));
        }
        Ok(out)
    }
}

/// Uninterpreted function of the listed coordinate variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct OpaqueAtom {
    pub name: String,
    pub deps: Vec<usize>,
}

impl OpaqueAtom {
    pub fn new(name: impl Into<String>, mut deps: Vec<usize>) -> Self {
        deps.sort_unstable();
        deps.dedup();
        OpaqueAtom { name: name.into(), deps }
    }
}

pub type OpaqueSet = BTreeMap<OpaqueAtom, u32>;

/// Everything in a term except its coefficient. Field order fixes the
/// canonical term order: coordinates, opaque atoms, parameters, frequency.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct TermKey {
    pub coord: CoordMono,
    pub opaque: OpaqueSet,
    pub param: ParamMono,
    pub freq: Frequency,
}

fn add_mono<K: Ord + Clone>(a: &BTreeMap<K, u32>, b: &BTreeMap<K, u32>) -> BTreeMap<K, u32> {
    let mut out = a.clone();
    for (k, e) in b {
        *out.entry(k.clone()).or_insert(0) += e;
    }
    out
}

impl TermKey {
    pub fn is_one(&self) -> bool {
        self.coord.is_empty() && self.opaque.is_empty() && self.param.is_empty() && self.freq.is_zero()
    }

    fn mul(&self, o: &TermKey) -> TermKey {
        TermKey {
            coord: add_mono(&self.coord, &o.coord),
            opaque: add_mono(&self.opaque, &o.opaque),
            param: add_mono(&self.param, &o.param),
            freq: self.freq.add(&o.freq),
        }
    }

    pub fn coord_degree(&self) -> u32 {
        self.coord.values().sum()
    }
}

/// Variables that can be bound by [`Expr::substitute`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Symbol {
    Coord(usize),
    Param(String),
    Opaque(String),
}

pub type Bindings = BTreeMap<Symbol, Expr>;

/// Numeric evaluation point for the floating-point sanity harness.
#[derive(Clone, Debug, Default)]
pub struct EvalPoint {
    pub coords: Vec<f64>,
    pub params: BTreeMap<String, f64>,
    pub opaque: BTreeMap<String, f64>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Expr {
    terms: BTreeMap<TermKey, Scalar>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::scalar(Scalar::one())
    }

    pub fn scalar(c: Scalar) -> Self {
        Expr::term(TermKey::default(), c)
    }

    pub fn int(n: i64) -> Self {
        Expr::scalar(Scalar::from_int(n))
    }

    pub fn term(key: TermKey, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(key, c);
        }
        Expr { terms }
    }

    /// Coordinate `x_{v+1}` (indices are zero-based internally).
    pub fn coord(v: usize) -> Self {
        Expr::term(TermKey { coord: BTreeMap::from([(v, 1)]), ..Default::default() }, Scalar::one())
    }

    pub fn param(name: &str) -> Self {
        Expr::term(
            TermKey { param: BTreeMap::from([(name.to_string(), 1)]), ..Default::default() },
            Scalar::one(),
        )
    }

    pub fn exp(freq: Frequency) -> Self {
        Expr::term(TermKey { freq, ..Default::default() }, Scalar::one())
    }

    pub fn opaque(atom: OpaqueAtom) -> Self {
        Expr::term(TermKey { opaque: BTreeMap::from([(atom, 1)]), ..Default::default() }, Scalar::one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_scalar().is_some_and(|s| s.is_one())
    }

    /// The value if this is a constant (possibly zero).
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (k, c) = self.terms.iter().next().unwrap();
                k.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<(&TermKey, &Scalar)> {
        self.terms.iter().next()
    }

    pub(crate) fn insert_add(&mut self, key: TermKey, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v = &*v + &c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn scale(&self, s: &Scalar) -> Expr {
        if s.is_zero() {
            return Expr::zero();
        }
        Expr { terms: self.terms.iter().map(|(k, c)| (k.clone(), c * s)).collect() }
    }

    /// Multiply every term by a single term key (a monomial or exponential).
    pub fn mul_key(&self, key: &TermKey) -> Expr {
        Expr { terms: self.terms.iter().map(|(k, c)| (k.mul(key), c.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Expr {
        let mut acc = Expr::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn conj(&self) -> Expr {
        let mut out = Expr::zero();
        for (k, c) in &self.terms {
            let mut k2 = k.clone();
            k2.freq = k.freq.conj();
            out.insert_add(k2, c.conj());
        }
        out
    }

    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    pub fn coords_used(&self) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        for k in self.terms.keys() {
            s.extend(k.coord.keys().copied());
            s.extend(k.freq.0.keys().copied());
            for a in k.opaque.keys() {
                s.extend(a.deps.iter().copied());
            }
        }
        s
    }

    pub fn params_used(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        for k in self.terms.keys() {
            s.extend(k.param.keys().cloned());
            for a in k.freq.0.values() {
                s.extend(a.coeffs.keys().cloned());
            }
        }
        s
    }

    pub fn opaque_atoms(&self) -> BTreeSet<OpaqueAtom> {
        self.terms.keys().flat_map(|k| k.opaque.keys().cloned()).collect()
    }

    pub fn has_exp(&self) -> bool {
        self.terms.keys().any(|k| !k.freq.is_zero())
    }

    /// Polynomial in parameters only: no coordinates, exponentials or atoms.
    pub fn is_param_poly(&self) -> bool {
        self.terms
            .keys()
            .all(|k| k.coord.is_empty() && k.freq.is_zero() && k.opaque.is_empty())
    }

    /// Exact partial derivative along coordinate `v`.
    pub fn derive(&self, v: usize) -> Result<Expr> {
        let mut out = Expr::zero();
        for (k, c) in &self.terms {
            if let Some(a) = k.opaque.keys().find(|a| a.deps.contains(&v)) {
                return Err(Error::UnsupportedDerivative { atom: a.name.clone(), var: v + 1 });
            }
            if let Some(&e) = k.coord.get(&v) {
                let mut k2 = k.clone();
                if e == 1 {
                    k2.coord.remove(&v);
                } else {
                    k2.coord.insert(v, e - 1);
                }
                out.insert_add(k2, c * &Scalar::from_int(e as i64));
            }
            if let Some(lambda) = k.freq.0.get(&v) {
                let t = Expr::term(k.clone(), c.clone());
                out = &out + &(&t * &lambda.to_expr());
            }
        }
        Ok(out)
    }

    /// Simultaneous substitution of coordinates, parameters and opaque atoms.
    pub fn substitute(&self, b: &Bindings) -> Result<Expr> {
        if b.is_empty() {
            return Ok(self.clone());
        }
        let mut out = Expr::zero();
        for (k, c) in &self.terms {
            let mut t = Expr::scalar(c.clone());
            for (&v, &e) in &k.coord {
                let base = b.get(&Symbol::Coord(v)).cloned().unwrap_or_else(|| Expr::coord(v));
                t = &t * &base.pow(e);
            }
            for (p, &e) in &k.param {
                let base = b.get(&Symbol::Param(p.clone())).cloned().unwrap_or_else(|| Expr::param(p));
                t = &t * &base.pow(e);
            }
            for (atom, &e) in &k.opaque {
                let base = match b.get(&Symbol::Opaque(atom.name.clone())) {
                    Some(x) => x.clone(),
                    None => {
                        for d in &atom.deps {
                            if let Some(bound) = b.get(&Symbol::Coord(*d)) {
                                if *bound != Expr::coord(*d) {
                                    return Err(Error::UnsupportedSubstitution(format!(
                                        "x{} is an argument of opaque atom {}",
                                        d + 1,
                                        atom.name
                                    )));
                                }
                            }
                        }
                        Expr::opaque(atom.clone())
                    }
                };
                t = &t * &base.pow(e);
            }
            if !k.freq.is_zero() {
                let exponent = k.freq.exponent().substitute(b)?;
                t = &t * &Expr::exp(Frequency::from_exponent(&exponent)?);
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Set the listed coordinates to zero.
    pub fn at_zero(&self, vars: &[usize]) -> Result<Expr> {
        let b: Bindings = vars.iter().map(|&v| (Symbol::Coord(v), Expr::zero())).collect();
        self.substitute(&b)
    }

    /// Replace every opaque atom by zero (the normal-form convention `f(0) = 0`
    /// is applied by callers before evaluating at the origin).
    pub fn drop_opaque(&self) -> Expr {
        Expr { terms: self.terms.iter().filter(|(k, _)| k.opaque.is_empty()).map(|(k, c)| (k.clone(), c.clone())).collect() }
    }

    pub fn eval(&self, pt: &EvalPoint) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let (re, im) = c.to_f64_pair();
            let mut t = Complex64::new(re, im);
            for (&v, &e) in &k.coord {
                t *= pt.coords.get(v).copied().unwrap_or(0.0).powi(e as i32);
            }
            for (p, &e) in &k.param {
                t *= pt.params.get(p).copied().unwrap_or(0.0).powi(e as i32);
            }
            for (a, &e) in &k.opaque {
                t *= pt.opaque.get(&a.name).copied().unwrap_or(0.0).powi(e as i32);
            }
            let mut z = Complex64::new(0.0, 0.0);
            for (&v, aff) in &k.freq.0 {
                let (re, im) = aff.constant.to_f64_pair();
                let mut lam = Complex64::new(re, im);
                for (p, c) in &aff.coeffs {
                    let (re, im) = c.to_f64_pair();
                    lam += Complex64::new(re, im) * pt.params.get(p).copied().unwrap_or(0.0);
                }
                z += lam * pt.coords.get(v).copied().unwrap_or(0.0);
            }
            acc += t * z.exp();
        }
        acc
    }
}

impl From<Scalar> for Expr {
    fn from(s: Scalar) -> Self {
        Expr::scalar(s)
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, o: &Expr) -> Expr {
        let (big, small) = if self.terms.len() >= o.terms.len() { (self, o) } else { (o, self) };
        let mut out = big.clone();
        for (k, c) in &small.terms {
            out.insert_add(k.clone(), c.clone());
        }
        out
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr { terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect() }
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, o: &Expr) -> Expr {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.insert_add(k.clone(), -c);
        }
        out
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, o: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &o.terms {
                out.insert_add(k1.mul(k2), c1 * c2);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl Zero for Expr {
    fn zero() -> Self {
        Expr::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Expr {
        Expr::coord(i - 1)
    }

    fn e_x(i: usize, s: i64) -> Expr {
        Expr::exp(Frequency(BTreeMap::from([(i - 1, Affine::constant(Scalar::from_int(s)))])))
    }

    #[test]
    fn add_cancels() {
        let e = &(&x(1) + &Expr::int(2)) + &(-&x(1));
        assert_eq!(e, Expr::int(2));
        let a = Expr::param("a");
        assert_eq!(&(&a - &x(2)) + &x(2), a);
        assert_eq!(&e_x(2, 1) + &e_x(2, 1), e_x(2, 1).scale(&Scalar::from_int(2)));
    }

    #[test]
    fn mul_frequencies() {
        assert_eq!(&e_x(1, 1) * &e_x(1, -1), Expr::one());
        let c = Expr::param("c");
        let lhs = &(&(-&c) * &e_x(2, 1)) * &x(1);
        assert_eq!(lhs.to_string(), "-c*x1*exp(x2)");
        let f = Expr::opaque(OpaqueAtom::new("f", vec![3]));
        assert!((&f * &Expr::zero()).is_zero());
    }

    #[test]
    fn derivatives() {
        let a = Expr::param("a");
        assert_eq!((&a - &x(2)).derive(1).unwrap(), Expr::int(-1));
        assert_eq!(e_x(2, 1).derive(1).unwrap(), e_x(2, 1));
        let f = Expr::opaque(OpaqueAtom::new("f", vec![3]));
        assert_eq!((&f * &x(1)).derive(0).unwrap(), f);
        assert!(matches!(f.derive(3), Err(Error::UnsupportedDerivative { .. })));
    }

    #[test]
    fn substitution() {
        let a = Expr::param("a");
        let b = Bindings::from([(Symbol::Coord(1), Expr::zero())]);
        assert_eq!((&a - &x(2)).substitute(&b).unwrap(), a);
        let c = Expr::param("c");
        let e = &(-&c) * &e_x(2, 1);
        let b = Bindings::from([(Symbol::Param("c".into()), Expr::one())]);
        assert_eq!(e.substitute(&b).unwrap(), -&e_x(2, 1));
        assert_eq!(e_x(3, 5).at_zero(&[2]).unwrap(), Expr::one());
        // renaming a parameter into a slot form c1 + x4
        let b = Bindings::from([(Symbol::Param("a".into()), &Expr::param("c1") + &Expr::zero())]);
        let r = (&a + &x(4)).substitute(&b).unwrap();
        assert_eq!(r, &Expr::param("c1") + &x(4));
    }

    #[test]
    fn non_affine_exponent_rejected() {
        let e = Expr::exp(Frequency(BTreeMap::from([(1, Affine::constant(Scalar::one()))])));
        let b = Bindings::from([(Symbol::Coord(1), &x(2) * &x(1))]);
        assert!(matches!(e.substitute(&b), Err(Error::UnsupportedSubstitution(_))));
        let b = Bindings::from([(Symbol::Coord(1), Expr::one())]);
        assert!(e.substitute(&b).is_err());
    }

    #[test]
    fn opaque_dependency_blocks_substitution() {
        let f = Expr::opaque(OpaqueAtom::new("f", vec![3]));
        let b = Bindings::from([(Symbol::Coord(3), Expr::zero())]);
        assert!(f.substitute(&b).is_err());
        let b = Bindings::from([(Symbol::Opaque("f".into()), Expr::zero())]);
        assert!(f.substitute(&b).unwrap().is_zero());
    }
}
