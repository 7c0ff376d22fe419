use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{Bindings, EvalPoint, Expr, Frequency, OpaqueAtom, TermKey};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Quotient of two expressions. Stored unreduced apart from cheap
/// normalizations (monic denominator, common monomial and exponential
/// factors, proportional numerator); equality is by cross-multiplication.
#[derive(Clone, Debug)]
pub struct RatExpr {
    num: Expr,
    den: Expr,
}

fn min_mono<K: Ord + Clone>(acc: &mut Option<BTreeMap<K, u32>>, m: &BTreeMap<K, u32>) {
    match acc {
        None => *acc = Some(m.clone()),
        Some(g) => {
            let keys: Vec<K> = g.keys().cloned().collect();
            for k in keys {
                let e = m.get(&k).copied().unwrap_or(0).min(g[&k]);
                if e == 0 {
                    g.remove(&k);
                } else {
                    g.insert(k, e);
                }
            }
        }
    }
}

fn div_mono<K: Ord + Clone>(m: &BTreeMap<K, u32>, g: &BTreeMap<K, u32>) -> BTreeMap<K, u32> {
    let mut out = m.clone();
    for (k, e) in g {
        let left = out[k] - e;
        if left == 0 {
            out.remove(k);
        } else {
            out.insert(k.clone(), left);
        }
    }
    out
}

impl RatExpr {
    pub fn new(num: Expr, den: Expr) -> Result<RatExpr> {
        if den.is_zero() {
            return Err(Error::SingularSubstitution("zero denominator".into()));
        }
        Ok(RatExpr::from_parts(num, den))
    }

    fn from_parts(num: Expr, den: Expr) -> RatExpr {
        assert!(!den.is_zero(), "zero denominator");
        let mut q = RatExpr { num, den };
        q.normalize();
        q
    }

    pub fn from_expr(e: Expr) -> RatExpr {
        RatExpr { num: e, den: Expr::one() }
    }

    pub fn zero() -> RatExpr {
        RatExpr::from_expr(Expr::zero())
    }

    pub fn one() -> RatExpr {
        RatExpr::from_expr(Expr::one())
    }

    pub fn num(&self) -> &Expr {
        &self.num
    }

    pub fn den(&self) -> &Expr {
        &self.den
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Expr::one();
            return;
        }
        if self.den.is_one() {
            return;
        }
        // strip exponential unit and common monomial content
        let shift = self.den.leading().unwrap().0.freq.real_part().neg();
        let mut gc = None;
        let mut gp = None;
        let mut go: Option<BTreeMap<OpaqueAtom, u32>> = None;
        for (k, _) in self.num.terms().chain(self.den.terms()) {
            min_mono(&mut gc, &k.coord);
            min_mono(&mut gp, &k.param);
            min_mono(&mut go, &k.opaque);
        }
        let (gc, gp, go) = (gc.unwrap(), gp.unwrap(), go.unwrap());
        if !shift.is_zero() || !gc.is_empty() || !gp.is_empty() || !go.is_empty() {
            let strip = |e: &Expr| {
                let mut out = Expr::zero();
                for (k, c) in e.terms() {
                    let key = TermKey {
                        coord: div_mono(&k.coord, &gc),
                        opaque: div_mono(&k.opaque, &go),
                        param: div_mono(&k.param, &gp),
                        freq: k.freq.add(&shift),
                    };
                    out = &out + &Expr::term(key, c.clone());
                }
                out
            };
            self.num = strip(&self.num);
            self.den = strip(&self.den);
        }
        let lead = self.den.leading().unwrap().1.clone();
        if !lead.is_one() {
            let inv = lead.inv().unwrap();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
        if self.den.is_one() {
            return;
        }
        let k = self.num.leading().unwrap().1 / self.den.leading().unwrap().1;
        if self.den.scale(&k) == self.num {
            self.num = Expr::scalar(k);
            self.den = Expr::one();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The numerator when the denominator is exactly one.
    pub fn as_expr(&self) -> Option<&Expr> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn as_scalar(&self) -> Option<Scalar> {
        self.as_expr().and_then(|e| e.as_scalar())
    }

    pub fn scale(&self, s: &Scalar) -> RatExpr {
        RatExpr::from_parts(self.num.scale(s), self.den.clone())
    }

    pub fn mul_expr(&self, e: &Expr) -> RatExpr {
        RatExpr::from_parts(&self.num * e, self.den.clone())
    }

    pub fn div(&self, o: &RatExpr) -> Result<RatExpr> {
        if o.is_zero() {
            return Err(Error::InvalidArgument("division by zero expression".into()));
        }
        Ok(RatExpr::from_parts(&self.num * &o.den, &self.den * &o.num))
    }

    pub fn derive(&self, v: usize) -> Result<RatExpr> {
        let dn = self.num.derive(v)?;
        if self.den.as_scalar().is_some() {
            return Ok(RatExpr::from_parts(dn, self.den.clone()));
        }
        let dd = self.den.derive(v)?;
        Ok(RatExpr::from_parts(&(&dn * &self.den) - &(&self.num * &dd), &self.den * &self.den))
    }

    /// True when the value does not depend on `x_v` (quotient-rule numerator vanishes).
    pub fn independent_of(&self, v: usize) -> Result<bool> {
        let dn = self.num.derive(v)?;
        let dd = self.den.derive(v)?;
        Ok((&(&dn * &self.den) - &(&self.num * &dd)).is_zero())
    }

    pub fn substitute(&self, b: &Bindings) -> Result<RatExpr> {
        let den = self.den.substitute(b)?;
        if den.is_zero() {
            return Err(Error::SingularSubstitution(format!("denominator `{}` vanishes", self.den)));
        }
        Ok(RatExpr::from_parts(self.num.substitute(b)?, den))
    }

    /// Set the listed coordinates to zero in numerator and denominator.
    pub fn at_zero(&self, vars: &[usize]) -> Result<RatExpr> {
        let den = self.den.at_zero(vars)?;
        if den.is_zero() {
            return Err(Error::SingularSubstitution(format!(
                "denominator `{}` vanishes at the origin",
                self.den
            )));
        }
        Ok(RatExpr::from_parts(self.num.at_zero(vars)?, den))
    }

    pub fn drop_opaque(&self) -> Result<RatExpr> {
        RatExpr::new(self.num.drop_opaque(), self.den.drop_opaque())
    }

    pub fn conj(&self) -> RatExpr {
        RatExpr::from_parts(self.num.conj(), self.den.conj())
    }

    pub fn is_real(&self) -> bool {
        (&(&self.num * &self.den.conj()) - &(&self.num.conj() * &self.den)).is_zero()
    }

    /// Rewrite with a real denominator when the denominator is a constant
    /// multiple of a real expression. Used before trigonometric rendering.
    pub fn realified(&self) -> RatExpr {
        let lead = self.den.leading().unwrap().1.clone();
        let inv = lead.inv().unwrap();
        let d = self.den.scale(&inv);
        if d.is_real() {
            RatExpr { num: self.num.scale(&inv), den: d }
        } else {
            self.clone()
        }
    }

    pub fn coords_used(&self) -> std::collections::BTreeSet<usize> {
        let mut s = self.num.coords_used();
        s.extend(self.den.coords_used());
        s
    }

    pub fn params_used(&self) -> std::collections::BTreeSet<String> {
        let mut s = self.num.params_used();
        s.extend(self.den.params_used());
        s
    }

    pub fn opaque_atoms(&self) -> std::collections::BTreeSet<OpaqueAtom> {
        let mut s = self.num.opaque_atoms();
        s.extend(self.den.opaque_atoms());
        s
    }

    pub fn eval(&self, pt: &EvalPoint) -> Complex64 {
        self.num.eval(pt) / self.den.eval(pt)
    }

    pub fn has_exp(&self) -> bool {
        self.num.has_exp() || self.den.has_exp()
    }

    pub fn exp_of(freq: Frequency) -> RatExpr {
        RatExpr::from_expr(Expr::exp(freq))
    }
}

impl From<Expr> for RatExpr {
    fn from(e: Expr) -> Self {
        RatExpr::from_expr(e)
    }
}

impl PartialEq for RatExpr {
    fn eq(&self, o: &RatExpr) -> bool {
        if self.den == o.den {
            return self.num == o.num;
        }
        (&self.num * &o.den) == (&o.num * &self.den)
    }
}

impl Eq for RatExpr {}

impl Add for &RatExpr {
    type Output = RatExpr;
    fn add(self, o: &RatExpr) -> RatExpr {
        if self.den == o.den {
            return RatExpr::from_parts(&self.num + &o.num, self.den.clone());
        }
        if o.den.is_one() {
            return RatExpr::from_parts(&self.num + &(&o.num * &self.den), self.den.clone());
        }
        if self.den.is_one() {
            return RatExpr::from_parts(&(&self.num * &o.den) + &o.num, o.den.clone());
        }
        RatExpr::from_parts(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl Neg for &RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        RatExpr { num: -&self.num, den: self.den.clone() }
    }
}

impl Sub for &RatExpr {
    type Output = RatExpr;
    fn sub(self, o: &RatExpr) -> RatExpr {
        self + &(-o)
    }
}

impl Mul for &RatExpr {
    type Output = RatExpr;
    fn mul(self, o: &RatExpr) -> RatExpr {
        if self.is_zero() || o.is_zero() {
            return RatExpr::zero();
        }
        RatExpr::from_parts(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Add for RatExpr {
    type Output = RatExpr;
    fn add(self, o: RatExpr) -> RatExpr {
        &self + &o
    }
}

impl Sub for RatExpr {
    type Output = RatExpr;
    fn sub(self, o: RatExpr) -> RatExpr {
        &self - &o
    }
}

impl Mul for RatExpr {
    type Output = RatExpr;
    fn mul(self, o: RatExpr) -> RatExpr {
        &self * &o
    }
}

impl Neg for RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        -&self
    }
}

impl fmt::Display for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::render::render_rat(self, super::Style::Plain))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Expr {
        Expr::coord(i - 1)
    }

    #[test]
    fn simplify_at_zero() {
        let num = &(&x(3) * &x(1)) + &x(1);
        let den = &x(3) + &Expr::one();
        // cross-multiplication oracle
        assert_eq!(&num * &Expr::one(), &x(1) * &den);
        let q = RatExpr::new(num, den).unwrap();
        let r = q.at_zero(&[2]).unwrap();
        assert_eq!(r.as_expr(), Some(&x(1)));
        assert_eq!(RatExpr::one().at_zero(&[3]).unwrap(), RatExpr::one());
    }

    #[test]
    fn singular_at_zero() {
        let q = RatExpr::new(Expr::one(), x(3)).unwrap();
        assert!(matches!(q.at_zero(&[2]), Err(Error::SingularSubstitution(_))));
    }

    #[test]
    fn cross_multiplied_equality() {
        let a = RatExpr::new(x(1), &x(1) * &x(2)).unwrap();
        let b = RatExpr::new(Expr::one(), x(2)).unwrap();
        assert_eq!(a, b);
        let c = RatExpr::new(&x(1) + &x(2), &x(1) + &x(2)).unwrap();
        assert_eq!(c.as_expr(), Some(&Expr::one()));
    }

    #[test]
    fn quotient_rule() {
        let q = RatExpr::new(Expr::one(), &x(1) + &Expr::one()).unwrap();
        let d = q.derive(0).unwrap();
        let expect = RatExpr::new(Expr::int(-1), (&x(1) + &Expr::one()).pow(2)).unwrap();
        assert_eq!(d, expect);
    }
}
