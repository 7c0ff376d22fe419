#![allow(dead_code)]

use std::collections::BTreeMap;

use lierea_core::catalog;
use lierea_core::expr::Expr;
use lierea_core::liealg::SubalgebraFamily;
use lierea_core::scalar::{rat, Rational, Scalar};
use lierea_core::{RatExpr, StructureConstants, VectorField};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(e: Expr) -> RatExpr {
    RatExpr::from_expr(e)
}

pub fn rexpr(r: &Rational) -> Expr {
    Expr::scalar(Scalar::real(r.clone()))
}

/// Polynomial of total degree <= 2 in `m` coordinates, small integer coefficients.
pub fn random_poly(r: &mut ChaCha8Rng, m: usize) -> Expr {
    let mut e = Expr::int(r.gen_range(-2..=2));
    for i in 0..m {
        e = &e + &(&Expr::int(r.gen_range(-2..=2)) * &Expr::coord(i));
        for j in i..m {
            e = &e + &(&Expr::int(r.gen_range(-2..=2)) * &(&Expr::coord(i) * &Expr::coord(j)));
        }
    }
    e
}

pub fn random_field(r: &mut ChaCha8Rng, m: usize) -> VectorField {
    VectorField::new((0..m).map(|_| q(random_poly(r, m))).collect())
}

/// `X(f) = Σ X^i ∂_i f`.
pub fn apply_field(x: &VectorField, f: &RatExpr) -> RatExpr {
    let mut out = RatExpr::zero();
    for (i, c) in x.components.iter().enumerate() {
        out = &out + &(c * &f.derive(i).unwrap());
    }
    out
}

pub fn add(x: &VectorField, y: &VectorField) -> VectorField {
    VectorField::new(x.components.iter().zip(&y.components).map(|(a, b)| a + b).collect())
}

pub fn mul(f: &RatExpr, x: &VectorField) -> VectorField {
    VectorField::new(x.components.iter().map(|a| f * a).collect())
}

/// Random rational in {0} ∪ ±p/q with small p, q.
pub fn random_rational(r: &mut ChaCha8Rng) -> Rational {
    if r.gen_range(0..5) == 0 {
        return rat(0, 1);
    }
    rat(r.gen_range(-6..=6), r.gen_range(1..=4))
}

pub fn all_pairs() -> Vec<(String, StructureConstants, SubalgebraFamily)> {
    let mut out = Vec::new();
    for key in catalog::list() {
        let e = catalog::get(key).unwrap();
        for f in &e.def.subalgebras {
            out.push((key.to_string(), e.def.algebra.clone(), f.clone()));
        }
    }
    out
}

pub fn values(fam: &SubalgebraFamily, r: &mut ChaCha8Rng) -> BTreeMap<String, Rational> {
    fam.params.iter().map(|p| (p.clone(), random_rational(r))).collect()
}
