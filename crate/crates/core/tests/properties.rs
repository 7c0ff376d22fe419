mod common;

use std::collections::BTreeMap;

use common::{add, apply_field, mul};
use lierea_core::expr::{parse_rat_expr, Bindings, EvalPoint, Expr, Frequency, Symbol};
use lierea_core::scalar::{int, Scalar};
use lierea_core::verify::lie_bracket;
use lierea_core::{RatExpr, VectorField};
use proptest::prelude::*;

/// (coefficient, exponents of x1 x2 x3 a b, exp frequency along x1)
type Term = (i8, [u8; 5], i8);

fn build(terms: &[Term]) -> Expr {
    let mut e = Expr::zero();
    for (c, pw, f) in terms {
        let mut t = Expr::int(*c as i64);
        for (i, p) in pw.iter().take(3).enumerate() {
            t = &t * &Expr::coord(i).pow(*p as u32);
        }
        t = &t * &Expr::param("a").pow(pw[3] as u32);
        t = &t * &Expr::param("b").pow(pw[4] as u32);
        if *f != 0 {
            t = &t * &Expr::exp(Frequency::from_exponent(&(&Expr::int(*f as i64) * &Expr::coord(0))).unwrap());
        }
        e = &e + &t;
    }
    e
}

fn term() -> impl Strategy<Value = Term> {
    (-4i8..=4, prop::array::uniform5(0u8..=2), -1i8..=1)
}

fn expr() -> impl Strategy<Value = Expr> {
    prop::collection::vec(term(), 0..4).prop_map(|t| build(&t))
}

fn poly_term() -> impl Strategy<Value = Term> {
    (-3i8..=3, prop::array::uniform5(0u8..=1), Just(0i8))
}

fn field(m: usize) -> impl Strategy<Value = VectorField> {
    prop::collection::vec(prop::collection::vec(poly_term(), 0..4), m)
        .prop_map(|cs| VectorField::new(cs.iter().map(|t| RatExpr::from_expr(build(t))).collect()))
}

fn point() -> EvalPoint {
    EvalPoint {
        coords: vec![0.3, -0.7, 1.1],
        params: BTreeMap::from([("a".to_string(), 0.45), ("b".to_string(), -1.3)]),
        opaque: BTreeMap::new(),
    }
}

fn sigma() -> Bindings {
    BTreeMap::from([
        (Symbol::Coord(1), &Expr::coord(2) + &Expr::one()),
        (Symbol::Param("a".into()), &Expr::int(2) * &Expr::param("b")),
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in expr(), b in expr(), c in expr()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn derivative_is_a_derivation(a in expr(), b in expr(), v in 0usize..3) {
        let lhs = (&a * &b).derive(v).unwrap();
        let rhs = &(&a.derive(v).unwrap() * &b) + &(&a * &b.derive(v).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_is_a_homomorphism(a in expr(), b in expr()) {
        let s = sigma();
        prop_assert_eq!((&a * &b).substitute(&s).unwrap(), &a.substitute(&s).unwrap() * &b.substitute(&s).unwrap());
        prop_assert_eq!((&a + &b).substitute(&s).unwrap(), &a.substitute(&s).unwrap() + &b.substitute(&s).unwrap());
    }

    #[test]
    fn float_spot_check(a in expr(), b in expr()) {
        let p = point();
        let prod = (&a * &b).eval(&p);
        let want = a.eval(&p) * b.eval(&p);
        prop_assert!((prod - want).norm() <= 1e-9 * (1.0 + want.norm()));
        if !b.is_zero() && b.eval(&p).norm() > 1e-3 {
            let q = RatExpr::new(a.clone(), b.clone()).unwrap();
            let want = a.eval(&p) / b.eval(&p);
            prop_assert!((q.eval(&p) - want).norm() <= 1e-8 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn rendering_parses_back(a in expr(), b in expr()) {
        let q = if b.is_zero() { RatExpr::from_expr(a) } else { RatExpr::new(a, b).unwrap() };
        prop_assert_eq!(parse_rat_expr(&q.to_string()).unwrap(), q);
    }

    #[test]
    fn conjugation_is_an_involution(a in expr()) {
        let i = Expr::scalar(Scalar::i());
        let z = &a + &(&i * &a);
        prop_assert_eq!(z.conj().conj(), z.clone());
        prop_assert!((&z + &z.conj()).is_real());
        prop_assert_eq!(a.scale(&Scalar::real(int(3))).conj(), a.conj().scale(&Scalar::real(int(3))));
    }

    #[test]
    fn bracket_antisymmetric(x in field(3), y in field(3)) {
        let s = add(&lie_bracket(&x, &y).unwrap(), &lie_bracket(&y, &x).unwrap());
        prop_assert!(s.is_zero());
    }

    #[test]
    fn bracket_jacobi(x in field(2), y in field(2), z in field(2)) {
        let b = |p: &VectorField, q: &VectorField| lie_bracket(p, q).unwrap();
        let j = add(&add(&b(&x, &b(&y, &z)), &b(&y, &b(&z, &x))), &b(&z, &b(&x, &y)));
        prop_assert!(j.is_zero());
    }

    #[test]
    fn bracket_leibniz(x in field(3), y in field(3), f in prop::collection::vec(poly_term(), 0..4)) {
        let f = RatExpr::from_expr(build(&f));
        let lhs = lie_bracket(&x, &mul(&f, &y)).unwrap();
        let rhs = add(&mul(&apply_field(&x, &f), &y), &mul(&f, &lie_bracket(&x, &y).unwrap()));
        prop_assert_eq!(lhs, rhs);
    }
}
