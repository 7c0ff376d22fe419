mod common;

use std::collections::BTreeMap;

use common::{rexpr, rng};
use lierea_core::algdef::{parse_algdef, parse_field, parse_realization};
use lierea_core::catalog;
use lierea_core::expr::{Bindings, Expr, Symbol};
use lierea_core::linalg::{kernel, span_basis};
use lierea_core::regular::{
    complete_system, enumerate_normal_forms, extend_regular, Mode, ParamAssignment, Slot, SlotKind, SystemPlan,
};
use lierea_core::scalar::{int, rat, Rational};
use lierea_core::transitive::realize_transitive;
use lierea_core::verify;
use lierea_core::{Error, Style};
use rand::Rng;

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

#[test]
fn fresh_slot_on_h3_with_c_one() {
    let e = catalog::get("g2.1+2g1").unwrap();
    let base = realize_transitive(&e.def.algebra, e.def.subalgebra("h3").unwrap()).unwrap();
    let base = base.substitute(&BTreeMap::from([(Symbol::Param("c".into()), Expr::one())])).unwrap();
    let a = ParamAssignment::from_kinds(&[SlotKind::Fresh]).unwrap().with_offsets(&[Expr::param("a")]).unwrap();
    let row = extend_regular(&base, &names(&["a"]), &a, 4).unwrap();
    let want: Vec<_> = ["d1", "x1*d1 + d2", "d3", "-exp(x2)*d1 - (a + x4)*d3"]
        .iter()
        .map(|s| parse_field(s, 4).unwrap())
        .collect();
    assert_eq!(row.result.fields, want);
    assert_eq!(row.result.provenance.label, "h3^{a+x4}");
    assert_eq!(row.result.provenance.params, names(&["a"]));
}

#[test]
fn abelian_fresh_then_opaque() {
    let e = catalog::get("3g1").unwrap();
    let base = realize_transitive(&e.def.algebra, e.def.subalgebra("h3").unwrap()).unwrap();
    assert_eq!(base.m, 2);
    let a = ParamAssignment::from_kinds(&[SlotKind::Fresh, SlotKind::Opaque])
        .unwrap()
        .with_offsets(&[Expr::param("a"), Expr::param("b")])
        .unwrap();
    let row = extend_regular(&base, &names(&["a", "b"]), &a, 3).unwrap();
    assert_eq!(row.result.fields[2].render(Style::Plain), "(a + x3)*d1 + (b + f(x3))*d2");
    assert!(verify::check_homomorphism(&row.result).unwrap().is_empty());
    assert_eq!(verify::generic_rank(&row.result), 2);
    assert!(verify::is_regular_at_origin(&row.result).unwrap());
}

#[test]
fn all_const_is_trivial_extension() {
    for key in catalog::list() {
        let e = catalog::get(key).unwrap();
        for fam in &e.def.subalgebras {
            let base = realize_transitive(&e.def.algebra, fam).unwrap();
            let kinds = vec![SlotKind::Const; fam.params.len()];
            let offsets: Vec<Expr> = fam.params.iter().map(|p| Expr::param(p)).collect();
            let a = ParamAssignment::from_kinds(&kinds).unwrap().with_offsets(&offsets).unwrap();
            let row = extend_regular(&base, &fam.params, &a, base.m + 2).unwrap();
            assert_eq!(row.result.m, base.m + 2);
            for (f, g) in row.result.fields.iter().zip(&base.fields) {
                assert_eq!(&f.components[..base.m], &g.components[..]);
                assert!(f.components[base.m..].iter().all(|c| c.is_zero()));
            }
        }
    }
}

#[test]
fn base_recovered_at_zero() {
    let e = catalog::get("g2.1+2g1").unwrap();
    let plan = e.plan.clone().unwrap();
    let sys = complete_system(&e.def.algebra, &e.def.subalgebras, &plan, Mode::Strong).unwrap();
    for row in &sys.rows {
        let mut b: Bindings = (3..5).map(|v| (Symbol::Coord(v), Expr::zero())).collect();
        b.insert(Symbol::Opaque("f".into()), Expr::zero());
        let at0 = row.result.substitute(&b).unwrap();
        for (f, g) in at0.fields.iter().zip(&row.base.fields) {
            assert_eq!(&f.components[..3], &g.components[..], "{}", row.result.provenance.label);
        }
    }
}

#[test]
fn extension_errors() {
    let e = catalog::get("g2.1+2g1").unwrap();
    let base = realize_transitive(&e.def.algebra, e.def.subalgebra("h4").unwrap()).unwrap();
    let a = ParamAssignment::from_kinds(&[SlotKind::Fresh, SlotKind::Fresh]).unwrap();
    assert!(matches!(extend_regular(&base, &names(&["a", "b"]), &a, 4), Err(Error::InvalidArgument(_))));
    assert!(matches!(extend_regular(&base, &names(&["a"]), &a, 5), Err(Error::InvalidArgument(_))));

    let text = "algebra g1\ndim 1\nparams a\nvars 1\ne1 -> exp(a*x1)*d1\n";
    let r = parse_realization(text).unwrap().realization();
    let a = ParamAssignment::from_kinds(&[SlotKind::Fresh]).unwrap().with_offsets(&[Expr::param("a")]).unwrap();
    assert!(matches!(extend_regular(&r, &names(&["a"]), &a, 2), Err(Error::UnsupportedSubstitution(_))));

    let bad = SystemPlan { r: 3, m: 2, families: vec![], caveats: vec![] };
    assert!(complete_system(&e.def.algebra, &e.def.subalgebras, &bad, Mode::Inn).is_err());
}

#[test]
fn opaque_slot_needs_earlier_fresh() {
    let s = Slot::Opaque { offset: Expr::zero(), atom: "f".into(), deps: vec![1] };
    assert!(ParamAssignment::new(vec![s.clone()]).is_err());
    let ok = ParamAssignment::new(vec![Slot::Fresh { offset: Expr::zero(), l: 1 }, s]).unwrap();
    assert_eq!(ok.pattern(), "F,O");
}

#[test]
fn normal_form_counts() {
    // with no cap every slot is either fresh or not
    for s in 0..6 {
        assert_eq!(enumerate_normal_forms(s, s).len(), 1 << s);
    }
    // the cap keeps sequences with at most k fresh slots: sum of binomials
    let binom = |n: usize, k: usize| (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
    for s in 0..6 {
        for k in 0..=s {
            assert_eq!(enumerate_normal_forms(s, k).len(), (0..=k).map(|j| binom(s, j)).sum::<usize>());
        }
    }
}

fn intersect(u: &[Vec<Rational>], w: &[Vec<Rational>], n: usize) -> Vec<Vec<Rational>> {
    let mut ann = kernel(u, n);
    ann.extend(kernel(w, n));
    if u.is_empty() || w.is_empty() {
        return vec![];
    }
    span_basis(&kernel(&ann, n))
}

/// Kernel of every Inn row at sampled parameters equals the common part of
/// the largest ideals along the row.
#[test]
fn kernel_is_common_ideal() {
    let e = catalog::get("g2.1+2g1").unwrap();
    let c = &e.def.algebra;
    let plan = e.plan.clone().unwrap();
    let sys = complete_system(c, &e.def.subalgebras, &plan, Mode::Inn).unwrap();
    let mut g = rng(11);
    let mut rows_by_family: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for fp in &plan.families {
        rows_by_family.insert(fp.family.clone(), fp.slots.clone());
    }
    for row in &sys.rows {
        let r = &row.result;
        let fam = e.def.subalgebra(&r.provenance.subalgebra).unwrap();
        let slots = &rows_by_family[&fam.name];
        let pvals: BTreeMap<String, Rational> =
            ["a", "b"].iter().map(|p| (p.to_string(), rat(g.gen_range(-5..=5), g.gen_range(1..=3)))).collect();
        let pb: Bindings = pvals.iter().map(|(k, v)| (Symbol::Param(k.clone()), rexpr(v))).collect();
        let fixed = r.substitute(&pb).unwrap();
        let ker = verify::kernel(&fixed);
        // the fixed non-slot parameter (c) is read off the label's last entry
        let label = &r.provenance.label;
        let cval: Option<Rational> = if fam.params.contains(&"c".to_string()) {
            let inner = label.split('{').nth(1).unwrap().trim_end_matches('}');
            Some(inner.rsplit(',').next().unwrap().parse::<i64>().map(int).unwrap())
        } else {
            None
        };
        let mut common: Option<Vec<Vec<Rational>>> = None;
        for _ in 0..4 {
            let mut vals = pvals.clone();
            let draws: Vec<Rational> = (0..3).map(|_| rat(g.gen_range(-9..=9), g.gen_range(1..=5))).collect();
            for (j, (p, s)) in slots.iter().zip(row.assignment.slots()).enumerate() {
                let off = s.offset().substitute(&pb).unwrap().as_scalar().unwrap().re;
                let v = match s {
                    Slot::Const(_) => off,
                    _ => off + draws[j].clone(),
                };
                vals.insert(p.clone(), v);
            }
            if let Some(cv) = &cval {
                vals.insert("c".into(), cv.clone());
            }
            vals.retain(|k, _| fam.params.contains(k));
            let ideal = c.largest_contained_ideal(&fam.instantiate(&vals).unwrap());
            common = Some(match common {
                None => ideal,
                Some(prev) => intersect(&prev, &ideal, 4),
            });
        }
        assert_eq!(span_basis(&ker), span_basis(&common.unwrap()), "{}", label);
    }
}

#[test]
fn definition_for_custom_plan() {
    let d = parse_algdef("algebra 2g1\ndim 2\nparams t\nsubalgebra line = span(1,t)\n").unwrap();
    let plan = SystemPlan {
        r: 1,
        m: 2,
        families: vec![lierea_core::regular::FamilyPlan {
            family: "line".into(),
            slots: names(&["t"]),
            inn: vec![],
            aut: None,
        }],
        caveats: vec![],
    };
    let sys = complete_system(&d.algebra, &d.subalgebras, &plan, Mode::Inn).unwrap();
    assert_eq!(sys.render(Style::Plain), "line^{t} : -t*d1 ; d1\nline^{t+x2} : -(t + x2)*d1 ; d1\n");
    assert!(complete_system(&d.algebra, &d.subalgebras, &plan, Mode::Aut).unwrap().rows.is_empty());
}
