mod common;

use std::collections::BTreeSet;

use common::*;
use lierea_core::algdef::parse_field;
use lierea_core::catalog::{self, Table};
use lierea_core::expr::{Expr, TermKey};
use lierea_core::liealg::{adapted_basis, is_subalgebra, span_equal};
use lierea_core::regular::{enumerate_normal_forms, ParamAssignment, SlotKind};
use lierea_core::scalar::Scalar;
use lierea_core::transitive::{build_omega_adapted, realize_series, realize_transitive, series_agrees};
use lierea_core::verify::{self, check_homomorphism, lie_bracket};
use lierea_core::{RatExpr, Realization, Style, VectorField};

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden_block<'a>(golden: &'a str, name: &str) -> Vec<&'a str> {
    let head = format!("[{}]", name);
    golden.lines().skip_while(|l| *l != head).skip(1).take_while(|l| !l.starts_with('[')).collect()
}

/// Fields written in the published notation, compared as expressions.
fn same_fields(r: &Realization, expected: &[&str]) -> Outcome {
    ensure(r.fields.len() == expected.len(), || format!("{} fields, expected {}", r.fields.len(), expected.len()))?;
    for (k, (f, src)) in r.fields.iter().zip(expected).enumerate() {
        let want = parse_field(src, r.m).map_err(|e| e.to_string())?;
        ensure(*f == want, || format!("e{}: got {}, expected {}", k + 1, f.render(Style::Plain), src))?;
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let e = catalog::get("g3.1").map_err(|e| e.to_string())?;
    let expected: [(&str, [&str; 3]); 3] = [
        ("h1", ["e1 -> 0", "e2 -> d1", "e3 -> d2"]),
        ("h2", ["e1 -> d1", "e2 -> (a - x2)*d1", "e3 -> d2"]),
        ("h3", ["e1 -> d1", "e2 -> d2", "e3 -> (a + x2)*d1 + b*d2"]),
    ];
    for (name, lines) in expected {
        let fam = e.def.subalgebra(name).map_err(|e| e.to_string())?;
        let r = realize_transitive(&e.def.algebra, fam).map_err(|e| e.to_string())?;
        let got = r.render_lines(Style::Plain);
        ensure(got == lines, || format!("{}: {:?}", name, got))?;
        ensure(golden_block(e.golden_realizations, name) == lines, || format!("{}: golden differs", name))?;
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let e = catalog::get("g2.1+2g1").map_err(|e| e.to_string())?;
    let table = catalog::render_table(&e, Table::Transitive).map_err(|e| e.to_string())?;
    ensure(Some(table.as_str()) == catalog::golden_table("g2.1+2g1", Table::Transitive), || {
        format!("table differs from golden:\n{}", table)
    })?;
    let published: [(&str, [&str; 4], &str); 4] = [
        ("h1", ["0", "d1", "d2", "d3"], "No."),
        ("h2", ["d1", "x1*d1 + d2", "-c*exp(x2)*d1", "d3"], "If c != 0."),
        ("h3", ["d1", "x1*d1 + d2", "d3", "-c*exp(x2)*d1 - a*d3"], "If c != 0."),
        ("h4", ["d1", "(x1 - c)*d1 - a*d2 - b*d3", "d2", "d3"], "Yes."),
    ];
    for (name, fields, faithful) in published {
        let fam = e.def.subalgebra(name).map_err(|e| e.to_string())?;
        let r = realize_transitive(&e.def.algebra, fam).map_err(|e| e.to_string())?;
        same_fields(&r, &fields).map_err(|m| format!("{}: {}", name, m))?;
        let res = check_homomorphism(&r).map_err(|e| e.to_string())?;
        ensure(res.is_empty(), || format!("{}: {}", name, res[0]))?;
        let rank = verify::rank_at_origin(&r).map_err(|e| e.to_string())?;
        ensure(rank == 3, || format!("{}: rank at origin {}", name, rank))?;
        let cond = verify::faithful_condition(&r).map_err(|e| e.to_string())?.to_string();
        ensure(cond == faithful, || format!("{}: faithful {} expected {}", name, cond, faithful))?;
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    let e = catalog::get("g2.1+2g1").map_err(|e| e.to_string())?;
    let plan = e.plan.clone().ok_or("no plan")?;
    let published_rows: [(Table, usize); 3] = [(Table::Inn, 14), (Table::Strong, 8), (Table::Aut, 9)];
    for (table, count) in published_rows {
        let text = catalog::render_table(&e, table).map_err(|e| e.to_string())?;
        ensure(Some(text.as_str()) == catalog::golden_table("g2.1+2g1", table), || {
            format!("{} table differs from golden:\n{}", table, text)
        })?;
        let sys = lierea_core::regular::complete_system(&e.def.algebra, &e.def.subalgebras, &plan, table.mode().unwrap())
            .map_err(|e| e.to_string())?;
        ensure(sys.rows.len() == count, || format!("{}: {} rows", table, sys.rows.len()))?;
        for row in &sys.rows {
            let r = &row.result;
            let res = check_homomorphism(r).map_err(|e| e.to_string())?;
            ensure(res.is_empty(), || format!("{} {}: {}", table, r.provenance.label, res[0]))?;
            let g = verify::generic_rank(r);
            let o = verify::rank_at_origin(r).map_err(|e| e.to_string())?;
            ensure(g == 3 && o == 3, || format!("{} {}: ranks {} {}", table, r.provenance.label, g, o))?;
        }
    }
    // Inn table transcribed from the published table, compared as expressions.
    let inn: [(&str, [&str; 4]); 14] = [
        ("h1", ["0", "d1", "d2", "d3"]),
        ("h2^{0}", ["d1", "x1*d1 + d2", "0", "d3"]),
        ("h2^{1}", ["d1", "x1*d1 + d2", "-exp(x2)*d1", "d3"]),
        ("h2^{-1}", ["d1", "x1*d1 + d2", "exp(x2)*d1", "d3"]),
        ("h3^{a,0}", ["d1", "x1*d1 + d2", "d3", "-a*d3"]),
        ("h3^{a+x4,0}", ["d1", "x1*d1 + d2", "d3", "-(a + x4)*d3"]),
        ("h3^{a,1}", ["d1", "x1*d1 + d2", "d3", "-exp(x2)*d1 - a*d3"]),
        ("h3^{a+x4,1}", ["d1", "x1*d1 + d2", "d3", "-exp(x2)*d1 - (a + x4)*d3"]),
        ("h3^{a,-1}", ["d1", "x1*d1 + d2", "d3", "exp(x2)*d1 - a*d3"]),
        ("h3^{a+x4,-1}", ["d1", "x1*d1 + d2", "d3", "exp(x2)*d1 - (a + x4)*d3"]),
        ("h4^{a,b,0}", ["d1", "x1*d1 - a*d2 - b*d3", "d2", "d3"]),
        ("h4^{a,b+x4,0}", ["d1", "x1*d1 - a*d2 - (b + x4)*d3", "d2", "d3"]),
        ("h4^{a+x4,b+f(x4),0}", ["d1", "x1*d1 - (a + x4)*d2 - (b + f(x4))*d3", "d2", "d3"]),
        ("h4^{a+x4,b+x5,0}", ["d1", "x1*d1 - (a + x4)*d2 - (b + x5)*d3", "d2", "d3"]),
    ];
    let sys = lierea_core::regular::complete_system(&e.def.algebra, &e.def.subalgebras, &plan, lierea_core::regular::Mode::Inn)
        .map_err(|e| e.to_string())?;
    for (row, (label, fields)) in sys.rows.iter().zip(inn) {
        ensure(row.result.provenance.label == label, || format!("label {} expected {}", row.result.provenance.label, label))?;
        same_fields(&row.result, &fields).map_err(|m| format!("{}: {}", label, m))?;
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let mut g = rng(4);
    for (key, c, fam) in all_pairs() {
        let r = realize_transitive(&c, &fam).map_err(|e| format!("{}/{}: {}", key, fam.name, e))?;
        for _ in 0..3 {
            let vals = values(&fam, &mut g);
            let h = fam.instantiate(&vals).map_err(|e| e.to_string())?;
            let ideal = c.largest_contained_ideal(&h);
            let ker = verify::kernel_at(&r, &vals).map_err(|e| e.to_string())?;
            let lift = |v: &[Vec<lierea_core::Rational>]| -> Vec<Vec<Expr>> {
                v.iter().map(|x| x.iter().map(rexpr).collect()).collect()
            };
            ensure(span_equal(&lift(&ker), &lift(&ideal)), || {
                format!("{}/{} at {:?}: kernel {:?} ideal {:?}", key, fam.name, vals, ker, ideal)
            })?;
        }
    }
    Ok(())
}

fn backend_agree(closed: &Realization, series: &Realization, order: u32) -> Outcome {
    for (k, (a, b)) in closed.fields.iter().zip(&series.fields).enumerate() {
        for (j, (x, y)) in a.components.iter().zip(&b.components).enumerate() {
            let s = y.as_expr().ok_or("series component with a denominator")?;
            ensure(series_agrees(x, s, order), || format!("e{} d{}: {} vs {}", k + 1, j + 1, x, y))?;
        }
    }
    Ok(())
}

fn criterion_5() -> Outcome {
    for (key, c, fam) in all_pairs() {
        let closed = realize_transitive(&c, &fam).map_err(|e| format!("{}/{}: {}", key, fam.name, e))?;
        let series = realize_series(&c, &fam, 6).map_err(|e| format!("{}/{}: {}", key, fam.name, e))?;
        backend_agree(&closed, &series, 6).map_err(|m| format!("{}/{}: {}", key, fam.name, m))?;
    }
    Ok(())
}

/// Brute force: every sequence over Const, Fresh and Opaque-with-any-deps,
/// filtered for validity and normalized.
fn brute_force(s: usize, max_fresh: usize) -> BTreeSet<Vec<(SlotKind, usize)>> {
    let mut out = BTreeSet::new();
    let letters = 2 + (1usize << s);
    let total = letters.pow(s as u32);
    'outer: for mut code in 0..total {
        let mut fresh = 0;
        let mut seq = Vec::new();
        for _ in 0..s {
            let d = code % letters;
            code /= letters;
            match d {
                // after a fresh slot a constant is a special function of the used coordinates
                0 if fresh > 0 => seq.push((SlotKind::Opaque, fresh)),
                0 => seq.push((SlotKind::Const, 0)),
                1 => {
                    fresh += 1;
                    seq.push((SlotKind::Fresh, fresh));
                }
                mask => {
                    let mask = mask - 2;
                    if mask >> fresh != 0 {
                        continue 'outer;
                    }
                    if mask == 0 && fresh == 0 {
                        seq.push((SlotKind::Const, 0));
                    } else {
                        // a function of some used coordinates is a function of all of them
                        seq.push((SlotKind::Opaque, fresh));
                    }
                }
            }
        }
        if fresh <= max_fresh {
            out.insert(seq);
        }
    }
    out
}

fn shape(a: &ParamAssignment) -> Vec<(SlotKind, usize)> {
    let mut fresh = 0;
    a.kinds()
        .into_iter()
        .map(|k| match k {
            SlotKind::Fresh => {
                fresh += 1;
                (k, fresh)
            }
            SlotKind::Opaque => (k, fresh),
            SlotKind::Const => (k, 0),
        })
        .collect()
}

fn criterion_6() -> Outcome {
    let forms = enumerate_normal_forms(2, 2);
    let pats: Vec<String> = forms.iter().map(|a| a.pattern()).collect();
    ensure(pats == ["C,C", "C,F", "F,O", "F,F"], || format!("{:?}", pats))?;
    let e = catalog::get("g2.1+2g1").map_err(|e| e.to_string())?;
    let inn = catalog::render_table(&e, Table::Inn).map_err(|e| e.to_string())?;
    let h4: Vec<&str> = inn.lines().filter(|l| l.starts_with("h4")).map(|l| l.split(" : ").next().unwrap()).collect();
    ensure(h4 == ["h4^{a,b,0}", "h4^{a,b+x4,0}", "h4^{a+x4,b+f(x4),0}", "h4^{a+x4,b+x5,0}"], || format!("{:?}", h4))?;
    for s in 0..=3 {
        for max in 0..=s {
            let got: Vec<_> = enumerate_normal_forms(s, max).iter().map(shape).collect();
            let unique: BTreeSet<_> = got.iter().cloned().collect();
            ensure(unique.len() == got.len(), || format!("duplicates for s={} max={}", s, max))?;
            let oracle = brute_force(s, max);
            ensure(unique == oracle, || format!("s={} max={}: {} vs brute force {}", s, max, got.len(), oracle.len()))?;
        }
    }
    Ok(())
}

/// Mutation: add `delta` to component `j` of field `k`.
fn mutate(r: &Realization, k: usize, j: usize, delta: Expr) -> Realization {
    let mut out = r.clone();
    let c = &out.fields[k].components[j];
    out.fields[k].components[j] = c + &RatExpr::from_expr(delta);
    out
}

/// Mutation: flip the sign of the `t`-th term of the numerator.
fn flip(r: &Realization, k: usize, j: usize, t: usize) -> Realization {
    let c = &r.fields[k].components[j];
    let (key, coeff): (&TermKey, &Scalar) = c.num().terms().nth(t).expect("term exists");
    let term = Expr::term(key.clone(), coeff.clone());
    let delta = &Expr::int(-2) * &term;
    let mut out = r.clone();
    out.fields[k].components[j] = c + &RatExpr::new(delta, c.den().clone()).unwrap();
    out
}

fn criterion_7() -> Outcome {
    let mut g = rng(7);
    for n in 0..200 {
        let m = 1 + n % 3;
        let (x, y, z) = (random_field(&mut g, m), random_field(&mut g, m), random_field(&mut g, m));
        let f = q(random_poly(&mut g, m));
        let br = |a: &VectorField, b: &VectorField| lie_bracket(a, b).unwrap();
        let anti = add(&br(&x, &y), &br(&y, &x));
        ensure(anti.is_zero(), || format!("antisymmetry fails for {:?}", x))?;
        let jac = add(&add(&br(&x, &br(&y, &z)), &br(&y, &br(&z, &x))), &br(&z, &br(&x, &y)));
        ensure(jac.is_zero(), || "Jacobi fails".into())?;
        let lhs = br(&x, &mul(&f, &y));
        let rhs = add(&mul(&apply_field(&x, &f), &y), &mul(&f, &br(&x, &y)));
        ensure(lhs == rhs, || "Leibniz fails".into())?;
    }
    for (key, c, fam) in all_pairs() {
        let (_, fam) = is_subalgebra(&c, &fam).map_err(|e| e.to_string())?;
        let ab = adapted_basis(&c, &fam).map_err(|e| e.to_string())?;
        let om = build_omega_adapted(&c, &ab).map_err(|e| e.to_string())?;
        let n = c.dim();
        let coords: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for j in 0..n {
                let v = om.omega[(i, j)].at_zero(&coords).map_err(|e| e.to_string())?;
                let want = if i == j { RatExpr::one() } else { RatExpr::zero() };
                ensure(v == want, || format!("{}/{}: Omega(0)[{},{}] = {}", key, fam.name, i + 1, j + 1, v))?;
            }
        }
    }
    let real = |key: &str, sub: &str| {
        let e = catalog::get(key).unwrap();
        realize_transitive(&e.def.algebra, e.def.subalgebra(sub).unwrap()).unwrap()
    };
    let g21 = real("g2.1", "h_e2");
    let x = |i| Expr::coord(i);
    let mutants = vec![
        flip(&g21, 1, 0, 0),
        mutate(&g21, 0, 0, x(0)),
        mutate(&real("g3.1", "h3"), 2, 1, x(0)),
        flip(&real("g3.1", "h2"), 1, 0, 1),
        mutate(&real("sl2", "trivial"), 1, 0, Expr::int(1)),
        flip(&real("sl2", "borel"), 1, 0, 0),
        mutate(&real("e2", "h_rot"), 2, 1, x(1)),
        flip(&real("g2.1+2g1", "h2"), 1, 0, 0),
        mutate(&real("g2.1+2g1", "h4"), 2, 2, x(0)),
        mutate(&real("3g1", "trivial"), 0, 1, x(1)),
    ];
    for (i, m) in mutants.iter().enumerate() {
        let res = check_homomorphism(m).map_err(|e| e.to_string())?;
        ensure(!res.is_empty(), || format!("mutation {} survived", i + 1))?;
    }
    let res = check_homomorphism(&mutants[0]).map_err(|e| e.to_string())?;
    // [d1, -x1*d1] - d1 = -2*d1
    let want = VectorField::new(vec![RatExpr::from_expr(Expr::int(-2))]);
    ensure(res.len() == 1 && res[0].residual == want, || format!("g2.1 sign flip residual {:?}", res))?;
    Ok(())
}

fn criterion_8() -> Outcome {
    let e = catalog::get("e2").map_err(|e| e.to_string())?;
    let mut saw_trig = false;
    for fam in &e.def.subalgebras {
        let r = realize_transitive(&e.def.algebra, fam).map_err(|e| e.to_string())?;
        ensure(r.is_real(), || format!("{}: non-real component", fam.name))?;
        for f in &r.fields {
            for comp in &f.components {
                let text = comp.to_string();
                saw_trig |= text.contains("sin") || text.contains("cos");
                ensure(comp.conj() == *comp, || format!("{}: {} is not self-conjugate", fam.name, text))?;
                ensure(!text.contains('I') && !text.contains("i*"), || format!("{}: imaginary unit in {}", fam.name, text))?;
            }
        }
        let series = realize_series(&e.def.algebra, fam, 6).map_err(|e| e.to_string())?;
        backend_agree(&r, &series, 6).map_err(|m| format!("{}: {}", fam.name, m))?;
    }
    ensure(saw_trig, || "no trigonometric component in e2".into())?;
    Ok(())
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("1 g3.1 realizations", criterion_1),
        ("2 transitive table of g2.1+2g1", criterion_2),
        ("3 inn/strong/aut tables of g2.1+2g1", criterion_3),
        ("4 kernel equals largest contained ideal", criterion_4),
        ("5 closed form agrees with series to order 6", criterion_5),
        ("6 normal-form enumeration", criterion_6),
        ("7 bracket properties, Omega(0) = I, mutations", criterion_7),
        ("8 e2 closed form is real and matches series", criterion_8),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        let t = std::time::Instant::now();
        let out = f();
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(()) => println!("PASS criterion {} ({:.2}s)", name, secs),
            Err(msg) => {
                println!("FAIL criterion {} ({:.2}s): {}", name, secs, msg);
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {:?}", failed);
}
