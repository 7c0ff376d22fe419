use criterion::{criterion_group, criterion_main, Criterion};
use lierea_core::catalog;
use lierea_core::regular::{complete_system, Mode};
use lierea_core::transitive::{realize_series, realize_transitive};
use lierea_core::verify;
use std::hint::black_box;

fn transitive(c: &mut Criterion) {
    let e = catalog::get("g2.1+2g1").unwrap();
    let h4 = e.def.subalgebra("h4").unwrap();
    c.bench_function("realize_transitive g2.1+2g1 h4", |b| {
        b.iter(|| realize_transitive(black_box(&e.def.algebra), h4).unwrap())
    });
    let sl2 = catalog::get("sl2").unwrap();
    let triv = sl2.def.subalgebra("trivial").unwrap();
    c.bench_function("realize_transitive sl2 trivial", |b| {
        b.iter(|| realize_transitive(black_box(&sl2.def.algebra), triv).unwrap())
    });
    c.bench_function("realize_series sl2 trivial order 6", |b| {
        b.iter(|| realize_series(black_box(&sl2.def.algebra), triv, 6).unwrap())
    });
    let r = realize_transitive(&e.def.algebra, h4).unwrap();
    c.bench_function("check_homomorphism g2.1+2g1 h4", |b| {
        b.iter(|| verify::check_homomorphism(black_box(&r)).unwrap())
    });
}

fn tables(c: &mut Criterion) {
    let e = catalog::get("g2.1+2g1").unwrap();
    let plan = e.plan.clone().unwrap();
    c.bench_function("complete_system inn", |b| {
        b.iter(|| complete_system(black_box(&e.def.algebra), &e.def.subalgebras, &plan, Mode::Inn).unwrap())
    });
}

criterion_group!(benches, transitive, tables);
criterion_main!(benches);
