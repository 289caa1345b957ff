use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use cmbrauer::grossenchar::sample_psi;
use cmbrauer::localpadic::{kummer3_pipeline, tate_algorithm, FpFlag, RationalCurve};
use cmbrauer::matrixcert::certify;
use cmbrauer::quadfield::reduced_form_count;
use cmbrauer::Family;

fn arithmetic(c: &mut Criterion) {
    c.bench_function("reduced_form_count(-4 * 199^2)", |b| {
        b.iter(|| reduced_form_count(black_box(-4 * 199 * 199)))
    });
    let family = Family::j0(2).unwrap();
    c.bench_function("sample_psi j0 D=2 to 10^4", |b| {
        b.iter(|| sample_psi(&family, &[2, 3], black_box(10_000), 4))
    });
}

fn certificates(c: &mut Criterion) {
    let mut g = c.benchmark_group("certificates");
    g.sample_size(10);
    g.bench_function("certify(-4, 2, 4, 1)", |b| {
        b.iter(|| certify(black_box(-4), 2, 4, 1).unwrap())
    });
    g.bench_function("certify(-3, 3, 2, 1)", |b| {
        b.iter(|| certify(black_box(-3), 3, 2, 1).unwrap())
    });
    g.bench_function("kummer3 pipeline", |b| {
        b.iter(|| kummer3_pipeline(FpFlag::Auto).unwrap())
    });
    g.finish();
}

fn tate(c: &mut Criterion) {
    let e = RationalCurve::mordell(54).unwrap();
    c.bench_function("tate y^2 = x^3 + 54 at 3", |b| {
        b.iter(|| tate_algorithm(black_box(&e), 3).unwrap())
    });
}

criterion_group!(benches, arithmetic, certificates, tate);
criterion_main!(benches);
