use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dioph_core::{CurvePoint, LongWeierstrass, Rational};

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn group_law(c: &mut Criterion) {
    let e = LongWeierstrass::short(q("0"), q("-161/27000")).unwrap();
    let p = CurvePoint::affine(q("643/90"), q("2578/135"));
    c.bench_function("double", |b| b.iter(|| e.double(black_box(&p)).unwrap()));
    c.bench_function("scalar_mul 8", |b| b.iter(|| e.scalar_mul(black_box(8), &p).unwrap()));

    let long = LongWeierstrass::new(q("26/3"), q("152/9"), q("136"), q("-204"), q("-10336/3")).unwrap();
    let g = CurvePoint::affine(q("-152/9"), q("280/27"));
    c.bench_function("long model scalar_mul 4", |b| b.iter(|| long.scalar_mul(black_box(4), &g).unwrap()));
}

fn search(c: &mut Criterion) {
    let e = LongWeierstrass::new(q("0"), q("107/3"), q("0"), q("1156/3"), q("3536/3")).unwrap();
    c.bench_function("naive_search 60x9", |b| b.iter(|| e.naive_search(black_box(60), 9)));
}

criterion_group!(benches, group_law, search);
criterion_main!(benches);
