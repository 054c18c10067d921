use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dioph_core::corpus;
use dioph_core::Pipeline;

fn solve(c: &mut Criterion) {
    let fixtures = corpus::builtin().unwrap();
    for id in ["ex2.3", "ex2.8", "ex3.8"] {
        let f = fixtures.iter().find(|f| f.id == id).unwrap();
        let pipeline = Pipeline::new(f.problem.clone(), f.base_point.as_ref()).unwrap();
        let gen = f.generators[0].clone();
        c.bench_function(&format!("solve {id}"), |b| {
            b.iter(|| pipeline.solve_point(black_box(&gen), String::new()).unwrap())
        });
    }
}

fn multiples(c: &mut Criterion) {
    let fixtures = corpus::builtin().unwrap();
    let f = fixtures.iter().find(|f| f.id == "ex2.3").unwrap();
    let pipeline = Pipeline::new(f.problem.clone(), None).unwrap();
    c.bench_function("ex2.3 multiples 1..5", |b| b.iter(|| pipeline.multiples(&f.generators[0], 5, "gen").unwrap()));
}

fn full_corpus(c: &mut Criterion) {
    let fixtures = corpus::builtin().unwrap();
    let mut group = c.benchmark_group("corpus");
    group.sample_size(10);
    group.bench_function("run_all", |b| b.iter(|| corpus::run_all(black_box(&fixtures))));
    group.finish();
}

criterion_group!(benches, solve, multiples, full_corpus);
criterion_main!(benches);
