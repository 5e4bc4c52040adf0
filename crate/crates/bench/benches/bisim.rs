use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ftsdist_bench::sparse_model;
use ftsdist_core::bisim::quotient;

fn bench_quotient(c: &mut Criterion) {
    let mut group = c.benchmark_group("quotient");
    group.sample_size(10);
    for states in [50, 200] {
        let m = sparse_model(states, 3, 23);
        group.bench_with_input(BenchmarkId::from_parameter(states), &m, |b, m| {
            b.iter(|| quotient(black_box(m)))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_quotient);
criterion_main!(benches);
