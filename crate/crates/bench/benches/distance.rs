use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ftsdist_bench::{dense_model, half, lift_instance};
use ftsdist_core::lifting::lift;
use ftsdist_core::metric::{
    delta_core, fixpoint_discounted_approx, fixpoint_undiscounted, DistanceMatrix,
};
use ftsdist_core::rational::UnitRational;

fn bench_lift(c: &mut Criterion) {
    let mut group = c.benchmark_group("lift");
    for (states, support) in [(4, 3), (16, 4), (64, 6)] {
        let (d, mu, eta) = lift_instance(states, support, 42);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{states}states_support{support}")),
            &(d, mu, eta),
            |b, (d, mu, eta)| b.iter(|| lift(black_box(d), black_box(mu), black_box(eta))),
        );
    }
    group.finish();
}

fn bench_delta_core(c: &mut Criterion) {
    let mut group = c.benchmark_group("delta_core");
    group.sample_size(20);
    for states in [10, 30] {
        let m = dense_model(states, 2, 7);
        let bottom = DistanceMatrix::bottom(states);
        let first = delta_core(&m, &bottom);
        group.bench_with_input(
            BenchmarkId::new("from_bottom", states),
            &(&m, bottom.clone()),
            |b, (m, d)| b.iter(|| delta_core(black_box(m), black_box(d))),
        );
        group.bench_with_input(
            BenchmarkId::new("second_step", states),
            &(&m, first),
            |b, (m, d)| b.iter(|| delta_core(black_box(m), black_box(d))),
        );
    }
    group.finish();
}

fn bench_fixpoints(c: &mut Criterion) {
    let mut group = c.benchmark_group("fixpoint");
    group.sample_size(10);
    let m = dense_model(20, 2, 11);
    group.bench_function("undiscounted_20_states", |b| {
        b.iter(|| fixpoint_undiscounted(black_box(&m)))
    });
    let epsilon = UnitRational::from_u64(1, 1 << 20).unwrap();
    group.bench_function("discounted_20_states_eps_2^-20", |b| {
        b.iter(|| fixpoint_discounted_approx(black_box(&m), &half(), &epsilon).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_lift, bench_delta_core, bench_fixpoints);
criterion_main!(benches);
