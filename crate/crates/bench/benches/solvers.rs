use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use macrates::polymatroid::{maximize_concave, maximize_linear};
use macrates::{SolverOptions, ThroughputRegion};
use macrates_bench::{independent_fading, proportional_fair, random_region, random_weights};
use std::hint::black_box;

fn linear(c: &mut Criterion) {
    let mut g = c.benchmark_group("maximize_linear");
    for m in [2, 4, 8] {
        let region = random_region(m, 1);
        let w = random_weights(m, 1);
        g.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, _| {
            b.iter(|| maximize_linear(&region, black_box(&w)).unwrap())
        });
    }
    g.finish();
}

fn concave(c: &mut Criterion) {
    let mut g = c.benchmark_group("maximize_concave");
    let opts = SolverOptions::default();
    for m in [2, 3, 4] {
        let region = random_region(m, 2);
        let u = proportional_fair(m);
        g.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, _| {
            b.iter(|| maximize_concave(&region, &u, &opts).unwrap())
        });
    }
    g.finish();
}

fn throughput_region(c: &mut Criterion) {
    let mut g = c.benchmark_group("throughput_region");
    for m in [2, 3, 4] {
        let (mac, chains) = independent_fading(m);
        g.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, _| {
            b.iter(|| ThroughputRegion::new(&mac, black_box(&chains)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, linear, concave, throughput_region);
criterion_main!(benches);
