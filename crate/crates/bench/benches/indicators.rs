use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use paretogap::{
    gap_report, hypervolume_2d, hypervolume_mc, hypervolume_nd, non_dominated_filter,
    ReferencePoint,
};
use paretogap_bench::{noisy_records, random_points, spherical_front};

fn hypervolume(c: &mut Criterion) {
    let mut group = c.benchmark_group("hypervolume");
    for n in [10, 100, 1000] {
        let front = spherical_front(n, 2, 1);
        group.bench_with_input(BenchmarkId::new("sweep_2d", n), &front, |b, f| {
            b.iter(|| hypervolume_2d(black_box(f), &ReferencePoint::unit(2)).unwrap())
        });
    }
    for (dim, n) in [(3, 20), (3, 100), (4, 20)] {
        let front = spherical_front(n, dim, 2);
        group.bench_with_input(
            BenchmarkId::new(format!("slicing_{dim}d"), n),
            &front,
            |b, f| b.iter(|| hypervolume_nd(black_box(f), &ReferencePoint::unit(dim)).unwrap()),
        );
    }
    let front = spherical_front(20, 2, 3);
    group.sample_size(10);
    group.bench_function("monte_carlo_2d_1e5", |b| {
        b.iter(|| {
            hypervolume_mc(
                black_box(&front),
                &ReferencePoint::unit(2),
                &[0.0, 0.0],
                100_000,
                7,
            )
            .unwrap()
        })
    });
    group.finish();
}

fn filtering(c: &mut Criterion) {
    let mut group = c.benchmark_group("non_dominated_filter");
    for n in [100, 300, 1000] {
        let points = random_points(n, 3, 4);
        group.bench_with_input(BenchmarkId::from_parameter(n), &points, |b, p| {
            b.iter(|| non_dominated_filter(black_box(p)).unwrap())
        });
    }
    group.finish();
}

fn protocol(c: &mut Criterion) {
    let mut group = c.benchmark_group("gap_report");
    for n in [50, 500] {
        let records = noisy_records(n, 2, 0.1, 5);
        group.bench_with_input(BenchmarkId::from_parameter(n), &records, |b, r| {
            b.iter(|| gap_report(black_box(r), &ReferencePoint::unit(2)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, hypervolume, filtering, protocol);
criterion_main!(benches);
