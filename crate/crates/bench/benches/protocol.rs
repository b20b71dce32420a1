use std::hint::black_box;

use cluster_sim_core::{bell_extraction, entanglement_entropy, reference_cluster, run_protocol};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_protocol(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_protocol");
    for n in [4, 6, 8, 10] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| run_protocol(black_box(n)).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("reference_cluster");
    for n in [4, 8, 10] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| reference_cluster(black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn bench_verify(c: &mut Criterion) {
    let s8 = run_protocol(8).unwrap();
    c.bench_function("entropy_half_cut_n8", |b| {
        b.iter(|| entanglement_entropy(black_box(&s8), &[1, 2, 3, 4]).unwrap())
    });
    let s6 = run_protocol(6).unwrap();
    c.bench_function("bell_extraction_n6", |b| {
        b.iter(|| bell_extraction(black_box(&s6)).unwrap())
    });
}

criterion_group!(benches, bench_protocol, bench_verify);
criterion_main!(benches);
