//! Timings for instance construction, the distance scan, both canonicalizers
//! and the exact solvers.

use anonhard::abp::{build_3abp_instance, canonicalize_3abp, verify_distance_catalog};
use anonhard::ap8::{build_4ap8_instance, canonicalize_4ap8};
use anonhard::graphs::{exact_vertex_cover, random_cubic};
use anonhard::random::{random_instance, random_partition};
use anonhard::{exact_kap, Builtin};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("build");
    for n in [10, 40, 160] {
        let g = random_cubic(n, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        group.bench_with_input(BenchmarkId::new("3abp", n), &g, |b, g| {
            b.iter(|| build_3abp_instance(g))
        });
        group.bench_with_input(BenchmarkId::new("4ap8", n), &g, |b, g| {
            b.iter(|| build_4ap8_instance(g))
        });
    }
    group.finish();
}

fn distances(c: &mut Criterion) {
    let inst = build_3abp_instance(&Builtin::Petersen.graph());
    c.bench_function("distance catalog petersen", |b| {
        b.iter(|| verify_distance_catalog(&inst).unwrap())
    });
}

fn canonicalize(c: &mut Criterion) {
    let g = Builtin::Petersen.graph();
    let abp = build_3abp_instance(&g);
    let ap = build_4ap8_instance(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p3 = abp
        .instance()
        .normalize_cluster_sizes(&random_partition(abp.instance().len(), 3, 5, &mut rng))
        .unwrap();
    let p4 = ap
        .instance()
        .normalize_cluster_sizes(&random_partition(ap.instance().len(), 4, 7, &mut rng))
        .unwrap();
    c.bench_function("canonicalize 3abp petersen", |b| {
        b.iter(|| canonicalize_3abp(&abp, black_box(&p3)).unwrap())
    });
    c.bench_function("canonicalize 4ap8 petersen", |b| {
        b.iter(|| canonicalize_4ap8(&ap, black_box(&p4)).unwrap())
    });
}

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact");
    group.sample_size(10);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for rows in [10, 14] {
        let inst = random_instance(rows, 6, 2, 3, &mut rng);
        group.bench_with_input(BenchmarkId::new("kap", rows), &inst, |b, inst| {
            b.iter(|| exact_kap(inst, rows).unwrap())
        });
    }
    for n in [20, 40] {
        let g = random_cubic(n, &mut rng).unwrap();
        group.bench_with_input(BenchmarkId::new("vertex cover", n), &g, |b, g| {
            b.iter(|| exact_vertex_cover(g))
        });
    }
    group.finish();
}

criterion_group!(benches, construction, distances, canonicalize, solvers);
criterion_main!(benches);
