use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use tuplerc::harness::rc_table;
use tuplerc::{Fuel, HarnessConfig};
use tuplerc_bench::{corrected, d_add, d_add_term, main_term};

fn normalize(c: &mut Criterion) {
    let (spec, _) = d_add();
    let trs = spec.trs();
    let mut group = c.benchmark_group("normalize");
    for k in [4, 16, 64] {
        let t = d_add_term(&spec, k);
        group.bench_with_input(BenchmarkId::from_parameter(k), &t, |b, t| {
            b.iter(|| trs.normalize(black_box(t), 1_000_000).unwrap())
        });
    }
    group.finish();
}

fn derivation_height(c: &mut Criterion) {
    let (spec, _) = corrected();
    let trs = spec.trs();
    let mut group = c.benchmark_group("dh");
    for len in [2, 4, 8] {
        let t = main_term(&spec, 2, len);
        group.bench_with_input(BenchmarkId::from_parameter(len), &t, |b, t| {
            b.iter(|| trs.derivation_height(black_box(t), Fuel::default()).unwrap())
        });
    }
    group.finish();
}

fn runtime_complexity(c: &mut Criterion) {
    let (spec, _) = d_add();
    let trs = spec.trs();
    let cfg = HarnessConfig::default();
    c.bench_function("rc d/add n=8", |b| {
        b.iter(|| rc_table(&trs, black_box(8), &cfg).unwrap())
    });
}

criterion_group!(benches, normalize, derivation_height, runtime_complexity);
criterion_main!(benches);
