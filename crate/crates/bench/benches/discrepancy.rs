use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_bigint::BigInt;
use num_rational::BigRational;
use tmps::beatty::{discrepancy, discrepancy_f64, mean_discrepancy_profile};

fn bench_discrepancy(c: &mut Criterion) {
    let mut group = c.benchmark_group("discrepancy");
    // A golden-ratio convergent: worst-case-ish point spacing.
    let alpha = BigRational::new(BigInt::from(4181), BigInt::from(6765));
    group.bench_function("exact_n4096", |b| {
        b.iter(|| discrepancy(black_box(&alpha), 4096))
    });
    group.bench_function("float_n65536", |b| {
        b.iter(|| discrepancy_f64(black_box(0.6180339887498949), 65536))
    });
    group.bench_function("mean_profile_mu8_n256", |b| {
        b.iter(|| mean_discrepancy_profile(8, 256, None).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_discrepancy);
criterion_main!(benches);
