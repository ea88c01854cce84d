use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use tmps::fourier::{fourier_direct, fourier_recursive, CoeffBlock, ShiftProfile};

fn bench_fourier(c: &mut Criterion) {
    let r = 1u64 << 10;
    let block = CoeffBlock::new(vec![true, false, true], r).unwrap();
    let profile = ShiftProfile::new(vec![0, 1, 1], vec![2, 2, 3], r).unwrap();
    let coeffs = block.coeffs();
    let mut group = c.benchmark_group("fourier");
    group.sample_size(20);
    for lambda in [10u32, 14] {
        let d = (1u64 << lambda) - 3;
        group.bench_function(format!("direct_lambda{lambda}"), |b| {
            b.iter(|| fourier_direct(black_box(lambda), &profile, &coeffs, d).unwrap())
        });
        group.bench_function(format!("recursive_lambda{lambda}"), |b| {
            b.iter(|| fourier_recursive(black_box(lambda), &profile, &coeffs, d).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_fourier);
criterion_main!(benches);
