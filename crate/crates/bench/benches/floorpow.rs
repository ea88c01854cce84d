use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tmps::powerfloor::{floor_power, ExponentSpec};

fn bench_floor_power(c: &mut Criterion) {
    let rational = ExponentSpec::rational(7, 5).unwrap();
    let real = ExponentSpec::real("1.4").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let inputs: Vec<u64> = (0..256).map(|_| rng.gen_range(2..1_000_000_000_000u64)).collect();
    let mut group = c.benchmark_group("floor_power");
    group.bench_function("rational_root", |b| {
        b.iter(|| {
            inputs
                .iter()
                .map(|&n| floor_power(black_box(n), &rational).unwrap())
                .sum::<u128>()
        })
    });
    group.bench_function("interval_ladder", |b| {
        b.iter(|| {
            inputs
                .iter()
                .map(|&n| floor_power(black_box(n), &real).unwrap())
                .sum::<u128>()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_floor_power);
criterion_main!(benches);
