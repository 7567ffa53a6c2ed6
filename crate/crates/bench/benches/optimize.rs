use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use optchoice::{
    brute_force_search, fit_logistic, leave_one_lot_out, maximize_success_rate, success_rate,
    BruteForceConfig, BruteForceTrainer, LinearScorer, NelderMeadConfig, TrainConfig,
};
use optchoice_bench::{engine_dataset, noiseless_engine_dataset};

fn bench_success_rate(c: &mut Criterion) {
    let ds = engine_dataset();
    let scorer = LinearScorer::new(vec![5.0, 3.0, 2.0, 1.0]).unwrap();
    c.bench_function("success_rate/engine", |b| {
        b.iter(|| success_rate(black_box(&scorer), black_box(&ds)).unwrap())
    });
}

fn bench_brute_force(c: &mut Criterion) {
    let ds = noiseless_engine_dataset();
    for n in [3u32, 5] {
        let config = BruteForceConfig::new(n);
        c.bench_function(&format!("brute_force/engine_n{n}"), |b| {
            b.iter(|| brute_force_search(black_box(&ds), black_box(&config)).unwrap())
        });
    }
}

fn bench_nelder_mead(c: &mut Criterion) {
    let ds = noiseless_engine_dataset();
    let config = NelderMeadConfig::new(vec![vec![0.5, 0.5, 0.5, 0.5]]).unwrap();
    c.bench_function("nelder_mead/engine_single_start", |b| {
        b.iter(|| maximize_success_rate(black_box(&ds), black_box(&config)).unwrap())
    });
}

fn bench_logistic(c: &mut Criterion) {
    let ds = engine_dataset();
    let config = TrainConfig::new(0.5, 20, 0);
    c.bench_function("logistic/engine_20_epochs", |b| {
        b.iter(|| fit_logistic(black_box(&ds), black_box(&config)).unwrap())
    });
}

fn bench_leave_one_lot_out(c: &mut Criterion) {
    let ds = noiseless_engine_dataset();
    let trainer = BruteForceTrainer(BruteForceConfig::new(2));
    let mut group = c.benchmark_group("loo");
    group.sample_size(10);
    group.bench_function("bruteforce_n2/engine", |b| {
        b.iter(|| leave_one_lot_out(black_box(&trainer), black_box(&ds)).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_success_rate,
    bench_brute_force,
    bench_nelder_mead,
    bench_logistic,
    bench_leave_one_lot_out
);
criterion_main!(benches);
