use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use volbound_core::{implied_vol, simulate_paths, volswap_strike, zero_vanna, BsQuote, ConditionalSmile, SabrParams};

fn bench_black_scholes(c: &mut Criterion) {
    let q = BsQuote::new(0.0, 0.05, 0.5, 0.3);
    let price = q.call();
    c.bench_function("bs_call", |b| b.iter(|| black_box(q).call()));
    c.bench_function("implied_vol", |b| b.iter(|| implied_vol(black_box(price), 0.0, 0.05, 0.5)));
}

fn bench_monte_carlo(c: &mut Criterion) {
    let p = SabrParams::new(0.3, 1.0, 0.0, 0.0).unwrap();
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.bench_function("simulate_100k_x_128", |b| b.iter(|| simulate_paths(&p, 1.0, 128, 100_000, 7).unwrap()));
    let batch = simulate_paths(&p, 1.0, 128, 100_000, 7).unwrap();
    group.bench_function("volswap_100k", |b| b.iter(|| volswap_strike(black_box(&batch))));
    let smile = ConditionalSmile::new(&batch, -0.5).unwrap();
    group.bench_function("mixing_price_100k", |b| b.iter(|| smile.call_price(black_box(-0.04))));
    group.bench_function("zero_vanna_100k", |b| b.iter(|| zero_vanna(&batch, -0.5).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_black_scholes, bench_monte_carlo);
criterion_main!(benches);
