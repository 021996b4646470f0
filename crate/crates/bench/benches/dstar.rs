use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use klball::{balance_exact, dstar, dstar_enumerate, monte_carlo, vajda_l, SimConfig};
use klball_bench::{one_heavy, zipf_like};

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("dstar_enumerate");
    group.sample_size(10);
    for k in [12, 16, 20] {
        let q = zipf_like(k);
        group.bench_with_input(BenchmarkId::from_parameter(k), &q, |b, q| {
            b.iter(|| dstar_enumerate(q, black_box(0.7)).unwrap())
        });
    }
    group.finish();
}

fn balance(c: &mut Criterion) {
    let mut group = c.benchmark_group("balance_exact");
    group.sample_size(10);
    for k in [12, 20] {
        let q = zipf_like(k);
        group.bench_with_input(BenchmarkId::from_parameter(k), &q, |b, q| {
            b.iter(|| balance_exact(q).unwrap())
        });
    }
    group.finish();
}

fn closed_form(c: &mut Criterion) {
    let q = one_heavy(10, 0.8);
    c.bench_function("dstar_closed_form_k10", |b| {
        b.iter(|| dstar(&q, black_box(0.3), false).unwrap())
    });
}

fn vajda(c: &mut Criterion) {
    c.bench_function("vajda_l", |b| b.iter(|| vajda_l(black_box(1.3)).unwrap()));
}

fn simulation(c: &mut Criterion) {
    let config = SimConfig::new(zipf_like(6), 200, 0.2, 10_000, 1).unwrap();
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.bench_function("k6_n200_10k", |b| b.iter(|| monte_carlo(black_box(&config))));
    group.finish();
}

criterion_group!(benches, enumeration, balance, closed_form, vajda, simulation);
criterion_main!(benches);
