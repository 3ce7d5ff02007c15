//! Compares the rayon-backed kernels on a one-thread pool against the default
//! pool. Build with `--no-default-features` for the fully sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPoolBuilder;
use thetablock::blocks::NamedBlock;
use thetablock::hecke::apply_t_minus;
use thetablock::lifts::quotient_psi;
use thetablock::rational::int;

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        ("one-thread", ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("default", ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn kernels(c: &mut Criterion) {
    let theta = NamedBlock::L4.build(&int(8)).unwrap();
    let theta11 = NamedBlock::L4.build(&int(11)).unwrap();
    let mut g = c.benchmark_group("l4");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_with_input(BenchmarkId::new("build_block", name), &pool, |b, p| {
            b.iter(|| p.install(|| NamedBlock::L4.build(&int(8)).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("mul", name), &pool, |b, p| {
            b.iter(|| p.install(|| theta.mul(&theta).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("hecke_t3", name), &pool, |b, p| {
            b.iter(|| p.install(|| apply_t_minus(&theta, 3, 2).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("quotient_psi", name), &pool, |b, p| {
            b.iter(|| p.install(|| quotient_psi(&theta11, &int(5)).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
