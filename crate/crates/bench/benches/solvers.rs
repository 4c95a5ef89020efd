use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sigev_bench::table3_game;
use sigev_core::numeric::{enumerate_pure_pbe, solve_mixed_pbe, verify_pbe, SolveOptions};
use sigev_core::sweep::{grid_of, sweep_prior};

fn bench_enumerate(c: &mut Criterion) {
    let spec = table3_game(0.6, Some((0.8, 0.5)));
    c.bench_function("enumerate_pure_pbe/table3_intermediate", |b| {
        b.iter(|| enumerate_pure_pbe(black_box(&spec)))
    });
}

fn bench_solve_mixed(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_mixed_pbe");
    let opts = SolveOptions::default();
    for p0 in [0.2, 0.5, 0.75, 0.9] {
        let spec = table3_game(p0, Some((0.8, 0.5)));
        group.bench_with_input(BenchmarkId::from_parameter(p0), &spec, |b, spec| {
            b.iter(|| solve_mixed_pbe(black_box(spec), &opts).unwrap())
        });
    }
    group.finish();
}

fn bench_verify(c: &mut Criterion) {
    let spec = table3_game(0.5, Some((0.8, 0.5)));
    let eq = solve_mixed_pbe(&spec, &SolveOptions::default()).unwrap().remove(0);
    c.bench_function("verify_pbe/mixed_equilibrium", |b| {
        b.iter(|| verify_pbe(black_box(&spec), black_box(&eq), 1e-9))
    });
}

fn bench_sweep(c: &mut Criterion) {
    let spec = table3_game(0.6, Some((0.8, 0.5)));
    let grid = grid_of(21);
    c.bench_function("sweep_prior/21_points_intermediate", |b| {
        b.iter(|| sweep_prior(black_box(&spec.payoffs), spec.detector.as_ref(), &grid).unwrap())
    });
}

criterion_group! {
    name = solvers;
    config = Criterion::default().sample_size(30);
    targets = bench_enumerate, bench_solve_mixed, bench_verify, bench_sweep
}
criterion_main!(solvers);
