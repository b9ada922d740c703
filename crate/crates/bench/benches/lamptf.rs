use criterion::{criterion_group, criterion_main, Criterion};
use lamptf::abel::default_w_grid;
use lamptf::phase::{default_seeds, AutonomousSystem};
use lamptf::{check_integrability, portrait, shoot, solve_bvp, SolveOptions, Window};
use std::hint::black_box;

fn bvp(c: &mut Criterion) {
    let opts = SolveOptions::default();
    c.bench_function("shoot p=1 slope=-1.5", |b| {
        b.iter(|| shoot(1.0, black_box(-1.5), 50.0, &opts).unwrap())
    });
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    group.bench_function("p=1 slope_tol=1e-8", |b| {
        let opts = SolveOptions::default().slope_tol(1e-8);
        b.iter(|| solve_bvp(black_box(1.0), &opts).unwrap())
    });
    group.finish();
}

fn abel(c: &mut Criterion) {
    let grid = default_w_grid();
    c.bench_function("integrability p=1", |b| {
        b.iter(|| check_integrability(black_box(1.0), &grid, 1e-8).unwrap())
    });
}

fn phase(c: &mut Criterion) {
    let sys = AutonomousSystem::thomas_fermi();
    let window = Window::new(-6.0, 2.0, -5.0, 4.0).unwrap();
    let seeds = default_seeds(&sys, &window).unwrap();
    c.bench_function("tf portrait", |b| {
        b.iter(|| portrait(&sys, &seeds, 4.0, &window).unwrap())
    });
}

criterion_group!(benches, bvp, abel, phase);
criterion_main!(benches);
