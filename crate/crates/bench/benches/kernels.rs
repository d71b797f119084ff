use std::hint::black_box;
use std::sync::Arc;

use choquard_core::bubble::bubble_radial;
use choquard_core::constants::critical_exponents;
use choquard_core::riesz::{angular_kernel, riesz_radial};
use choquard_core::solver::solve_from_ansatz;
use choquard_core::{QuadSpec, RadialField, RadialGrid, SolverConfig};
use criterion::{criterion_group, criterion_main, Criterion};

fn kernel(c: &mut Criterion) {
    c.bench_function("angular_kernel near diagonal", |b| {
        b.iter(|| angular_kernel(5, 0.5, black_box(1.0), black_box(1.0 + 1e-6)).unwrap())
    });
    c.bench_function("angular_kernel far", |b| {
        b.iter(|| angular_kernel(5, 0.5, black_box(0.1), black_box(3.0)).unwrap())
    });
}

fn potential(c: &mut Criterion) {
    let mut g = c.benchmark_group("riesz_radial");
    g.sample_size(10);
    for n in [64, 128] {
        let grid = Arc::new(RadialGrid::free_space(5, 1e-3, 100.0, n).unwrap());
        let f = RadialField::from_fn(grid, |r| bubble_radial(5, 1.0, r).powf(19.0 / 6.0)).unwrap();
        let q = QuadSpec { radial_nodes: n, ..QuadSpec::default() };
        g.bench_function(format!("{n} nodes"), |b| b.iter(|| riesz_radial(black_box(&f), 0.5, &q).unwrap()));
    }
    g.finish();
}

fn newton(c: &mut Criterion) {
    let p = critical_exponents(5, 0.5).unwrap();
    let cfg = SolverConfig { quad: QuadSpec { radial_nodes: 128, ..QuadSpec::default() }, ..SolverConfig::default() };
    let mut g = c.benchmark_group("newton");
    g.sample_size(10);
    g.bench_function("eps 0.05, 128 nodes", |b| b.iter(|| solve_from_ansatz(black_box(0.05), &p, None, &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, kernel, potential, newton);
criterion_main!(benches);
