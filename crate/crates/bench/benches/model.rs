use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rach_bench::{load_grid, typical};
use rach_core::analytic::{chain_steady_state, solve_total_rate};
use rach_core::oracles::{chain_linear_solve, fixed_point_bisection};
use rach_core::SystemConfig;

fn fixed_point_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("fixed_point_sweep");
    for delta_rao in [1, 5] {
        let cfg = typical(delta_rao);
        let grid = load_grid();
        group.bench_with_input(BenchmarkId::new("picard", delta_rao), &cfg, |b, cfg| {
            b.iter(|| {
                for &li in &grid {
                    black_box(solve_total_rate(black_box(li), cfg).unwrap());
                }
            })
        });
        group.bench_with_input(BenchmarkId::new("bisection", delta_rao), &cfg, |b, cfg| {
            b.iter(|| {
                for &li in &grid[..20] {
                    black_box(fixed_point_bisection(black_box(li), cfg).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn chain_solution(c: &mut Criterion) {
    let mut group = c.benchmark_group("chain_steady_state");
    for (m, w_c) in [(1u32, 5u32), (9, 20)] {
        let cfg = SystemConfig { m, w_c, ..SystemConfig::default() };
        let id = format!("m{m}_w{w_c}");
        group.bench_function(BenchmarkId::new("closed_form", &id), |b| {
            b.iter(|| chain_steady_state(black_box(0.3), black_box(0.1), &cfg).unwrap())
        });
        group.bench_function(BenchmarkId::new("linear_solve", &id), |b| {
            b.iter(|| chain_linear_solve(black_box(0.3), black_box(0.1), m, w_c).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, fixed_point_sweep, chain_solution);
criterion_main!(benches);
