use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rach_bench::typical;
use rach_core::sim::{run, SimConfig};

const SUBFRAMES: u64 = 10_000;

fn subframes(c: &mut Criterion) {
    let mut group = c.benchmark_group("sim_subframes");
    group.throughput(Throughput::Elements(SUBFRAMES));
    group.sample_size(20);
    for (delta_rao, lambda) in [(5, 1.0), (5, 2.25), (1, 2.8)] {
        let cfg = SimConfig::new(typical(delta_rao), SUBFRAMES).with_seed(1);
        let id = format!("delta{delta_rao}_lambda{lambda}");
        group.bench_with_input(BenchmarkId::from_parameter(id), &lambda, |b, &lambda| {
            b.iter(|| run(black_box(&cfg), lambda).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, subframes);
criterion_main!(benches);
