//! Sequential vs parallel sweep throughput on a fixed small corpus.

use criterion::{criterion_group, criterion_main, Criterion};
use quadcycles::search::{run_search, SearchConfig};

fn corpus(jobs: usize) -> SearchConfig {
    SearchConfig {
        d_values: vec![2, 3, 4],
        a_min: -200,
        a_max: 200,
        laws_enabled: true,
        jobs,
        max_iter: 1_000_000,
    }
}

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| run_search(&corpus(1)).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        b.iter(|| run_search(&corpus(num_cpus())).unwrap())
    });
    group.finish();
}

#[cfg(feature = "parallel")]
fn num_cpus() -> usize {
    std::thread::available_parallelism().map_or(4, |n| n.get())
}

criterion_group!(benches, bench_sweep);
criterion_main!(benches);
