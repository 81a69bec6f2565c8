//! Benchmarks for the sweep driver and the single-run engine.
//!
//! The sweep group compares the data-parallel scheduler against a
//! single-threaded schedule of the same work. With the default `parallel`
//! feature both variants run through rayon — one on the default pool, one
//! pinned to a single worker — so the comparison isolates the scheduling
//! win. Built with `--no-default-features` the group instead measures the
//! sequential fallback path directly:
//!
//!     cargo bench
//!     cargo bench --no-default-features

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use vvmsim::driver::{run, sweep, SimConfig, SweepSpec};

fn bench_sweep(c: &mut Criterion) {
    let base = SimConfig::default();
    let spec = SweepSpec::default();
    let mut group = c.benchmark_group("sweep/default-grid");
    group.sample_size(10);

    #[cfg(feature = "parallel")]
    {
        group.bench_function("parallel", |b| {
            b.iter(|| sweep(black_box(&spec), black_box(&base)).unwrap())
        });
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .expect("single-thread pool builds");
        group.bench_function("single-thread", |b| {
            b.iter(|| single.install(|| sweep(black_box(&spec), black_box(&base)).unwrap()))
        });
    }

    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential-fallback", |b| {
        b.iter(|| sweep(black_box(&spec), black_box(&base)).unwrap())
    });

    group.finish();
}

fn bench_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("run");
    group.sample_size(20);
    let vm = SimConfig::default();
    group.bench_function("matmul64-vm", |b| {
        b.iter(|| run(black_box(&vm)).unwrap())
    });
    let bm = vm.baseline();
    group.bench_function("matmul64-bm", |b| {
        b.iter(|| run(black_box(&bm)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_sweep, bench_run);
criterion_main!(benches);
