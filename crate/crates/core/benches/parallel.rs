//! Compares the execution backends on the data-parallel kernels.
//!
//! Every group runs the same workload under [`Execution::Sequential`] and,
//! when the `parallel` feature is enabled, [`Execution::Parallel`], so the
//! rayon dispatch overhead and the multi-core speedup show up side by side
//! in the report:
//!
//! ```text
//! cargo bench -p tailrate-core --bench parallel
//! cargo bench -p tailrate-core --bench parallel --no-default-features
//! ```

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use tailrate_core::fitting::{scan_thresholds, threshold_grid};
use tailrate_core::simulate::{bootstrap_outage, count_outages, BootstrapSettings};
use tailrate_core::{ChannelKind, ChannelSpec, Execution};

/// Execution backends available under the current feature set.
fn backends() -> Vec<(&'static str, Execution)> {
    #[allow(unused_mut)]
    let mut list = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    list.push(("parallel", Execution::Parallel));
    list
}

/// Channel used by every benchmark: exponential body spliced onto a short
/// bounded GPD lower tail, so the workloads exercise the same deep-tail
/// shapes as the library's intended inputs.
fn spec(seed: u64) -> ChannelSpec {
    ChannelSpec {
        kind: ChannelKind::GpdSpliced {
            body_mean: 4.0,
            splice: 2.0,
            tail_scale: 0.5,
            tail_shape: -0.3,
            tail_mass: 0.05,
        },
        seed,
    }
}

/// Monte Carlo sample generation, chunked per the generator's unit size.
fn bench_generate(c: &mut Criterion) {
    const COUNT: usize = 200_000;
    let spec = spec(7);
    let mut group = c.benchmark_group("generate");
    group.throughput(Throughput::Elements(COUNT as u64));
    group.sample_size(10);
    for (name, execution) in backends() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &execution, |b, &ex| {
            b.iter(|| spec.generate_with(black_box(COUNT), ex).unwrap());
        });
    }
    group.finish();
}

/// Outage counting over a fixed trace, the inner loop of plan validation.
fn bench_count_outages(c: &mut Criterion) {
    const COUNT: usize = 1_000_000;
    let trace = spec(7).generate_with(COUNT, Execution::Sequential).unwrap();
    let samples = trace.samples();
    let mut group = c.benchmark_group("count_outages");
    group.throughput(Throughput::Elements(COUNT as u64));
    group.sample_size(20);
    for (name, execution) in backends() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &execution, |b, &ex| {
            b.iter(|| count_outages(black_box(1.0), samples, ex));
        });
    }
    group.finish();
}

/// Threshold scan: one tail refit per grid point.
fn bench_scan_thresholds(c: &mut Criterion) {
    const COUNT: usize = 100_000;
    let trace = spec(7).generate_with(COUNT, Execution::Sequential).unwrap();
    let samples = trace.samples();
    let grid = threshold_grid(samples, 12, 0.01, 0.25).unwrap();
    let mut group = c.benchmark_group("scan_thresholds");
    group.sample_size(10);
    for (name, execution) in backends() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &execution, |b, &ex| {
            b.iter(|| scan_thresholds(black_box(samples), &grid, 50, ex).unwrap());
        });
    }
    group.finish();
}

/// Bootstrap spread of the predicted outage: one resample + refit per
/// replicate.
fn bench_bootstrap_outage(c: &mut Criterion) {
    const COUNT: usize = 100_000;
    let trace = spec(7).generate_with(COUNT, Execution::Sequential).unwrap();
    let samples = trace.samples();
    let settings = BootstrapSettings {
        replicates: 16,
        training_size: 50_000,
        min_tail: 50,
        with_replacement: false,
        seed: 2024,
    };
    let mut group = c.benchmark_group("bootstrap_outage");
    group.sample_size(10);
    for (name, execution) in backends() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &execution, |b, &ex| {
            b.iter(|| bootstrap_outage(black_box(samples), 2.0, 1e-3, &settings, ex).unwrap());
        });
    }
    group.finish();
}

criterion_group!(
    backends_bench,
    bench_generate,
    bench_count_outages,
    bench_scan_thresholds,
    bench_bootstrap_outage
);
criterion_main!(backends_bench);
