use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use unitri::models::{ModelKind, Sampler};
use unitri::montecarlo::{run_batch_with, BatchOptions, Execution};

const N: usize = 200_000;

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample");
    group.throughput(Throughput::Elements(N as u64));
    group.sample_size(20);
    for model in ModelKind::ALL {
        for (label, execution) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel { workers: 0 }),
        ] {
            let opts = BatchOptions {
                sampler: Sampler::default(),
                execution,
            };
            group.bench_with_input(BenchmarkId::new(label, model.name()), &opts, |b, opts| {
                b.iter(|| run_batch_with(model, black_box(1729), N, opts).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sampling);
criterion_main!(benches);
