//! Brute-force search timings: the rayon-split search on the default
//! thread pool versus the same search confined to a single thread.
//! The sequential compile-time fallback (--no-default-features) follows
//! the same code path as the 1-thread pool.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use twistlab::field::FieldSpec;
use twistlab::oracle::brute_force_twisting_maps;

const SIZES: [(usize, usize, u64); 3] = [(2, 2, 2), (3, 2, 2), (2, 3, 2)];

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_force");
    group.sample_size(10);
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("pool");
    for (n, m, p) in SIZES {
        let field = FieldSpec::Prime(p);
        let label = format!("{n}x{m}_F{p}");
        group.bench_function(BenchmarkId::new("parallel", &label), |b| {
            b.iter(|| brute_force_twisting_maps(n, m, field).unwrap().len())
        });
        group.bench_function(BenchmarkId::new("sequential", &label), |b| {
            b.iter(|| single.install(|| brute_force_twisting_maps(n, m, field).unwrap().len()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_oracle);
criterion_main!(benches);
