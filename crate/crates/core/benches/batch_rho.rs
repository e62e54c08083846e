//! Batch evaluation of the optimal value: rayon-backed `rho_batch` against the
//! sequential `rho_batch_seq`. With `--no-default-features` both run
//! sequentially, which gives the baseline for the parallel speedup.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hedgemap::solver::{rho_batch, rho_batch_seq};
use hedgemap::{AdmissibleTriple, Point3, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn points(n: usize) -> Vec<Point3> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    (0..n)
        .map(|_| Point3::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
        .collect()
}

fn batch(c: &mut Criterion) {
    let cfg = SolverConfig::default();
    let xs = points(256);
    let mut group = c.benchmark_group("rho_batch");
    group.sample_size(10);
    for (name, triple) in [("basic", AdmissibleTriple::basic_triple()), ("twisted", AdmissibleTriple::twisted_triple())] {
        group.bench_with_input(BenchmarkId::new("parallel", name), &xs, |b, xs| b.iter(|| rho_batch(black_box(xs), &triple, &cfg)));
        group.bench_with_input(BenchmarkId::new("sequential", name), &xs, |b, xs| {
            b.iter(|| rho_batch_seq(black_box(xs), &triple, &cfg))
        });
    }
    group.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
