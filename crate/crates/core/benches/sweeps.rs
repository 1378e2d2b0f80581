use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use elemfac::factor::{factor_constant, holo_grid_residual, GridPairing, HoloVariant};
use elemfac::par::map_indices;
use elemfac::sample::{random_sl2, rng_for};
use elemfac::submersion::check_lemma_submersive;
use elemfac::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn lemma(c: &mut Criterion) {
    let mut g = c.benchmark_group("lemma_check_n6_200");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| check_lemma_submersive(6, black_box(200), 1, exec).unwrap())
        });
    }
    g.finish();
}

fn cohn_grid(c: &mut Criterion) {
    let mut g = c.benchmark_group("cohn_grid_41");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| holo_grid_residual(black_box(41), 2.0, GridPairing::Sweeps, HoloVariant::Derived, exec).unwrap())
        });
    }
    g.finish();
}

fn constants(c: &mut Criterion) {
    let mut g = c.benchmark_group("factor_constant_1000");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                map_indices(black_box(1000), exec, |i| factor_constant(&random_sl2(&mut rng_for(3, i))).unwrap().factor_count)
            })
        });
    }
    g.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = lemma, cohn_grid, constants
}
criterion_main!(benches);
