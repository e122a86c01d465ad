use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use bnchaos::markov::{mixing_times_per_start, transition_matrix, MixingOptions};
use bnchaos::prng::ChaoticGenerator;
use bnchaos::search::{generate_and_test, generate_many, SearchParams};
use bnchaos::stats::{run_battery, TestParams};
use bnchaos::{builtins, is_chaotic, BooleanMap, Configuration, Execution, IterationGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const POLICIES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn mixing_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("mixing_sweep");
    group.sample_size(10);
    let builtin: Vec<_> = builtins::catalog_functions()
        .into_iter()
        .map(|(_, f)| transition_matrix(&IterationGraph::build(&f)))
        .collect();
    let large = generate_and_test(&SearchParams::new(9, 0.5, 3))
        .unwrap()
        .map;
    let large = transition_matrix(&IterationGraph::build(&large));
    for (name, execution) in POLICIES {
        let opts = MixingOptions {
            execution,
            ..MixingOptions::default()
        };
        group.bench_with_input(BenchmarkId::new("builtins", name), &opts, |b, opts| {
            b.iter(|| {
                for m in &builtin {
                    black_box(mixing_times_per_start(m, opts).unwrap());
                }
            })
        });
        group.bench_with_input(BenchmarkId::new("n9", name), &opts, |b, opts| {
            b.iter(|| black_box(mixing_times_per_start(&large, opts).unwrap()))
        });
    }
    group.finish();
}

fn batch_classification(c: &mut Criterion) {
    let mut group = c.benchmark_group("batch_is_chaotic");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let maps: Vec<BooleanMap> = (0..4096)
        .map(|_| {
            let n = 8;
            BooleanMap::new(
                n,
                (0..1u32 << n)
                    .map(|_| rng.random_range(0..1u32 << n))
                    .collect(),
            )
            .unwrap()
        })
        .collect();
    for (name, execution) in POLICIES {
        group.bench_function(name, |b| {
            b.iter(|| black_box(execution.map(&maps, is_chaotic)))
        });
    }
    group.finish();
}

fn seeded_searches(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate_many");
    group.sample_size(10);
    let params: Vec<_> = (0..64).map(|s| SearchParams::new(6, 0.7, s)).collect();
    for (name, execution) in POLICIES {
        group.bench_function(name, |b| {
            b.iter(|| black_box(generate_many(&params, execution)))
        });
    }
    group.finish();
}

fn test_battery(c: &mut Criterion) {
    let mut group = c.benchmark_group("battery");
    group.sample_size(10);
    let f = builtins::catalog_function(5).unwrap();
    let mut gen = ChaoticGenerator::new(f, 48, Configuration::new(4, 0).unwrap(), 1).unwrap();
    let bits = gen.bitstream(1_000_000);
    let params = TestParams::default();
    for (name, execution) in POLICIES {
        group.bench_function(name, |b| {
            b.iter(|| black_box(run_battery(&bits, 0.01, &params, execution)))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    mixing_sweep,
    batch_classification,
    seeded_searches,
    test_battery
);
criterion_main!(benches);
