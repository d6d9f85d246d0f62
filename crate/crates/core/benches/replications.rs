use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use bandit_arena::{run_replications, Execution, ExperimentConfig, Policy, ScenarioSpec, SeedRange};

fn replications(c: &mut Criterion) {
    let mut group = c.benchmark_group("replications");
    group.sample_size(10);
    let cases = [
        ("k10_n239", ScenarioSpec::flexible(10, 0.5, 0.2), 239),
        ("k24_n1000", ScenarioSpec::fixed(24, 0.5, 0.1), 1000),
    ];
    let seeds = SeedRange::new(1, 200);
    for (name, scenario, n) in cases {
        let config = ExperimentConfig::new(n, Policy::Wapts);
        for (mode, exec) in [("sequential", Execution::sequential()), ("parallel", Execution::default())] {
            group.bench_with_input(BenchmarkId::new(mode, name), &exec, |b, &exec| {
                b.iter(|| run_replications(&scenario, &config, &Policy::ALL, seeds, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, replications);
criterion_main!(benches);
