use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use evtlab_core::exec::Execution;
use evtlab_core::presets;
use evtlab_core::simulator::{run_experiment_with, ExperimentPlan, Level};

fn orbits(c: &mut Criterion) {
    let (f, spec) = presets::nonperiodic_sqrt2().unwrap();
    let mut group = c.benchmark_group("run_experiment");
    group.sample_size(10);
    for orbits in [16usize, 128] {
        let plan = ExperimentPlan::new(20_000, Level::Tau(10.0), orbits, 1);
        for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, orbits), &plan, |b, plan| {
                b.iter(|| run_experiment_with(&f, &spec, plan, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, orbits);
criterion_main!(benches);
