use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fano_core::{effective, oracle, Execution, ModelParams};

fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| 5.0 + 10.0 * i as f64 / (n - 1) as f64).collect()
}

fn bench_sweeps(c: &mut Criterion) {
    let p = ModelParams { omega: 0.3, ..Default::default() };
    let modes = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

    let mut group = c.benchmark_group("effective_profile");
    let omegas = grid(20_000);
    for (name, exec) in modes {
        group.bench_function(name, |b| b.iter(|| effective::solve_profile(&p, &omegas, exec).unwrap()));
    }
    group.finish();

    let mut group = c.benchmark_group("oracle_profile");
    group.sample_size(10);
    let omegas = grid(16);
    let controls = oracle::OracleControls::Fixed { n: 201, half_width: 20.0 };
    for (name, exec) in modes {
        group.bench_with_input(BenchmarkId::new(name, omegas.len()), &omegas, |b, w| {
            b.iter(|| oracle::profile(&p, w, controls, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sweeps);
criterion_main!(benches);
