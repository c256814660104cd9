use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use porous_ot::porosity::porosity_profile_with;
use porous_ot::rates::{geometric_grid, rate_scan_with};
use porous_ot::{CantorSpec, Execution};
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn rate_scans(c: &mut Criterion) {
    let spec = CantorSpec::constant(1.0 / 3.0, 12).unwrap();
    let mu = spec.measure(12).unwrap();
    let hs = geometric_grid(1e-1, 1e-5, 32).unwrap();
    let mut group = c.benchmark_group("rate_scan/triadic-12");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| rate_scan_with(exec, black_box(&mu), &hs, 1.0, 0.0).unwrap())
        });
    }
    group.finish();
}

fn porosity_profiles(c: &mut Criterion) {
    let spec = CantorSpec::harmonic(2.0, 10).unwrap();
    let set = spec.generation(10).unwrap();
    let scales: Vec<f64> = (1..=24).map(|k| 0.5f64.powi(k)).collect();
    let mut group = c.benchmark_group("porosity_profile/harmonic-10");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| porosity_profile_with(exec, black_box(&set), &scales).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, rate_scans, porosity_profiles);
criterion_main!(benches);
