use std::hint::black_box;

use coexist_core::sim::interference::{coupling_row, slot_trace, Radio, Receiver};
use coexist_core::sim::{run_measured, sample_realization, simulate_realization, Measure};
use coexist_core::{AnalyticalResult, ScenarioConfig, SimControls};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn desk(lambda: f64, beta: f64) -> ScenarioConfig {
    let mut c = ScenarioConfig::reference(lambda, beta);
    c.sim = SimControls::desk();
    c
}

fn analytics(c: &mut Criterion) {
    let config = desk(1e-3, 0.33);
    c.bench_function("analytical/evaluate", |b| b.iter(|| AnalyticalResult::evaluate(black_box(&config)).unwrap()));
}

fn traces(c: &mut Criterion) {
    let config = desk(1e-3, 0.33);
    let radio = Radio::from_config(&config).unwrap();
    let r = sample_realization(&config, 7).unwrap();
    let radar = r.radar_indices().next().unwrap();
    let rx = Receiver::radar(&r, &radio, radar);
    c.bench_function("interference/coupling_row", |b| {
        b.iter(|| coupling_row(black_box(&r), &radio, &rx, Some(radar)).unwrap())
    });
    let row = coupling_row(&r, &radio, &rx, Some(radar)).unwrap();
    c.bench_function("interference/slot_trace", |b| b.iter(|| slot_trace(black_box(&r), &row)));
}

fn realizations(c: &mut Criterion) {
    let mut group = c.benchmark_group("realization");
    group.sample_size(10);
    for beta in [0.0, 0.33, 1.0] {
        let config = desk(1e-3, beta);
        group.bench_with_input(BenchmarkId::new("desk", beta), &config, |b, config| {
            b.iter(|| simulate_realization(config, 11, Measure::ALL).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    let config = desk(1e-3, 0.33);
    group.bench_function("desk_20_realizations", |b| b.iter(|| run_measured(&config, Measure::ALL).unwrap()));
    group.finish();
}

criterion_group!(benches, analytics, traces, realizations, monte_carlo);
criterion_main!(benches);
