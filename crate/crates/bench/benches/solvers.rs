use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use ultraslow_core::forward::ExperimentConfig;
use ultraslow_core::frac::distributed_derivative;
use ultraslow_core::inverse::ForwardModel;
use ultraslow_core::laplace::{invert_laplace, relaxation, ContourSpec};
use ultraslow_core::{TimeGrid, TimeSeries, WeightFunction};

fn talbot(c: &mut Criterion) {
    let contour = ContourSpec::default();
    c.bench_function("talbot 1/(s+1)", |b| {
        b.iter(|| invert_laplace(|s: Complex64| 1.0 / (s + 1.0), black_box(2.5), &contour).unwrap())
    });
}

fn relaxation_table(c: &mut Criterion) {
    let mu = WeightFunction::linear(0.5, 1.5).unwrap();
    let grid = TimeGrid::uniform(10.0, 200).unwrap();
    let contour = ContourSpec::default();
    c.bench_function("relaxation 200 steps", |b| {
        b.iter(|| relaxation(black_box(10.0), &mu, &grid, &contour).unwrap())
    });
}

fn derivative(c: &mut Criterion) {
    let mu = WeightFunction::raised_cosine(17, 0.5, 1.5, 0.2, 0.8).unwrap();
    let grid = TimeGrid::uniform(1.0, 400).unwrap();
    let v = TimeSeries::from_fn(&grid, |t| (3.0 * t).sin() + t * t);
    c.bench_function("distributed derivative 400 steps", |b| {
        b.iter(|| distributed_derivative(black_box(&v), &mu).unwrap())
    });
}

fn forward(c: &mut Criterion) {
    let mu = WeightFunction::linear(1.0, 1.5).unwrap();
    let exp = ExperimentConfig::interval_default().build().unwrap();
    c.bench_function("spectral forward 1-D", |b| b.iter(|| exp.solve(black_box(&mu)).unwrap()));
    c.bench_function("time-stepping oracle 1-D", |b| b.iter(|| exp.oracle(black_box(&mu)).unwrap()));
    let model = ForwardModel::new(&ExperimentConfig::interval_default()).unwrap();
    c.bench_function("observation model 1-D", |b| b.iter(|| model.observe(black_box(&mu)).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = talbot, relaxation_table, derivative, forward
}
criterion_main!(benches);
