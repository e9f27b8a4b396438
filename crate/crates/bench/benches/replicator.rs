use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use oa_replicator::{
    estimate_period, integrate, payoff_matrices, HamiltonianSystem, Method, OpenAccessParameters,
    Portrait, PortraitOptions, ReducedConstants, State,
};

fn example() -> ReducedConstants {
    ReducedConstants::new(1.0, 2.0, 2.0, 3.0).unwrap()
}

fn integrators(c: &mut Criterion) {
    let k = example();
    let s0 = State::new(0.5, 0.5).unwrap();
    let mut group = c.benchmark_group("integrate_t20_dt1e-3");
    for method in [Method::Rk4, Method::LeapfrogLogit] {
        group.bench_with_input(BenchmarkId::from_parameter(method), &method, |b, &m| {
            b.iter(|| integrate(&k, black_box(s0), 20.0, 1e-3, m).unwrap())
        });
    }
    group.finish();
}

fn period(c: &mut Criterion) {
    let k = example();
    let s0 = State::new(0.5, 0.5).unwrap();
    c.bench_function("estimate_period_dt1e-3", |b| {
        b.iter(|| estimate_period(&k, black_box(s0), 1e-3).unwrap())
    });
}

fn level_curves(c: &mut Criterion) {
    let sys = HamiltonianSystem::new(example());
    let level = sys.max_energy() - 2.0;
    c.bench_function("level_curve_256", |b| {
        b.iter(|| sys.level_curve(black_box(level), 256).unwrap())
    });
    c.bench_function("portrait_default", |b| {
        b.iter(|| Portrait::build(&sys, &PortraitOptions::default()).unwrap().to_svg(&sys))
    });
}

fn game_layer(c: &mut Criterion) {
    let params = OpenAccessParameters::from_array([10.0, 2.0, 5.0, 1.0, 2.0, 3.0, 8.0]);
    c.bench_function("payoffs_and_mixed_nash", |b| {
        b.iter(|| payoff_matrices(black_box(&params)).unwrap().mixed_nash().unwrap())
    });
}

criterion_group!(benches, integrators, period, level_curves, game_layer);
criterion_main!(benches);
