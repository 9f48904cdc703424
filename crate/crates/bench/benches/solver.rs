use std::hint::black_box;

use backscatter_bench::scenario_batch;
use backscatter_core::{
    calibrated_paper_defaults, optimal_alpha_closed_form, optimal_alpha_numeric, run_sweep, simulate,
    IdleDistribution, SweepParam, SweepSpec,
};
use criterion::{criterion_group, criterion_main, Criterion};

fn optimizers(c: &mut Criterion) {
    let batch = scenario_batch(256, 17);
    c.bench_function("closed_form_256", |b| {
        b.iter(|| {
            for s in &batch {
                black_box(optimal_alpha_closed_form(black_box(s)).unwrap());
            }
        })
    });
    c.bench_function("golden_section_256", |b| {
        b.iter(|| {
            for s in &batch {
                black_box(optimal_alpha_numeric(black_box(s), 1e-10).unwrap());
            }
        })
    });
}

fn sweeps(c: &mut Criterion) {
    let base = calibrated_paper_defaults().unwrap();
    let spec = SweepSpec {
        param: SweepParam::IdleRatio,
        from: 0.1,
        to: 0.9,
        steps: 161,
        base,
    };
    c.bench_function("beta_sweep_161", |b| b.iter(|| black_box(run_sweep(&spec).unwrap())));
}

fn monte_carlo(c: &mut Criterion) {
    let base = calibrated_paper_defaults().unwrap();
    let dist = IdleDistribution::BetaLaw { a: 3.0, b: 7.0 };
    let mut group = c.benchmark_group("simulate");
    group.sample_size(20);
    group.bench_function("beta_law_100k", |b| {
        b.iter(|| black_box(simulate(0.41125, &base, &dist, 100_000, 1).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, optimizers, sweeps, monte_carlo);
criterion_main!(benches);
