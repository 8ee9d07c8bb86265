use criterion::{black_box, criterion_group, criterion_main, Criterion};
use phononflux::{config, presets, run};
use phononflux_core::closedform::{fourier_scaling, ScalingParams};
use phononflux_core::dynamics::{assemble_full, lyapunov_solve};
use phononflux_core::ArraySpec;

fn lyapunov_full(c: &mut Criterion) {
    for n in [2, 8, 32] {
        let spec = ArraySpec::uniform(1.0, -1.0, 0.05, 1e-3, vec![5.0; n], vec![1e-2 / (n as f64).sqrt(); n])
            .validate()
            .unwrap();
        let model = assemble_full(&spec);
        c.bench_function(&format!("lyapunov_full_n{n}"), |b| b.iter(|| lyapunov_solve(black_box(&model)).unwrap()));
    }
}

fn fig2_grid(c: &mut Criterion) {
    let cfg = config::validate(presets::fig2(10)).unwrap();
    c.bench_function("fig2_closed_form_81x81", |b| b.iter(|| run(black_box(&cfg)).unwrap()));
}

fn scaling(c: &mut Criterion) {
    let params = ScalingParams {
        omega: 1.0,
        gamma: 1.0,
        gamma_bar: 1.0,
        n: 1.0,
        n_common: 0.0,
    };
    let sizes: Vec<usize> = (4..=10).map(|k| 1 << k).collect();
    c.bench_function("fourier_scaling_16_to_1024", |b| b.iter(|| fourier_scaling(black_box(&sizes), &params).unwrap()));
}

criterion_group!(benches, lyapunov_full, fig2_grid, scaling);
criterion_main!(benches);
