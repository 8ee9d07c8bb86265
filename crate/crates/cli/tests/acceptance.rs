//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the report is always shown.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use phononflux::config::validate;
use phononflux::presets;
use phononflux_core::closedform::{
    equal_temp_array, fourier_scaling, two_osc_heatflows, two_osc_occupations, ScalingParams,
};
use phononflux_core::dynamics::{
    assemble_effective_two, assemble_full, energy_flows_full, evolve, lyapunov_residual, lyapunov_solve,
    occupations, Bath, RESIDUAL_TOLERANCE,
};
use phononflux_core::elimination::{collective_effective_bath, reduce_two_element};
use phononflux_core::model::transmissive_couplings;
use phononflux_core::{ArraySpec, CovarianceState, EffectiveTwoOscModel, ModeLayout};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    failures: Vec<String>,
    summary: String,
}

impl Verdict {
    fn new() -> Self {
        Verdict {
            failures: Vec::new(),
            summary: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, s: impl AsRef<str>) {
        if !self.summary.is_empty() {
            self.summary.push_str("; ");
        }
        self.summary.push_str(s.as_ref());
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn closed_form_vs_moment_equations(v: &mut Verdict) {
    let mut errs = Vec::new();
    for (omega, tol) in [(1e3, 2e-2), (1e4, 2e-3), (1e5, 2e-4)] {
        let m = EffectiveTwoOscModel::new(omega, 10.0, 1.0, 2.0, 10.0, 1.0, 0.0).unwrap();
        let closed = two_osc_occupations(&m).unwrap();
        let numeric = occupations(&lyapunov_solve(&assemble_effective_two(&m).unwrap()).unwrap()).unwrap();
        let err = rel(numeric[0], closed[0]).max(rel(numeric[1], closed[1]));
        v.check(err <= tol, format!("omega={omega:e}: error {err:.3e} > {tol:e}"));
        v.note(format!("omega={omega:e}: {err:.2e}"));
        errs.push(err);
    }
    // the deviation is a 1/ω correction, so it shrinks tenfold per decade
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        v.check((5.0..=20.0).contains(&ratio), format!("error ratio per decade {ratio:.2} is not ~10"));
    }
}

fn elimination_convergence(v: &mut Verdict) {
    let omega = 1.0;
    let mut errs = Vec::new();
    for g in [1e-3, 5e-4, 2.5e-4] {
        let spec = ArraySpec::two_element(omega, -omega, 0.05 * omega, 1e-6 * omega, 10.0, 1.0, g * omega)
            .validate()
            .unwrap();
        let closed = two_osc_occupations(&reduce_two_element(&spec).unwrap()).unwrap();
        let full = occupations(&lyapunov_solve(&assemble_full(&spec)).unwrap()).unwrap();
        errs.push(rel(full[0], closed[0]).max(rel(full[1], closed[1])));
    }
    v.check(errs.windows(2).all(|w| w[1] < w[0]), format!("errors {errs:?} not decreasing with g"));
    v.check(errs[2] < 0.05, format!("error {:.3e} at smallest g exceeds 5%", errs[2]));
    v.note(format!("errors {:.2e}, {:.2e}, {:.2e}", errs[0], errs[1], errs[2]));
}

fn fig2_structure(v: &mut Verdict) {
    let cfg = validate(presets::fig2(10)).unwrap();
    let out = phononflux::run(&cfg).unwrap();
    let table = |name: &str| out.tables.iter().find(|t| t.name == name).unwrap();
    let (j1, j2, jt) = (table("J1"), table("J2"), table("Jtotal"));
    assert_eq!(jt.columns[0], "gammabar_over_gamma");

    // (a) small γ̄: at Λ = 0 the cold element still loses heat only while
    // 3.5(γ̄/γ)² < 2γ̄/γ for n₁ = 10n₂, n̄ = 0, i.e. γ̄/γ < 4/7
    let small: Vec<usize> = (0..j2.rows.len()).filter(|&i| j2.rows[i][0] > 0.0 && j2.rows[i][0] <= 0.5).collect();
    v.check(!small.is_empty(), "no small-gamma_bar rows");
    for &i in &small {
        let row = &j2.rows[i][1..];
        let changes = row.iter().any(|&x| x > 0.0) && row.iter().any(|&x| x < 0.0);
        v.check(changes, format!("J2 keeps its sign at gamma_bar/gamma = {}", j2.rows[i][0]));
    }

    // (b) relative to the largest flow magnitude in the row
    let mut worst_var = 0.0f64;
    for i in 0..jt.rows.len() {
        let row = &jt.rows[i][1..];
        let max = row.iter().copied().fold(f64::MIN, f64::max);
        let min = row.iter().copied().fold(f64::MAX, f64::min);
        let scale = [&j1.rows[i][1..], &j2.rows[i][1..], row]
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |a, x| a.max(x.abs()));
        worst_var = worst_var.max((max - min) / scale);
    }
    v.check(worst_var <= 1e-12, format!("J1+J2 varies by {worst_var:.3e} along the Lambda axis"));

    // (c)
    let width = jt.columns.len();
    let mut monotone = true;
    for c in 1..width {
        monotone &= jt.rows.windows(2).all(|w| w[1][c] >= w[0][c]);
    }
    v.check(monotone, "J1+J2 decreases with gamma_bar somewhere");
    v.note(format!(
        "J2 sign change in {} small-gamma_bar rows; max Lambda variation {worst_var:.1e}; monotone in gamma_bar",
        small.len()
    ));
}

fn fourier_scaling_slopes(v: &mut Verdict) {
    let params = ScalingParams {
        omega: 1.0,
        gamma: 1.0,
        gamma_bar: 1.0,
        n: 1.0,
        n_common: 0.0,
    };
    let r = fourier_scaling(&[64, 128, 256, 512, 1024], &params).unwrap();
    let s = r.fitted_slopes;
    v.check((s.first + 3.0).abs() <= 0.05, format!("slope(J_1) = {}", s.first));
    v.check((s.quarter + 1.0).abs() <= 0.02, format!("slope(J_N/4) = {}", s.quarter));
    v.check((s.mean + 1.0).abs() <= 1e-10, format!("slope(J_mean) = {}", s.mean));
    let t0 = r.totals[0];
    let spread = r.totals.iter().map(|t| rel(*t, t0)).fold(0.0, f64::max);
    v.check(spread <= 1e-14, format!("J_m varies with N by {spread:e}"));
    v.note(format!(
        "slopes {:.4}, {:.4}, {:.12}; J_m spread {spread:.1e}",
        s.first, s.quarter, s.mean
    ));
}

fn full_energy_balance(v: &mut Verdict) {
    let g = transmissive_couplings(4, 1e-2).unwrap();
    let spec = ArraySpec::uniform(1.0, -1.0, 0.05, 1e-3, vec![10.0, 1.0, 4.0, 0.5], g)
        .validate()
        .unwrap();
    let model = assemble_full(&spec);
    let flows = energy_flows_full(&model, &lyapunov_solve(&model).unwrap());
    let sum: f64 = flows.iter().map(|f| f.flow).sum();
    let largest = flows.iter().map(|f| f.flow.abs()).fold(0.0, f64::max);
    let r = sum.abs() / largest;
    v.check(r <= 1e-10, format!("imbalance {r:e} of the largest flow"));
    v.note(format!("|sum|/max = {r:.1e} over {} baths", flows.len()));
}

fn random_full_spec(rng: &mut ChaCha8Rng) -> ArraySpec {
    // up to 8 modes: the cavity plus 1–7 elements, red-detuned so the drift is stable
    let n = rng.gen_range(1..=7);
    let omega = rng.gen_range(0.5..2.0);
    ArraySpec::uniform(
        omega,
        -omega * rng.gen_range(0.5..1.5),
        omega * rng.gen_range(0.05..1.0),
        omega * rng.gen_range(1e-4..1e-1),
        (0..n).map(|_| rng.gen_range(0.0..20.0)).collect(),
        (0..n).map(|_| omega * rng.gen_range(-0.03..0.03)).collect(),
    )
}

fn solver_bedrock(v: &mut Verdict) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let spec = random_full_spec(&mut rng).validate().unwrap();
        let model = assemble_full(&spec);
        let vss = lyapunov_solve(&model).unwrap();
        let bound = RESIDUAL_TOLERANCE * model.diffusion.abs().max().max(1.0);
        worst = worst.max(lyapunov_residual(&model.drift, &model.diffusion, &vss.matrix) / bound);
    }
    v.check(worst <= 1.0, format!("Lyapunov residual {worst:.2} x bound"));

    // an element whose coupling is negligible relaxes as n(1 − e^{−2γt})
    let (gamma, n) = (1e-2, 4.0);
    let spec = ArraySpec::uniform(1.0, -1.0, 0.5, gamma, vec![n], vec![1e-9]).validate().unwrap();
    let model = assemble_full(&spec);
    let traj = evolve(&model, &CovarianceState::vacuum(model.layout), 3.0 / gamma, 1e-3 / gamma).unwrap();
    let mut transient = 0.0f64;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let exact = n * (1.0 - (-2.0 * gamma * t).exp());
        transient = transient.max((occupations(s).unwrap()[0] - exact).abs());
    }
    v.check(transient <= 1e-6, format!("single-mode transient off by {transient:e}"));

    let m = EffectiveTwoOscModel::new(2.0, 0.5, 0.5, 0.3, 6.0, 1.0, 0.2).unwrap();
    let model = assemble_effective_two(&m).unwrap();
    let vss = lyapunov_solve(&model).unwrap();
    let traj = evolve(&model, &CovarianceState::vacuum(ModeLayout::Elements(2)), 20.0 / m.gamma, 0.01).unwrap();
    let relax = (&traj.last().matrix - &vss.matrix).abs().max();
    v.check(relax <= 1e-8, format!("evolve vs lyapunov_solve {relax:e}"));
    v.note(format!(
        "residual {worst:.1e} x bound; transient {transient:.1e}; relaxation {relax:.1e}"
    ));
}

fn equal_temperature_array(v: &mut Verdict) {
    let omega = 1.0;
    let g = transmissive_couplings(8, 1e-3 * omega).unwrap();
    let spec = ArraySpec::uniform(omega, -omega, 0.05 * omega, 1e-6 * omega, vec![5.0; 8], g.clone())
        .validate()
        .unwrap();
    let model = assemble_full(&spec);
    let flows = energy_flows_full(&model, &lyapunov_solve(&model).unwrap());
    let mut per_element = [0.0; 8];
    for f in &flows {
        if let Bath::Element(j) = f.bath {
            per_element[j] = f.flow;
        }
    }
    let normalised: Vec<f64> = per_element.iter().zip(&g).map(|(j, gj)| j / (gj * gj)).collect();
    let mean = normalised.iter().sum::<f64>() / 8.0;
    let max = normalised.iter().copied().fold(f64::MIN, f64::max);
    let min = normalised.iter().copied().fold(f64::MAX, f64::min);
    let spread = (max - min) / mean.abs();
    v.check(spread <= 0.03, format!("J_j/g_j^2 spread {spread:.3e}"));

    let (gamma_bar, n_common) = collective_effective_bath(&spec).unwrap();
    let closed = equal_temp_array(&spec, gamma_bar, n_common).unwrap();
    let mismatch = per_element
        .iter()
        .zip(&closed.flows)
        .map(|(a, b)| rel(*a, *b))
        .fold(0.0, f64::max);
    v.check(mismatch <= 0.05, format!("full vs closed form {mismatch:.3e}"));
    v.check(
        closed.total_mechanical + closed.cavity_flow == 0.0,
        "closed-form J_m + J_c is not exactly zero",
    );
    v.note(format!("spread {spread:.1e}; mismatch {mismatch:.1e}; J_m + J_c = 0"));
}

fn printed_flow_factor_two(v: &mut Verdict) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let m = EffectiveTwoOscModel::new(
            rng.gen_range(0.1..1e4),
            rng.gen_range(-100.0..100.0),
            rng.gen_range(1e-3..10.0),
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..100.0),
            rng.gen_range(0.0..100.0),
            rng.gen_range(0.0..10.0),
        )
        .unwrap();
        let r = two_osc_heatflows(&m).unwrap();
        // rounding scale of the individual terms
        let scale = 4.0 * m.omega * m.gamma * m.n1.max(m.n2).max(m.n_common).max(1.0);
        for j in 0..2 {
            worst = worst.max((r.as_printed[j] - 2.0 * r.flows[j]).abs() / scale);
        }
    }
    v.check(worst <= 1e-12, format!("as-printed/2 deviates by {worst:e}"));
    v.note(format!("1000 sets, worst deviation {worst:.1e} of term scale"));
}

fn main() -> ExitCode {
    type Criterion = (u8, &'static str, Option<Duration>, fn(&mut Verdict));
    let criteria: [Criterion; 8] = [
        (1, "closed form vs moment equations", Some(Duration::from_secs(1)), closed_form_vs_moment_equations),
        (2, "elimination convergence", Some(Duration::from_secs(5)), elimination_convergence),
        (3, "heat-flow map structure", Some(Duration::from_secs(1)), fig2_structure),
        (4, "Fourier scaling", Some(Duration::from_secs(1)), fourier_scaling_slopes),
        (5, "full-model energy balance", Some(Duration::from_secs(1)), full_energy_balance),
        (6, "solver bedrock", Some(Duration::from_secs(10)), solver_bedrock),
        (7, "equal-temperature array", None, equal_temperature_array),
        (8, "as-printed flow is twice the flow", None, printed_flow_factor_two),
    ];

    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let mut v = Verdict::new();
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| check(&mut v)));
        let elapsed = start.elapsed();
        if let Err(e) = outcome {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            v.failures.push(format!("panicked: {msg}"));
        }
        if let Some(b) = budget {
            v.check(elapsed <= b, format!("took {elapsed:.2?}, budget {b:?}"));
        }
        let status = if v.failures.is_empty() { "PASS" } else { "FAIL" };
        let detail = if v.failures.is_empty() { v.summary } else { v.failures.join("; ") };
        println!("{status} criterion {id} ({name}) [{elapsed:.2?}]: {detail}");
        if !v.failures.is_empty() {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 8 criteria failed");
        ExitCode::FAILURE
    }
}
