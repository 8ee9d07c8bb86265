//! Built-in cross-validation of the closed forms against the numerical
//! solvers, cheap enough to run on every install.
//!
//! Each check reports the worst measured deviation divided by its tolerance,
//! so a value ≤ 1 passes.

use phononflux_core::closedform::two_osc_occupations;
use phononflux_core::dynamics::{
    assemble_effective_two, assemble_full, energy_flows_full, evolve, lyapunov_residual, lyapunov_solve,
    occupations, RESIDUAL_TOLERANCE,
};
use phononflux_core::elimination::reduce_two_element;
use phononflux_core::model::transmissive_couplings;
use phononflux_core::{ArraySpec, CovarianceState, EffectiveTwoOscModel, ModeLayout, Result};

use crate::table::ResultTable;

/// Closed-form occupation function under test; swappable for fault injection.
pub type OccupationFn = dyn Fn(&EffectiveTwoOscModel) -> Result<[f64; 2]>;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub criterion: u8,
    pub name: &'static str,
    pub passed: bool,
    /// Worst deviation over tolerance.
    pub worst_ratio: f64,
    pub detail: String,
}

impl CheckResult {
    pub fn label(&self) -> String {
        format!("criterion {} ({})", self.criterion, self.name)
    }

    fn from_ratios(criterion: u8, name: &'static str, ratios: &[f64], extra_ok: bool, detail: String) -> Self {
        let worst = ratios.iter().copied().fold(0.0, f64::max);
        let finite = ratios.iter().all(|r| r.is_finite());
        CheckResult {
            criterion,
            name,
            passed: finite && extra_ok && worst <= 1.0,
            worst_ratio: if finite { worst } else { f64::INFINITY },
            detail,
        }
    }

    fn error(criterion: u8, name: &'static str, e: impl std::fmt::Display) -> Self {
        CheckResult {
            criterion,
            name,
            passed: false,
            worst_ratio: f64::INFINITY,
            detail: format!("solver error: {e}"),
        }
    }
}

pub fn run_selfcheck() -> Vec<CheckResult> {
    run_selfcheck_with(&two_osc_occupations)
}

pub fn run_selfcheck_with(occupations_fn: &OccupationFn) -> Vec<CheckResult> {
    vec![
        closed_form_vs_moments(occupations_fn),
        elimination_convergence(occupations_fn),
        energy_balance(),
        solver_bedrock(),
    ]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn closed_form_vs_moments(occ: &OccupationFn) -> CheckResult {
    const NAME: &str = "closed form vs moment equations";
    let run = || -> Result<(Vec<f64>, String)> {
        let mut ratios = Vec::new();
        let mut detail = Vec::new();
        for (omega, tol) in [(1e3, 2e-2), (1e4, 2e-3), (1e5, 2e-4)] {
            let m = EffectiveTwoOscModel::new(omega, 10.0, 1.0, 2.0, 10.0, 1.0, 0.0)?;
            let closed = occ(&m)?;
            let numeric = occupations(&lyapunov_solve(&assemble_effective_two(&m)?)?)?;
            let err = rel(closed[0], numeric[0]).max(rel(closed[1], numeric[1]));
            ratios.push(err / tol);
            detail.push(format!("omega={omega:e}: {err:.2e} (tol {tol:e})"));
        }
        Ok((ratios, detail.join("; ")))
    };
    match run() {
        Ok((r, d)) => CheckResult::from_ratios(1, NAME, &r, true, d),
        Err(e) => CheckResult::error(1, NAME, e),
    }
}

fn elimination_convergence(occ: &OccupationFn) -> CheckResult {
    const NAME: &str = "elimination convergence";
    let run = || -> Result<(Vec<f64>, String)> {
        let omega = 1.0;
        let mut errs = Vec::new();
        for g in [1e-3, 5e-4, 2.5e-4] {
            let spec = ArraySpec::two_element(omega, -omega, 0.05 * omega, 1e-6 * omega, 10.0, 1.0, g * omega)
                .validate()?;
            let closed = occ(&reduce_two_element(&spec)?)?;
            let full = occupations(&lyapunov_solve(&assemble_full(&spec))?)?;
            errs.push(rel(full[0], closed[0]).max(rel(full[1], closed[1])));
        }
        let shown: Vec<String> = errs.iter().map(|e| format!("{e:.2e}")).collect();
        Ok((errs, format!("errors {}", shown.join(", "))))
    };
    match run() {
        Ok((errs, d)) => {
            let monotone = errs.windows(2).all(|w| w[1] < w[0]);
            let detail = if monotone { d } else { format!("{d}; not decreasing with g") };
            CheckResult::from_ratios(2, NAME, &[errs[2] / 0.05], monotone, detail)
        }
        Err(e) => CheckResult::error(2, NAME, e),
    }
}

fn energy_balance() -> CheckResult {
    const NAME: &str = "full-model energy balance";
    let run = || -> Result<(f64, String)> {
        let g = transmissive_couplings(4, 1e-2)?;
        let spec = ArraySpec::uniform(1.0, -1.0, 0.05, 1e-3, vec![10.0, 1.0, 4.0, 0.5], g).validate()?;
        let model = assemble_full(&spec);
        let flows = energy_flows_full(&model, &lyapunov_solve(&model)?);
        let sum: f64 = flows.iter().map(|f| f.flow).sum();
        let largest = flows.iter().map(|f| f.flow.abs()).fold(0.0, f64::max);
        let ratio = sum.abs() / largest;
        Ok((ratio / 1e-10, format!("|sum|/max = {ratio:.2e} (tol 1e-10)")))
    };
    match run() {
        Ok((r, d)) => CheckResult::from_ratios(5, NAME, &[r], true, d),
        Err(e) => CheckResult::error(5, NAME, e),
    }
}

fn solver_bedrock() -> CheckResult {
    const NAME: &str = "solver bedrock";
    let run = || -> Result<(Vec<f64>, String)> {
        // 20 fixed, varied physical models with up to 8 modes
        let mut worst_residual = 0.0f64;
        for k in 0..20 {
            let n = 1 + k % 7;
            let x = k as f64 / 19.0;
            let n_bath = (0..n).map(|j| ((j * 7 + k) % 11) as f64).collect();
            let g = (0..n).map(|j| 0.02 * (1.0 + j as f64) / n as f64 * if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
            let spec = ArraySpec::uniform(1.0, -0.5 - x, 0.05 + 0.5 * x, 1e-3 + 0.05 * x, n_bath, g).validate()?;
            let model = assemble_full(&spec);
            let v = lyapunov_solve(&model)?;
            let bound = RESIDUAL_TOLERANCE * model.diffusion.abs().max().max(1.0);
            worst_residual = worst_residual.max(lyapunov_residual(&model.drift, &model.diffusion, &v.matrix) / bound);
        }

        // an element whose coupling is negligible relaxes as n(1 − e^{−2γt})
        let (gamma, n) = (1e-2, 4.0);
        let spec = ArraySpec::uniform(1.0, -1.0, 0.5, gamma, vec![n], vec![1e-9]).validate()?;
        let model = assemble_full(&spec);
        let traj = evolve(&model, &CovarianceState::vacuum(model.layout), 3.0 / gamma, 1e-3 / gamma)?;
        let mut transient = 0.0f64;
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let exact = n * (1.0 - (-2.0 * gamma * t).exp());
            transient = transient.max((occupations(s)?[0] - exact).abs());
        }

        let m = EffectiveTwoOscModel::new(2.0, 0.5, 0.5, 0.3, 6.0, 1.0, 0.2)?;
        let model = assemble_effective_two(&m)?;
        let vss = lyapunov_solve(&model)?;
        let traj = evolve(&model, &CovarianceState::vacuum(ModeLayout::Elements(2)), 20.0 / m.gamma, 0.01)?;
        let relax = (&traj.last().matrix - &vss.matrix).abs().max();

        Ok((
            vec![worst_residual, transient / 1e-6, relax / 1e-8],
            format!("residual/bound {worst_residual:.2e}; transient {transient:.2e}; relaxation {relax:.2e}"),
        ))
    };
    match run() {
        Ok((r, d)) => CheckResult::from_ratios(6, NAME, &r, true, d),
        Err(e) => CheckResult::error(6, NAME, e),
    }
}

pub fn report_table(results: &[CheckResult], config_hash: &str) -> ResultTable {
    let mut t = ResultTable::new("selfcheck", &["criterion", "passed", "worst_ratio"], config_hash)
        .with_solver("selfcheck");
    for r in results {
        // a failed solve has no finite ratio; record it as −1
        let ratio = if r.worst_ratio.is_finite() { r.worst_ratio } else { -1.0 };
        t.push_row(vec![r.criterion as f64, f64::from(u8::from(r.passed)), ratio]);
        t.meta.insert(format!("criterion_{}", r.criterion), format!("{}: {}", r.name, r.detail).into());
    }
    t
}
