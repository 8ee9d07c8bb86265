use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::linear::{CovarianceState, LinearModel};
use super::lyapunov::eigenvalues;
use crate::error::{Error, Result};

/// Divergence guard on ‖V‖_max.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CovarianceState>,
}

impl Trajectory {
    pub fn last(&self) -> &CovarianceState {
        self.states.last().expect("trajectory holds at least the initial state")
    }
}

/// 2π/(200·ω_max), where ω_max is the spectral radius of the drift.
pub fn default_dt(model: &LinearModel) -> f64 {
    let radius = eigenvalues(&model.drift)
        .map(|e| e.iter().map(|z| z.norm()).fold(0.0, f64::max))
        .unwrap_or_else(|_| model.drift.abs().max());
    if radius > 0.0 {
        2.0 * PI / (200.0 * radius)
    } else {
        1e-2
    }
}

/// Integrates V̇ = AV + VAᵀ + D with classical RK4 at a fixed step and records
/// every step. The last step is shortened to land on `t_final`.
pub fn evolve(
    model: &LinearModel,
    v0: &CovarianceState,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    evolve_sampled(model, v0, t_final, dt, 1)
}

/// As [`evolve`], recording every `stride`-th step plus the final state.
pub fn evolve_sampled(
    model: &LinearModel,
    v0: &CovarianceState,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidSpec("dt must be > 0".into()));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidSpec("t_final must be >= 0".into()));
    }
    if v0.layout != model.layout {
        return Err(Error::InvalidSpec(format!(
            "initial state layout {:?} does not match model layout {:?}",
            v0.layout, model.layout
        )));
    }
    let v0 = CovarianceState::new(v0.layout, v0.matrix.clone())?;
    let stride = stride.max(1);

    let a = &model.drift;
    let at = a.transpose();
    let d = &model.diffusion;
    let rhs = |v: &DMatrix<f64>| a * v + v * &at + d;

    let n_full = (t_final / dt).floor() as usize;
    let remainder = t_final - n_full as f64 * dt;
    let n_steps = n_full + usize::from(remainder > 1e-12 * dt);

    let mut times = vec![0.0];
    let mut states = vec![v0.clone()];
    let mut v = v0.matrix;
    let mut t = 0.0;
    for step in 1..=n_steps {
        let h = if step > n_full { remainder } else { dt };
        let k1 = rhs(&v);
        let k2 = rhs(&(&v + &k1 * (h / 2.0)));
        let k3 = rhs(&(&v + &k2 * (h / 2.0)));
        let k4 = rhs(&(&v + &k3 * h));
        v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        v = (&v + v.transpose()) * 0.5;
        t = if step > n_full { t_final } else { step as f64 * dt };

        let norm = v.abs().max();
        if !(norm <= DIVERGENCE_LIMIT) {
            return Err(Error::StepTooLarge { time: t, norm });
        }
        if step % stride == 0 || step == n_steps {
            times.push(t);
            states.push(CovarianceState {
                layout: model.layout,
                matrix: v.clone(),
            });
        }
    }
    debug_assert!(n_steps == 0 || t == t_final);
    Ok(Trajectory { times, states })
}
