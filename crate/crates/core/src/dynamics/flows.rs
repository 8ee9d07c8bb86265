use std::fmt;

use super::linear::{Bath, CovarianceState, LinearModel};
use crate::error::{Error, Result};

/// Occupations below this are treated as numerical noise around zero.
pub const NON_PHYSICAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    ClosedForm,
    /// Lyapunov steady state of the effective two-oscillator moment system.
    OdeSteady,
    /// Lyapunov steady state of the full cavity + elements model.
    LyapunovFull,
}

impl Solver {
    pub fn tag(self) -> &'static str {
        match self {
            Solver::ClosedForm => "closed-form",
            Solver::OdeSteady => "ode-steady",
            Solver::LyapunovFull => "lyapunov-full",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Steady-state occupations and heat flows of the mechanical elements.
///
/// Positive flow means heat entering the element from its bath.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatFlowReport {
    pub occupations: Vec<f64>,
    pub flows: Vec<f64>,
    pub total_mechanical: f64,
    pub cavity_flow: f64,
    pub solver: Solver,
}

impl HeatFlowReport {
    /// Builds a report from per-element values; `cavity_flow` defaults to
    /// −Σ J_l so that the mechanics and the cavity balance.
    pub fn new(occupations: Vec<f64>, flows: Vec<f64>, cavity_flow: Option<f64>, solver: Solver) -> Self {
        let total_mechanical: f64 = flows.iter().sum();
        HeatFlowReport {
            occupations,
            flows,
            total_mechanical,
            cavity_flow: cavity_flow.unwrap_or(-total_mechanical),
            solver,
        }
    }
}

/// n_j′ = (V_xx + V_pp − 1)/2 for every mechanical element.
pub fn occupations(v: &CovarianceState) -> Result<Vec<f64>> {
    (0..v.layout.n_elements())
        .map(|j| {
            let mode = v.layout.element_mode(j);
            let n = v.mode_occupation(mode);
            if n < -NON_PHYSICAL_TOLERANCE || !n.is_finite() {
                Err(Error::NonPhysical {
                    mode: j,
                    occupation: n,
                })
            } else {
                Ok(n)
            }
        })
        .collect()
}

/// Weak-coupling heat flows J_l = 2ωγ_l(n_l − n_l′). `baths` holds (γ_l, n_l)
/// per element.
pub fn heat_flows_weak(
    v: &CovarianceState,
    baths: &[(f64, f64)],
    omega: f64,
    solver: Solver,
) -> Result<HeatFlowReport> {
    let occ = occupations(v)?;
    if baths.len() != occ.len() {
        return Err(Error::InvalidSpec(format!(
            "{} baths given for {} elements",
            baths.len(),
            occ.len()
        )));
    }
    let flows = occ
        .iter()
        .zip(baths)
        .map(|(n_prime, &(gamma, n))| 2.0 * omega * gamma * (n - n_prime))
        .collect();
    Ok(HeatFlowReport::new(occ, flows, None, solver))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathFlow {
    pub bath: Bath,
    pub flow: f64,
}

/// Energy flow from each bath into the system,
/// ½·tr(H_m(A_l V + V A_lᵀ + D_l)), including the cavity bath.
pub fn energy_flows_full(model: &LinearModel, v: &CovarianceState) -> Vec<BathFlow> {
    let h = &model.hamiltonian_matrix;
    let v = &v.matrix;
    model
        .per_bath
        .iter()
        .map(|term| {
            let dv = &term.drift * v + v * term.drift.transpose() + &term.diffusion;
            BathFlow {
                bath: term.bath,
                flow: 0.5 * (h * dv).trace(),
            }
        })
        .collect()
}
