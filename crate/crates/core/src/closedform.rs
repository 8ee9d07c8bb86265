//! Analytic steady states: two oscillators with independent and common baths,
//! their limiting regimes, equal-temperature arrays and size scaling.
//!
//! Heat flows follow J_j = 2ωγ(n_j − n_j′). The alternative two-oscillator
//! display with a 4ωγ prefactor is evaluated alongside for comparison only; it
//! is exactly twice the primary value.

use crate::dynamics::{HeatFlowReport, Solver};
use crate::error::{Error, Result};
use crate::model::{transmissive_couplings, EffectiveTwoOscModel, ValidatedSpec};

struct TwoOscTerms {
    /// (2γ n_j + γ̄ n̄)/(2γ + γ̄) for each j
    local: [f64; 2],
    /// γ̄²/(2(2γ+γ̄)(γ+γ̄)) · ((n₁+n₂)/2 − n̄)
    common: f64,
    /// 2γΛ²/((2γ+γ̄)[(2γ+γ̄)² + Λ²]) · (n₁−n₂)/2
    exchange: f64,
}

fn two_osc_terms(m: &EffectiveTwoOscModel) -> Result<TwoOscTerms> {
    let (g, gb, l) = (m.gamma, m.gamma_bar, m.lambda_coupling);
    let total = 2.0 * g + gb;
    if !(total > 0.0) {
        return Err(Error::DegenerateDamping);
    }
    let mean = (m.n1 + m.n2) / 2.0;
    Ok(TwoOscTerms {
        local: [
            (2.0 * g * m.n1 + gb * m.n_common) / total,
            (2.0 * g * m.n2 + gb * m.n_common) / total,
        ],
        common: gb * gb / (2.0 * total * (g + gb)) * (mean - m.n_common),
        exchange: 2.0 * g * l * l / (total * (total * total + l * l)) * (m.n1 - m.n2) / 2.0,
    })
}

/// Steady-state occupations (n₁′, n₂′) of the two oscillators.
pub fn two_osc_occupations(m: &EffectiveTwoOscModel) -> Result<[f64; 2]> {
    let t = two_osc_terms(m)?;
    Ok([
        t.local[0] + t.common - t.exchange,
        t.local[1] + t.common + t.exchange,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoOscHeatFlows {
    pub occupations: [f64; 2],
    /// J_j = 2ωγ(n_j − n_j′)
    pub flows: [f64; 2],
    /// The 4ωγ-prefactor display, kept to document the factor-2 offset.
    pub as_printed: [f64; 2],
}

impl TwoOscHeatFlows {
    pub fn total(&self) -> f64 {
        self.flows[0] + self.flows[1]
    }

    pub fn to_report(&self) -> HeatFlowReport {
        HeatFlowReport::new(self.occupations.to_vec(), self.flows.to_vec(), None, Solver::ClosedForm)
    }
}

pub fn two_osc_heatflows(m: &EffectiveTwoOscModel) -> Result<TwoOscHeatFlows> {
    let occupations = two_osc_occupations(m)?;
    let baths = m.bath_occupations();
    let flows = [0, 1].map(|j| 2.0 * m.omega * m.gamma * (baths[j] - occupations[j]));
    Ok(TwoOscHeatFlows {
        occupations,
        flows,
        as_printed: two_osc_heatflows_as_printed(m)?,
    })
}

/// J_j = 4ωγ{ γ̄/(2γ+γ̄)(n_j − n̄) + γ̄²/(2(2γ+γ̄)(γ+γ̄))(n̄ − (n₁+n₂)/2)
///           − (−1)^j γΛ²/((2γ+γ̄)[(2γ+γ̄)²+Λ²])(n₁ − n₂) }
fn two_osc_heatflows_as_printed(m: &EffectiveTwoOscModel) -> Result<[f64; 2]> {
    let (g, gb, l) = (m.gamma, m.gamma_bar, m.lambda_coupling);
    let total = 2.0 * g + gb;
    if !(total > 0.0) {
        return Err(Error::DegenerateDamping);
    }
    let mean = (m.n1 + m.n2) / 2.0;
    let common = gb * gb / (2.0 * total * (g + gb)) * (m.n_common - mean);
    let exchange = g * l * l / (total * (total * total + l * l)) * (m.n1 - m.n2);
    let baths = m.bath_occupations();
    Ok([
        4.0 * m.omega * g * (gb / total * (baths[0] - m.n_common) + common + exchange),
        4.0 * m.omega * g * (gb / total * (baths[1] - m.n_common) + common - exchange),
    ])
}

/// Occupations in the large-Λ regime and its two sub-limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitOccupations {
    /// Λ ≫ γ, γ̄: (2γ+γ̄)/(2(γ+γ̄))·(n₁+n₂)/2 + γ̄/(2(γ+γ̄))·n̄
    pub large_coupling: f64,
    /// additionally γ ≫ γ̄: mean of the independent baths
    pub independent_dominated: f64,
    /// common bath dominant: n̄/2 + (n₁+n₂)/4
    pub common_dominated: f64,
}

pub fn two_osc_limits(m: &EffectiveTwoOscModel) -> Result<LimitOccupations> {
    let (g, gb) = (m.gamma, m.gamma_bar);
    if !(g + gb > 0.0) {
        return Err(Error::DegenerateDamping);
    }
    let mean = (m.n1 + m.n2) / 2.0;
    Ok(LimitOccupations {
        large_coupling: (2.0 * g + gb) / (2.0 * (g + gb)) * mean + gb / (2.0 * (g + gb)) * m.n_common,
        independent_dominated: mean,
        common_dominated: m.n_common / 2.0 + (m.n1 + m.n2) / 4.0,
    })
}

/// Equal-temperature array: every element has rate γ and bath occupation n,
/// and the collective mode sees an extra bath (γ̄, n̄).
///
/// n_j′ = n + (g_j²/g²)·η·(n̄ − n), J_j = 2ωγ(g_j²/g²)·η·(n − n̄) with
/// η = γ̄/(γ+γ̄). The reported total is J_m = 2ωγη(n − n̄) and the cavity flow
/// is −J_m.
pub fn equal_temp_array(spec: &ValidatedSpec, gamma_bar: f64, n_common: f64) -> Result<HeatFlowReport> {
    let n = spec.n_bath[0];
    if let Some(j) = spec.n_bath.iter().position(|&x| x != n) {
        return Err(Error::UnequalTemperatures(format!(
            "n_bath[{j}] = {} differs from n_bath[0] = {n}",
            spec.n_bath[j]
        )));
    }
    let gamma = spec.gamma[0];
    if let Some(j) = spec.gamma.iter().position(|&x| x != gamma) {
        return Err(Error::AsymmetricArray(format!(
            "gamma[{j}] = {} differs from gamma[0] = {gamma}",
            spec.gamma[j]
        )));
    }
    equal_temp_flows(spec.omega, gamma, n, gamma_bar, n_common, &spec.g)
}

fn equal_temp_flows(
    omega: f64,
    gamma: f64,
    n: f64,
    gamma_bar: f64,
    n_common: f64,
    g: &[f64],
) -> Result<HeatFlowReport> {
    if !(gamma + gamma_bar > 0.0) {
        return Err(Error::DegenerateDamping);
    }
    let g2: f64 = g.iter().map(|x| x * x).sum();
    if !(g2 > 0.0) {
        return Err(Error::DegenerateCouplings);
    }
    let eta = gamma_bar / (gamma + gamma_bar);
    let weights = g.iter().map(|x| x * x / g2);
    let occupations = weights.clone().map(|w| n + w * eta * (n_common - n)).collect();
    let flows = weights
        .map(|w| 2.0 * omega * gamma * w * eta * (n - n_common))
        .collect();
    let total = 2.0 * omega * gamma * eta * (n - n_common);
    Ok(HeatFlowReport {
        occupations,
        flows,
        total_mechanical: total,
        cavity_flow: -total,
        solver: Solver::ClosedForm,
    })
}

/// Bath parameters shared by every size in a scaling run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingParams {
    pub omega: f64,
    pub gamma: f64,
    pub gamma_bar: f64,
    pub n: f64,
    pub n_common: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingSlopes {
    pub first: f64,
    pub quarter: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingResult {
    pub sizes: Vec<usize>,
    /// J₁(N)
    pub flows_first: Vec<f64>,
    /// J_{⌊N/4⌋}(N)
    pub flows_quarter: Vec<f64>,
    /// J̄(N) = J_m/N
    pub mean_flow: Vec<f64>,
    /// J_m(N)
    pub totals: Vec<f64>,
    /// Least-squares slopes of log|J| against log N.
    pub fitted_slopes: ScalingSlopes,
}

/// Per-element and mean flows of transmissive arrays of increasing size.
pub fn fourier_scaling(sizes: &[usize], params: &ScalingParams) -> Result<ScalingResult> {
    if sizes.len() < 2 {
        return Err(Error::InvalidSpec("scaling needs at least two sizes".into()));
    }
    if let Some(&n) = sizes.iter().find(|&&n| n <= 2) {
        return Err(Error::InvalidSpec(format!("scaling sizes must be > 2, got {n}")));
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSpec("scaling sizes must be strictly increasing".into()));
    }

    let mut flows_first = Vec::with_capacity(sizes.len());
    let mut flows_quarter = Vec::with_capacity(sizes.len());
    let mut mean_flow = Vec::with_capacity(sizes.len());
    let mut totals = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let g = transmissive_couplings(n, 1.0)?;
        let report = equal_temp_flows(params.omega, params.gamma, params.n, params.gamma_bar, params.n_common, &g)?;
        flows_first.push(report.flows[0]);
        // element ⌊N/4⌋ (1-based); N = 3 falls back to the first element
        flows_quarter.push(report.flows[(n / 4).max(1) - 1]);
        mean_flow.push(report.total_mechanical / n as f64);
        totals.push(report.total_mechanical);
    }

    let log_n: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let slope = |ys: &[f64]| {
        let log_y: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
        least_squares_slope(&log_n, &log_y)
    };
    let fitted_slopes = ScalingSlopes {
        first: slope(&flows_first),
        quarter: slope(&flows_quarter),
        mean: slope(&mean_flow),
    };
    Ok(ScalingResult {
        sizes: sizes.to_vec(),
        flows_first,
        flows_quarter,
        mean_flow,
        totals,
        fitted_slopes,
    })
}

/// Unweighted least-squares slope of y against x.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (sxy, sxx) = x.iter().zip(y).fold((0.0, 0.0), |(sxy, sxx), (xi, yi)| {
        (sxy + (xi - mx) * (yi - my), sxx + (xi - mx) * (xi - mx))
    });
    sxy / sxx
}
