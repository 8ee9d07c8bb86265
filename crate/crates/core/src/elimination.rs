//! Adiabatic elimination of the cavity mode.
//!
//! Once the cavity is traced out, the collective (centre-of-mass) mechanical
//! mode sees an optical-spring frequency shift Λ and a pair of Lorentzian
//! sideband rates β± which together form an extra thermal bath (γ̄, n̄).
//! `g` below is always the enhanced coupling of the collective mode.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::model::{EffectiveTwoOscModel, ValidatedSpec};

/// Cavity spectral density S(ω) = −1/(i(Δ+ω) − κ) at zeroth order in g.
pub fn spectral_density(delta: f64, kappa: f64, omega_eval: f64) -> Result<Complex<f64>> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidSpec("kappa must be > 0".into()));
    }
    let denom = Complex::new(-kappa, delta + omega_eval);
    Ok(-denom.inv())
}

/// Optical-spring shift
/// Λ = 2g²Δ(Δ² − ω² + κ²) / ([(Δ+ω)² + κ²]·[(Δ−ω)² + κ²]).
pub fn spring_shift(g: f64, delta: f64, omega: f64, kappa: f64) -> f64 {
    debug_assert!(kappa > 0.0);
    let num = 2.0 * g * g * delta * (delta * delta - omega * omega + kappa * kappa);
    let den = ((delta + omega).powi(2) + kappa * kappa) * ((delta - omega).powi(2) + kappa * kappa);
    num / den
}

/// Cooling (β₊) and heating (β₋) rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandRates {
    pub beta_plus: f64,
    pub beta_minus: f64,
}

/// β± = g²κ / ((Δ ± ω)² + κ²).
pub fn sideband_rates(g: f64, delta: f64, omega: f64, kappa: f64) -> SidebandRates {
    debug_assert!(kappa > 0.0);
    let lorentzian = |x: f64| g * g * kappa / (x * x + kappa * kappa);
    SidebandRates {
        beta_plus: lorentzian(delta + omega),
        beta_minus: lorentzian(delta - omega),
    }
}

/// Converts sideband rates into a thermal bath: γ̄ = β₊ − β₋ and
/// n̄ = β₋/(β₊ − β₋). Vanishing rates give (0, 0).
pub fn effective_bath(rates: SidebandRates) -> Result<(f64, f64)> {
    let SidebandRates {
        beta_plus,
        beta_minus,
    } = rates;
    if beta_plus == 0.0 && beta_minus == 0.0 {
        return Ok((0.0, 0.0));
    }
    if beta_plus <= beta_minus {
        return Err(Error::BlueDetunedRegime {
            beta_plus,
            beta_minus,
        });
    }
    let gamma_bar = beta_plus - beta_minus;
    Ok((gamma_bar, beta_minus / gamma_bar))
}

/// Effective bath (γ̄, n̄) seen by the collective mode of an arbitrary array.
pub fn collective_effective_bath(spec: &ValidatedSpec) -> Result<(f64, f64)> {
    let rates = sideband_rates(spec.g_total(), spec.detuning, spec.omega, spec.kappa);
    effective_bath(rates)
}

fn rel_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Reduces a symmetric two-element array to the effective two-oscillator
/// model by composing [`spring_shift`], [`sideband_rates`] and
/// [`effective_bath`] at the collective coupling.
pub fn reduce_two_element(spec: &ValidatedSpec) -> Result<EffectiveTwoOscModel> {
    if spec.n_elements != 2 {
        return Err(Error::AsymmetricArray(format!(
            "expected 2 elements, got {}",
            spec.n_elements
        )));
    }
    if !rel_eq(spec.gamma[0], spec.gamma[1]) {
        return Err(Error::AsymmetricArray(format!(
            "gamma_1 = {} != gamma_2 = {}",
            spec.gamma[0], spec.gamma[1]
        )));
    }
    if !rel_eq(spec.g[0], spec.g[1]) {
        return Err(Error::AsymmetricArray(format!(
            "g_1 = {} != g_2 = {}; only centre-of-mass coupling is supported",
            spec.g[0], spec.g[1]
        )));
    }
    let g = spec.g_total();
    let lambda = spring_shift(g, spec.detuning, spec.omega, spec.kappa);
    let (gamma_bar, n_common) =
        effective_bath(sideband_rates(g, spec.detuning, spec.omega, spec.kappa))?;
    EffectiveTwoOscModel::new(
        spec.omega,
        lambda,
        spec.gamma[0],
        gamma_bar,
        spec.n_bath[0],
        spec.n_bath[1],
        n_common,
    )
}

/// Diagnostics for the validity of the elimination and of the two-oscillator
/// closed forms. Never blocks a computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    /// g ≪ κ and g ≪ ω
    pub weak_coupling_ok: bool,
    /// |Λ| ≪ ω
    pub spring_small_ok: bool,
    /// γ, γ̄ ≪ |Λ| ≪ ω
    pub hierarchy_ok: bool,
    pub margins: RegimeMargins,
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeMargins {
    /// g / min(κ, ω)
    pub coupling: f64,
    /// |Λ| / ω
    pub spring: f64,
    /// max(γ, γ̄) / |Λ|
    pub hierarchy: f64,
}

pub const DEFAULT_REGIME_THRESHOLD: f64 = 0.1;

pub fn regime_report(
    spec: &ValidatedSpec,
    effective: &EffectiveTwoOscModel,
    threshold: f64,
) -> RegimeReport {
    let g = spec.g_total();
    let coupling = g / spec.kappa.min(spec.omega.abs());
    let lambda = effective.lambda_coupling.abs();
    let spring = lambda / effective.omega.abs();
    let hierarchy = if lambda == 0.0 {
        f64::INFINITY
    } else {
        effective.gamma.max(effective.gamma_bar) / lambda
    };
    let spring_small_ok = spring < threshold;
    RegimeReport {
        weak_coupling_ok: coupling < threshold,
        spring_small_ok,
        hierarchy_ok: hierarchy < threshold && spring_small_ok,
        margins: RegimeMargins {
            coupling,
            spring,
            hierarchy,
        },
        threshold,
    }
}
