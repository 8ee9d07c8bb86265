//! System specifications, the collective (normal-mode) basis and coupling
//! profiles.
//!
//! Units are ℏ = 1 with every rate and frequency in one shared time unit.
//! Couplings `g_j` are the enhanced (drive-multiplied) optomechanical rates
//! and are restricted to real values.

use std::f64::consts::PI;
use std::ops::Deref;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Bare (N+1)-mode model: N mechanical elements with independent thermal
/// baths, all coupled to one cavity mode whose bath is at zero temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct ArraySpec {
    pub n_elements: usize,
    /// Mechanical frequency ω.
    pub omega: f64,
    /// Cavity detuning Δ = Ω_L − Ω in the frame rotating with the drive.
    pub detuning: f64,
    /// Cavity amplitude decay rate κ.
    pub kappa: f64,
    /// Per-element mechanical amplitude decay rates γ_j.
    pub gamma: Vec<f64>,
    /// Per-element bath occupations n_j.
    pub n_bath: Vec<f64>,
    /// Per-element couplings g_j.
    pub g: Vec<f64>,
}

impl ArraySpec {
    /// Identical elements (shared γ) with the given bath occupations and couplings.
    pub fn uniform(
        omega: f64,
        detuning: f64,
        kappa: f64,
        gamma: f64,
        n_bath: Vec<f64>,
        g: Vec<f64>,
    ) -> Self {
        let n = g.len();
        ArraySpec {
            n_elements: n,
            omega,
            detuning,
            kappa,
            gamma: vec![gamma; n],
            n_bath,
            g,
        }
    }

    /// Two elements driven through their centre-of-mass coordinate.
    ///
    /// `g_collective` is the coupling of the centre-of-mass mode; each element
    /// then carries `g_collective / √2`.
    pub fn two_element(
        omega: f64,
        detuning: f64,
        kappa: f64,
        gamma: f64,
        n1: f64,
        n2: f64,
        g_collective: f64,
    ) -> Self {
        let gj = g_collective / std::f64::consts::SQRT_2;
        Self::uniform(omega, detuning, kappa, gamma, vec![n1, n2], vec![gj, gj])
    }

    /// Collective coupling g = sqrt(Σ g_j²).
    pub fn g_total(&self) -> f64 {
        self.g.iter().map(|g| g * g).sum::<f64>().sqrt()
    }

    pub fn validate(self) -> Result<ValidatedSpec> {
        let n = self.n_elements;
        if n == 0 {
            return Err(invalid("n_elements must be >= 1"));
        }
        if self.gamma.len() != n || self.n_bath.len() != n || self.g.len() != n {
            return Err(invalid(format!(
                "per-element lists must have length n_elements = {n} (gamma: {}, n_bath: {}, g: {})",
                self.gamma.len(),
                self.n_bath.len(),
                self.g.len()
            )));
        }
        if !self.omega.is_finite() {
            return Err(invalid("omega must be finite"));
        }
        if !self.detuning.is_finite() {
            return Err(invalid("detuning must be finite"));
        }
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(invalid("kappa must be > 0"));
        }
        if let Some(j) = self.gamma.iter().position(|&x| !(x.is_finite() && x >= 0.0)) {
            return Err(invalid(format!("gamma[{j}] must be >= 0")));
        }
        if let Some(j) = self.n_bath.iter().position(|&x| !(x.is_finite() && x >= 0.0)) {
            return Err(invalid(format!("n_bath[{j}] must be >= 0")));
        }
        if let Some(j) = self.g.iter().position(|x| !x.is_finite()) {
            return Err(invalid(format!("g[{j}] must be finite")));
        }
        if !(self.g_total() > 0.0) {
            return Err(invalid("couplings all zero"));
        }
        Ok(ValidatedSpec(self))
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

/// An [`ArraySpec`] whose invariants have been checked.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedSpec(ArraySpec);

impl ValidatedSpec {
    pub fn into_inner(self) -> ArraySpec {
        self.0
    }
}

impl Deref for ValidatedSpec {
    type Target = ArraySpec;

    fn deref(&self) -> &ArraySpec {
        &self.0
    }
}

pub fn validate_spec(spec: ArraySpec) -> Result<ValidatedSpec> {
    spec.validate()
}

/// Orthonormal change of basis whose first row is the normalised coupling
/// vector; the first collective mode is the only one that sees the cavity.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveBasis {
    pub matrix: DMatrix<f64>,
    pub g_total: f64,
}

/// Builds the collective basis by Gram–Schmidt over the canonical vectors in
/// index order, skipping those dependent on the rows already accepted.
pub fn collective_basis(g_vec: &[f64]) -> Result<CollectiveBasis> {
    let n = g_vec.len();
    let g_total = g_vec.iter().map(|g| g * g).sum::<f64>().sqrt();
    if n == 0 || !(g_total > 0.0) || !g_total.is_finite() {
        return Err(Error::DegenerateCouplings);
    }

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    rows.push(g_vec.iter().map(|g| g / g_total).collect());

    for k in 0..n {
        if rows.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for r in &rows {
                let dot: f64 = r.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(r).for_each(|(vi, ri)| *vi -= dot * ri);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        rows.push(v);
    }
    debug_assert_eq!(rows.len(), n);

    let matrix = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    Ok(CollectiveBasis { matrix, g_total })
}

/// Sinusoidal coupling profile of a transmissive array,
/// g_j = g·sqrt(2/N)·sin(2π(j − ½)/N) for j = 1…N.
pub fn transmissive_couplings(n: usize, g: f64) -> Result<Vec<f64>> {
    if n <= 2 {
        return Err(invalid(format!("transmissive profile needs N > 2, got {n}")));
    }
    if !(g.is_finite() && g > 0.0) {
        return Err(invalid("g must be > 0"));
    }
    let nf = n as f64;
    let scale = g * (2.0 / nf).sqrt();
    Ok((1..=n)
        .map(|j| scale * (2.0 * PI * (j as f64 - 0.5) / nf).sin())
        .collect())
}

/// Two mutually coupled oscillators with independent baths plus one common
/// bath, as left behind once the cavity is eliminated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveTwoOscModel {
    pub omega: f64,
    /// Mutual coupling Λ; negative on the red side of the cavity.
    pub lambda_coupling: f64,
    /// Independent-bath rate γ (same for both elements).
    pub gamma: f64,
    /// Common-bath rate γ̄.
    pub gamma_bar: f64,
    pub n1: f64,
    pub n2: f64,
    /// Common-bath occupation n̄.
    pub n_common: f64,
    /// ω′ = ω + Λ, kept for reference only.
    pub omega_prime: f64,
}

impl EffectiveTwoOscModel {
    pub fn new(
        omega: f64,
        lambda_coupling: f64,
        gamma: f64,
        gamma_bar: f64,
        n1: f64,
        n2: f64,
        n_common: f64,
    ) -> Result<Self> {
        let all = [omega, lambda_coupling, gamma, gamma_bar, n1, n2, n_common];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(invalid("effective model parameters must be finite"));
        }
        if gamma < 0.0 {
            return Err(invalid("gamma must be >= 0"));
        }
        if gamma_bar < 0.0 {
            return Err(invalid("gamma_bar must be >= 0"));
        }
        if n1 < 0.0 || n2 < 0.0 {
            return Err(invalid("bath occupations must be >= 0"));
        }
        if n_common < 0.0 {
            return Err(invalid("n_common must be >= 0"));
        }
        Ok(EffectiveTwoOscModel {
            omega,
            lambda_coupling,
            gamma,
            gamma_bar,
            n1,
            n2,
            n_common,
            omega_prime: omega + lambda_coupling,
        })
    }

    pub fn bath_occupations(&self) -> [f64; 2] {
        [self.n1, self.n2]
    }
}
