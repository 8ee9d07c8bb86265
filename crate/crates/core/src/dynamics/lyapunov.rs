//! Steady state of V̇ = AV + VAᵀ + D by Bartels–Stewart on the complex Schur
//! form of A.

use nalgebra::{Complex, DMatrix};
use nalgebra::linalg::Schur;

use super::linear::{CovarianceState, LinearModel};
use crate::error::{Error, Result};

/// Residual bound relative to max(1, ‖D‖_max).
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

const MAX_REFINEMENTS: usize = 3;

/// Schur factors A = Q T Qᴴ with T upper triangular.
struct SchurFactors {
    q: DMatrix<Complex<f64>>,
    t: DMatrix<Complex<f64>>,
}

impl SchurFactors {
    fn new(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        let ac = a.map(|x| Complex::new(x, 0.0));
        let schur = Schur::try_new(ac, f64::EPSILON, 1000 * n.max(1))
            .ok_or_else(|| Error::SingularSystem("Schur decomposition did not converge".into()))?;
        let (q, t) = schur.unpack();
        Ok(SchurFactors { q, t })
    }

    fn eigenvalues(&self) -> Vec<Complex<f64>> {
        self.t.diagonal().iter().copied().collect()
    }

    /// Solves A X + X Aᵀ = −rhs for Hermitian-symmetric real `rhs`.
    fn solve(&self, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let n = self.t.nrows();
        let q = &self.q;
        let t = &self.t;
        let c = q.adjoint() * rhs.map(|x| Complex::new(-x, 0.0)) * q;

        // T Y + Y Tᴴ = C, sweeping from the bottom-right corner.
        let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut y = DMatrix::<Complex<f64>>::zeros(n, n);
        for i in (0..n).rev() {
            for j in (0..n).rev() {
                let mut s = c[(i, j)];
                for k in (i + 1)..n {
                    s -= t[(i, k)] * y[(k, j)];
                }
                for k in (j + 1)..n {
                    s -= y[(i, k)] * t[(j, k)].conj();
                }
                let den = t[(i, i)] + t[(j, j)].conj();
                if den.norm() <= 1e3 * f64::EPSILON * scale {
                    return Err(Error::SingularSystem(format!(
                        "eigenvalue pair ({}, {}) nearly cancels",
                        t[(i, i)],
                        t[(j, j)]
                    )));
                }
                y[(i, j)] = s / den;
            }
        }
        let x = q * y * q.adjoint();
        let x = x.map(|z| z.re);
        Ok((&x + x.transpose()) * 0.5)
    }
}

/// Eigenvalues of a real matrix from its complex Schur form.
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    Ok(SchurFactors::new(a)?.eigenvalues())
}

/// Max-norm of AV + VAᵀ + D.
pub fn lyapunov_residual(a: &DMatrix<f64>, d: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    (a * v + v * a.transpose() + d).abs().max()
}

/// Solves AV + VAᵀ + D = 0 for a Hurwitz-stable drift A.
///
/// The result is refined until the residual is within
/// [`RESIDUAL_TOLERANCE`]·max(1, ‖D‖_max); a system that cannot reach the bound
/// is reported as singular.
pub fn solve_continuous_lyapunov(a: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || d.nrows() != n || d.ncols() != n {
        return Err(Error::InvalidSpec(format!(
            "drift {}x{} and diffusion {}x{} must be square and of equal size",
            a.nrows(),
            a.ncols(),
            d.nrows(),
            d.ncols()
        )));
    }
    if a.iter().chain(d.iter()).any(|x| !x.is_finite()) {
        return Err(Error::InvalidSpec("drift and diffusion must be finite".into()));
    }
    let schur = SchurFactors::new(a)?;
    // eigenvalues on the imaginary axis come back with O(eps·‖A‖) real parts
    let marginal = -64.0 * f64::EPSILON * a.abs().max();
    if let Some(worst) = schur
        .eigenvalues()
        .into_iter()
        .filter(|e| e.re >= marginal)
        .max_by(|a, b| a.re.total_cmp(&b.re))
    {
        return Err(Error::UnstableDrift { eigenvalue: worst });
    }

    let bound = RESIDUAL_TOLERANCE * d.abs().max().max(1.0);
    let mut v = schur.solve(d)?;
    let mut residual = lyapunov_residual(a, d, &v);
    for _ in 0..MAX_REFINEMENTS {
        if residual <= bound {
            break;
        }
        let r = a * &v + &v * a.transpose() + d;
        let correction = schur.solve(&r)?;
        let candidate = &v + correction;
        let next = lyapunov_residual(a, d, &candidate);
        if next >= residual {
            break;
        }
        v = candidate;
        residual = next;
    }
    if residual > bound {
        return Err(Error::SingularSystem(format!(
            "Lyapunov residual {residual:e} exceeds bound {bound:e}"
        )));
    }
    Ok(v)
}

pub fn lyapunov_solve(model: &LinearModel) -> Result<CovarianceState> {
    let v = solve_continuous_lyapunov(&model.drift, &model.diffusion)?;
    Ok(CovarianceState {
        layout: model.layout,
        matrix: v,
    })
}
