use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{EffectiveTwoOscModel, ValidatedSpec};

/// Which modes a phase-space vector covers.
///
/// Quadratures are ordered `(x_a, p_a, x_1, p_1, …, x_N, p_N)` with
/// `x = (b + b†)/√2` and `p = (b − b†)/(i√2)`; states of the effective
/// two-oscillator model drop the leading cavity pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeLayout {
    CavityAndElements(usize),
    Elements(usize),
}

impl ModeLayout {
    pub fn n_modes(self) -> usize {
        match self {
            ModeLayout::CavityAndElements(n) => n + 1,
            ModeLayout::Elements(n) => n,
        }
    }

    pub fn n_elements(self) -> usize {
        match self {
            ModeLayout::CavityAndElements(n) | ModeLayout::Elements(n) => n,
        }
    }

    pub fn has_cavity(self) -> bool {
        matches!(self, ModeLayout::CavityAndElements(_))
    }

    /// Mode index of mechanical element `j` (0-based).
    pub fn element_mode(self, j: usize) -> usize {
        j + usize::from(self.has_cavity())
    }

    pub fn phase_space_dim(self) -> usize {
        2 * self.n_modes()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bath {
    /// Zero-temperature bath of the cavity mode.
    Cavity,
    /// Independent thermal bath of element `j` (0-based).
    Element(usize),
    /// Common bath left behind by the eliminated cavity.
    Common,
}

/// Drift and diffusion contributed by one bath.
#[derive(Debug, Clone, PartialEq)]
pub struct BathTerm {
    pub bath: Bath,
    pub drift: DMatrix<f64>,
    pub diffusion: DMatrix<f64>,
}

/// Linear Gaussian moment system V̇ = AV + VAᵀ + D.
///
/// `drift = hamiltonian_drift + Σ bath drifts` and
/// `diffusion = Σ bath diffusions`. The Hamiltonian is
/// H = ½ zᵀ·`hamiltonian_matrix`·z in the zero-mean frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub layout: ModeLayout,
    pub drift: DMatrix<f64>,
    pub diffusion: DMatrix<f64>,
    pub hamiltonian_drift: DMatrix<f64>,
    pub hamiltonian_matrix: DMatrix<f64>,
    pub per_bath: Vec<BathTerm>,
}

impl LinearModel {
    /// Number of modes M.
    pub fn dim(&self) -> usize {
        self.layout.n_modes()
    }

    fn from_parts(layout: ModeLayout, hamiltonian_matrix: DMatrix<f64>, per_bath: Vec<BathTerm>) -> Self {
        let hamiltonian_drift = symplectic_form(layout.n_modes()) * &hamiltonian_matrix;
        let n = layout.phase_space_dim();
        let mut drift = hamiltonian_drift.clone();
        let mut diffusion = DMatrix::zeros(n, n);
        for term in &per_bath {
            drift += &term.drift;
            diffusion += &term.diffusion;
        }
        LinearModel {
            layout,
            drift,
            diffusion,
            hamiltonian_drift,
            hamiltonian_matrix,
            per_bath,
        }
    }
}

/// Block-diagonal J with `[[0, 1], [−1, 0]]` blocks, so that ż = J·H_m·z.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        j[(2 * k, 2 * k + 1)] = 1.0;
        j[(2 * k + 1, 2 * k)] = -1.0;
    }
    j
}

/// Symmetrised second moments over the ordered quadratures.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    pub layout: ModeLayout,
    pub matrix: DMatrix<f64>,
}

impl CovarianceState {
    pub fn new(layout: ModeLayout, matrix: DMatrix<f64>) -> Result<Self> {
        let n = layout.phase_space_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidSpec(format!(
                "covariance must be {n}x{n}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let scale = matrix.abs().max().max(1.0);
        if (&matrix - matrix.transpose()).abs().max() > 1e-12 * scale {
            return Err(Error::InvalidSpec("covariance must be symmetric".into()));
        }
        Ok(CovarianceState { layout, matrix })
    }

    /// Product of single-mode thermal states; `occupations` lists every mode
    /// in layout order (cavity first when present).
    pub fn thermal(layout: ModeLayout, occupations: &[f64]) -> Result<Self> {
        if occupations.len() != layout.n_modes() {
            return Err(Error::InvalidSpec(format!(
                "expected {} occupations, got {}",
                layout.n_modes(),
                occupations.len()
            )));
        }
        let diag: Vec<f64> = occupations.iter().flat_map(|&n| [n + 0.5, n + 0.5]).collect();
        Ok(CovarianceState {
            layout,
            matrix: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)),
        })
    }

    pub fn vacuum(layout: ModeLayout) -> Self {
        let n = layout.phase_space_dim();
        CovarianceState {
            layout,
            matrix: DMatrix::identity(n, n) * 0.5,
        }
    }

    /// ⟨b†b⟩ of phase-space mode `k` (layout order).
    pub fn mode_occupation(&self, k: usize) -> f64 {
        (self.matrix[(2 * k, 2 * k)] + self.matrix[(2 * k + 1, 2 * k + 1)] - 1.0) / 2.0
    }
}

/// Linearised cavity + N elements in the frame rotating with the drive,
/// without a rotating-wave approximation on the coupling.
pub fn assemble_full(spec: &ValidatedSpec) -> LinearModel {
    let n = spec.n_elements;
    let layout = ModeLayout::CavityAndElements(n);
    let dim = layout.phase_space_dim();

    // H = −Δ a†a + ω Σ b†b + Σ g_j (a + a†)(b_j + b_j†)
    //   = ½ zᵀ H_m z + const
    let mut h = DMatrix::zeros(dim, dim);
    h[(0, 0)] = -spec.detuning;
    h[(1, 1)] = -spec.detuning;
    for j in 0..n {
        let x = 2 * layout.element_mode(j);
        h[(x, x)] = spec.omega;
        h[(x + 1, x + 1)] = spec.omega;
        h[(0, x)] = 2.0 * spec.g[j];
        h[(x, 0)] = 2.0 * spec.g[j];
    }

    let mut baths = Vec::with_capacity(n + 1);
    baths.push(thermal_damping(dim, 0, spec.kappa, 0.0, Bath::Cavity));
    for j in 0..n {
        baths.push(thermal_damping(
            dim,
            layout.element_mode(j),
            spec.gamma[j],
            spec.n_bath[j],
            Bath::Element(j),
        ));
    }
    LinearModel::from_parts(layout, h, baths)
}

/// Amplitude damping at `rate` towards occupation `n` on one mode: drift −rate
/// on both quadratures, diffusion rate·(2n + 1).
fn thermal_damping(dim: usize, mode: usize, rate: f64, n: f64, bath: Bath) -> BathTerm {
    let mut drift = DMatrix::zeros(dim, dim);
    let mut diffusion = DMatrix::zeros(dim, dim);
    for q in [2 * mode, 2 * mode + 1] {
        drift[(q, q)] = -rate;
        diffusion[(q, q)] = rate * (2.0 * n + 1.0);
    }
    BathTerm {
        bath,
        drift,
        diffusion,
    }
}

/// Moment system of the effective two-oscillator master equation, in which
/// both independent and common baths act through the momenta:
///
/// ```text
/// ẋ_j = ω p_j
/// ṗ_j = −ω x_j − Λ x_k − (2γ + γ̄) p_j − γ̄ p_k
/// ```
pub fn assemble_effective_two(model: &EffectiveTwoOscModel) -> Result<LinearModel> {
    if !(model.gamma_bar >= 0.0) || !(model.n_common >= 0.0) {
        return Err(Error::InvalidSpec(
            "gamma_bar and n_common must be >= 0".into(),
        ));
    }
    let layout = ModeLayout::Elements(2);
    let dim = layout.phase_space_dim();
    let (x1, p1, x2, p2) = (0, 1, 2, 3);

    let mut h = DMatrix::zeros(dim, dim);
    for q in 0..dim {
        h[(q, q)] = model.omega;
    }
    h[(x1, x2)] = model.lambda_coupling;
    h[(x2, x1)] = model.lambda_coupling;

    let mut baths = Vec::with_capacity(3);
    for (j, (p, n)) in [(p1, model.n1), (p2, model.n2)].into_iter().enumerate() {
        let mut drift = DMatrix::zeros(dim, dim);
        let mut diffusion = DMatrix::zeros(dim, dim);
        drift[(p, p)] = -2.0 * model.gamma;
        diffusion[(p, p)] = 2.0 * model.gamma * (2.0 * n + 1.0);
        baths.push(BathTerm {
            bath: Bath::Element(j),
            drift,
            diffusion,
        });
    }

    let mut drift = DMatrix::zeros(dim, dim);
    let mut diffusion = DMatrix::zeros(dim, dim);
    let d_common = model.gamma_bar * (2.0 * model.n_common + 1.0);
    for a in [p1, p2] {
        for b in [p1, p2] {
            drift[(a, b)] = -model.gamma_bar;
            diffusion[(a, b)] = d_common;
        }
    }
    baths.push(BathTerm {
        bath: Bath::Common,
        drift,
        diffusion,
    });

    Ok(LinearModel::from_parts(layout, h, baths))
}
