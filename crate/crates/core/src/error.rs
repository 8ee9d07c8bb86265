use nalgebra::Complex;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("degenerate couplings: coupling vector has zero norm")]
    DegenerateCouplings,

    #[error("blue-detuned regime: beta_plus = {beta_plus:e} <= beta_minus = {beta_minus:e}, effective bath is not thermal")]
    BlueDetunedRegime { beta_plus: f64, beta_minus: f64 },

    #[error("asymmetric array: {0}")]
    AsymmetricArray(String),

    #[error("unstable drift: eigenvalue {eigenvalue} has non-negative real part")]
    UnstableDrift { eigenvalue: Complex<f64> },

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("integration diverged at t = {time:e} (max |V| = {norm:e}); reduce the step")]
    StepTooLarge { time: f64, norm: f64 },

    #[error("non-physical state: mode {mode} has occupation {occupation:e}")]
    NonPhysical { mode: usize, occupation: f64 },

    #[error("degenerate damping: 2*gamma + gamma_bar must be > 0")]
    DegenerateDamping,

    #[error("unequal bath temperatures: {0}")]
    UnequalTemperatures(String),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::UnstableDrift { .. }
                | Error::SingularSystem(_)
                | Error::StepTooLarge { .. }
                | Error::NonPhysical { .. }
        )
    }
}
