//! Gaussian moment dynamics: model assembly, steady states, transients and
//! heat-flow extraction.

mod evolve;
mod flows;
mod linear;
mod lyapunov;

pub use evolve::{default_dt, evolve, evolve_sampled, Trajectory, DIVERGENCE_LIMIT};
pub use flows::{
    energy_flows_full, heat_flows_weak, occupations, BathFlow, HeatFlowReport, Solver,
    NON_PHYSICAL_TOLERANCE,
};
pub use linear::{
    assemble_effective_two, assemble_full, symplectic_form, Bath, BathTerm, CovarianceState,
    LinearModel, ModeLayout,
};
pub use lyapunov::{
    eigenvalues, lyapunov_residual, lyapunov_solve, solve_continuous_lyapunov,
    RESIDUAL_TOLERANCE,
};
