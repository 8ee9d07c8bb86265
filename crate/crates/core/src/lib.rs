//! Heat transport through arrays of harmonic oscillators that share a common
//! cavity mode.
//!
//! - [`model`]: array specifications, the collective basis, coupling profiles
//! - [`elimination`]: cavity elimination into a spring shift and a common bath
//! - [`dynamics`]: Gaussian moment systems, Lyapunov steady states, transients
//! - [`closedform`]: analytic steady-state occupations, heat flows and scaling

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closedform;
pub mod dynamics;
pub mod elimination;
pub mod error;
pub mod model;

pub use dynamics::{CovarianceState, HeatFlowReport, LinearModel, ModeLayout, Solver};
pub use elimination::{RegimeReport, SidebandRates};
pub use error::{Error, Result};
pub use model::{ArraySpec, CollectiveBasis, EffectiveTwoOscModel, ValidatedSpec};
