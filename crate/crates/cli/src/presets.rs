//! Built-in scenarios reproducing the two-oscillator heat-flow maps and the
//! array-size scaling study.

use crate::config::{
    AxisConfig, Mode, OneOrMany, RawConfig, ScalingConfig, SweepAxis, SweepConfig, SystemConfig, Task,
};

/// Allowed ratios n₁/n₂ for the heat-flow maps.
pub const FIG2_RATIOS: [u32; 2] = [2, 10];

/// Closed-form J₁, J₂ and J₁+J₂ over Λ/γ, γ̄/γ ∈ [0, 20] on an 81×81 grid,
/// with n₂ = 1, n₁ = `ratio`, a zero-temperature common bath and ω = γ = 1.
pub fn fig2(ratio: u32) -> RawConfig {
    let axis = |axis| AxisConfig {
        axis,
        min: 0.0,
        max: 20.0,
        points: 81,
    };
    RawConfig {
        mode: Mode::ClosedForm,
        task: Task::Sweep,
        system: Some(SystemConfig {
            omega: Some(1.0),
            gamma: Some(OneOrMany::One(1.0)),
            n1: Some(f64::from(ratio)),
            n2: Some(1.0),
            n_common: Some(0.0),
            ..SystemConfig::default()
        }),
        sweep: Some(SweepConfig {
            axes: vec![axis(SweepAxis::LambdaOverGamma), axis(SweepAxis::GammabarOverGamma)],
        }),
        scaling: None,
        transient: None,
        output: None,
        tolerances: None,
    }
}

/// Sizes of the scaling series.
pub fn fig3_sizes() -> Vec<usize> {
    (4..=10).map(|k| 1usize << k).collect()
}

/// Equal-temperature transmissive arrays: the N = 20 flow profile and the
/// J₁, J_{⌊N/4⌋}, J̄ series for N = 16…1024 with fitted log-log slopes.
pub fn fig3() -> RawConfig {
    RawConfig {
        mode: Mode::ClosedForm,
        task: Task::Scaling,
        system: Some(SystemConfig {
            omega: Some(1.0),
            gamma: Some(OneOrMany::One(1.0)),
            gamma_bar: Some(1.0),
            n1: Some(1.0),
            n2: Some(1.0),
            n_common: Some(0.0),
            ..SystemConfig::default()
        }),
        sweep: None,
        scaling: Some(ScalingConfig {
            sizes: fig3_sizes(),
            profile_size: Some(20),
        }),
        transient: None,
        output: None,
        tolerances: None,
    }
}

/// Configuration used by the `selfcheck` subcommand.
pub fn selfcheck() -> RawConfig {
    RawConfig {
        mode: Mode::ClosedForm,
        task: Task::Selfcheck,
        system: None,
        sweep: None,
        scaling: None,
        transient: None,
        output: None,
        tolerances: None,
    }
}
