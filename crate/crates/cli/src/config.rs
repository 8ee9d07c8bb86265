//! Scenario configuration: a strict JSON schema, resolved into core types.

use std::fmt;

use phononflux_core::elimination::{reduce_two_element, DEFAULT_REGIME_THRESHOLD};
use phononflux_core::model::transmissive_couplings;
use phononflux_core::{ArraySpec, EffectiveTwoOscModel, ValidatedSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Invalid configuration, located by a JSON path such as `$.system.omega`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl fmt::Display) -> Self {
        ConfigError {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Full,
    Effective,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Steady,
    Transient,
    Sweep,
    Scaling,
    Selfcheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingProfile {
    /// g_j = g/√N
    Uniform,
    /// g_j = g·√(2/N)·sin(2π(j − ½)/N), N > 2
    Transmissive,
}

/// Either array fields (cavity + N elements) or effective two-oscillator
/// fields; the two sets may not be mixed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub omega: Option<f64>,
    /// Shared by both field sets; defaults to 1 so that rates are in units of γ.
    pub gamma: Option<OneOrMany>,

    pub n_elements: Option<usize>,
    pub detuning: Option<f64>,
    pub kappa: Option<f64>,
    pub n_bath: Option<OneOrMany>,
    /// A list of per-element couplings, or the collective coupling spread by `profile`.
    pub g: Option<OneOrMany>,
    pub profile: Option<CouplingProfile>,

    pub lambda: Option<f64>,
    pub gamma_bar: Option<f64>,
    pub n1: Option<f64>,
    pub n2: Option<f64>,
    pub n_common: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    LambdaOverGamma,
    GammabarOverGamma,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::LambdaOverGamma => "lambda_over_gamma",
            SweepAxis::GammabarOverGamma => "gammabar_over_gamma",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub axis: SweepAxis,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl AxisConfig {
    /// Evenly spaced grid, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| if i + 1 == self.points { self.max } else { self.min + step * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axes: Vec<AxisConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub sizes: Vec<usize>,
    /// Also emit the per-element flow profile for this array size.
    pub profile_size: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    Vacuum,
    /// Every mode at its own bath occupation (cavity at zero).
    Thermal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransientConfig {
    pub t_final: f64,
    /// Defaults to 2π/(200·spectral radius of the drift).
    pub dt: Option<f64>,
    /// Record every `stride`-th step.
    pub stride: Option<usize>,
    pub initial: Option<InitialState>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Margin below which elimination-regime checks pass.
    #[serde(default = "default_regime_threshold")]
    pub regime_threshold: f64,
}

fn default_regime_threshold() -> f64 {
    DEFAULT_REGIME_THRESHOLD
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            regime_threshold: DEFAULT_REGIME_THRESHOLD,
        }
    }
}

/// The file format as written by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub mode: Mode,
    pub task: Task,
    #[serde(default)]
    pub system: Option<SystemConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub scaling: Option<ScalingConfig>,
    #[serde(default)]
    pub transient: Option<TransientConfig>,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum System {
    Effective(EffectiveTwoOscModel),
    Array(ValidatedSpec),
}

/// A validated scenario with defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub task: Task,
    pub system: Option<System>,
    pub sweep: Vec<AxisConfig>,
    pub scaling: Option<ScalingConfig>,
    pub transient: Option<TransientConfig>,
    pub output: Option<String>,
    pub tolerances: Tolerances,
    /// SHA-256 of the canonical JSON form, excluding `output`.
    pub hash: String,
}

/// Parses and validates a JSON scenario. Unknown keys are fatal.
pub fn parse_config(text: &[u8]) -> Result<ScenarioConfig, ConfigError> {
    let text = std::str::from_utf8(text).map_err(|e| ConfigError::new("$", e))?;
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "$".to_string() } else { format!("$.{path}") };
        ConfigError::new(path, e.into_inner())
    })?;
    de.end().map_err(|e| ConfigError::new("$", e))?;
    validate(raw)
}

pub fn validate(raw: RawConfig) -> Result<ScenarioConfig, ConfigError> {
    let tolerances = raw.tolerances.unwrap_or_default();
    if tolerances.regime_threshold.is_nan() || tolerances.regime_threshold <= 0.0 {
        return Err(ConfigError::new("$.tolerances.regime_threshold", "must be > 0"));
    }
    let system = raw.system.as_ref().map(resolve_system).transpose()?;

    let needs = |present: bool, key: &str, task: &str| -> Result<(), ConfigError> {
        if present {
            Err(ConfigError::new(format!("$.{key}"), format!("only valid with task={task}")))
        } else {
            Ok(())
        }
    };
    if raw.task != Task::Sweep {
        needs(raw.sweep.is_some(), "sweep", "sweep")?;
    }
    if raw.task != Task::Scaling {
        needs(raw.scaling.is_some(), "scaling", "scaling")?;
    }
    if raw.task != Task::Transient {
        needs(raw.transient.is_some(), "transient", "transient")?;
    }
    if raw.sweep.is_some() && raw.mode == Mode::Full {
        return Err(ConfigError::new("$.sweep", "sweep axes are only valid with mode=closed-form or effective"));
    }

    let require_system = || system.clone().ok_or_else(|| ConfigError::new("$.system", "missing"));
    match raw.task {
        Task::Selfcheck => {}
        Task::Steady => {
            let s = require_system()?;
            if raw.mode == Mode::Full && !matches!(s, System::Array(_)) {
                return Err(ConfigError::new("$.system", "mode=full needs array fields (kappa, detuning, g, ...)"));
            }
            if raw.mode != Mode::Full {
                effective_view(&s, raw.mode)?;
            }
        }
        Task::Transient => {
            let s = require_system()?;
            match raw.mode {
                Mode::ClosedForm => return Err(ConfigError::new("$.mode", "transients need mode=full or effective")),
                Mode::Full if !matches!(s, System::Array(_)) => {
                    return Err(ConfigError::new("$.system", "mode=full needs array fields"))
                }
                _ => {}
            }
            if raw.mode != Mode::Full {
                effective_view(&s, raw.mode)?;
            }
            let t = raw
                .transient
                .as_ref()
                .ok_or_else(|| ConfigError::new("$.transient", "missing"))?;
            if !(t.t_final >= 0.0 && t.t_final.is_finite()) {
                return Err(ConfigError::new("$.transient.t_final", "must be finite and >= 0"));
            }
            if let Some(dt) = t.dt {
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(ConfigError::new("$.transient.dt", "must be > 0"));
                }
            }
            if t.stride == Some(0) {
                return Err(ConfigError::new("$.transient.stride", "must be >= 1"));
            }
        }
        Task::Sweep => {
            let s = require_system()?;
            effective_view(&s, raw.mode)?
                .ok_or_else(|| ConfigError::new("$.system", "sweeps need a two-oscillator system"))?;
            let sweep = raw.sweep.as_ref().ok_or_else(|| ConfigError::new("$.sweep", "missing"))?;
            validate_axes(&sweep.axes)?;
        }
        Task::Scaling => {
            if raw.mode != Mode::ClosedForm {
                return Err(ConfigError::new("$.mode", "scaling needs mode=closed-form"));
            }
            let m = match require_system()? {
                System::Effective(m) => m,
                System::Array(_) => {
                    return Err(ConfigError::new("$.system", "scaling needs effective-model fields (gamma_bar, n1 = n2, n_common)"))
                }
            };
            if m.n1 != m.n2 {
                return Err(ConfigError::new("$.system.n2", "scaling needs equal bath occupations n1 = n2"));
            }
            let sc = raw.scaling.as_ref().ok_or_else(|| ConfigError::new("$.scaling", "missing"))?;
            validate_sizes(sc)?;
        }
    }

    let mut canonical = raw.clone();
    canonical.output = None;
    canonical.tolerances = Some(tolerances);
    let hash = config_hash(&canonical);

    Ok(ScenarioConfig {
        mode: raw.mode,
        task: raw.task,
        system,
        sweep: raw.sweep.map(|s| s.axes).unwrap_or_default(),
        scaling: raw.scaling,
        transient: raw.transient,
        output: raw.output,
        tolerances,
        hash,
    })
}

pub fn config_hash(raw: &RawConfig) -> String {
    let bytes = serde_json::to_vec(raw).expect("config types always serialize");
    format!("{:x}", Sha256::digest(&bytes))
}

/// The two-oscillator model this system maps onto, if any. Two-element arrays
/// are reduced by elimination; larger arrays have none.
pub fn effective_view(system: &System, mode: Mode) -> Result<Option<EffectiveTwoOscModel>, ConfigError> {
    match system {
        System::Effective(m) => {
            if mode == Mode::Full {
                return Err(ConfigError::new("$.system", "mode=full needs array fields"));
            }
            Ok(Some(*m))
        }
        System::Array(spec) if spec.n_elements == 2 => reduce_two_element(spec)
            .map(Some)
            .map_err(|e| ConfigError::new("$.system", e)),
        System::Array(spec) => {
            if mode == Mode::Effective {
                return Err(ConfigError::new(
                    "$.system.n_elements",
                    format!("mode=effective needs 2 elements, got {}", spec.n_elements),
                ));
            }
            Ok(None)
        }
    }
}

fn validate_axes(axes: &[AxisConfig]) -> Result<(), ConfigError> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(ConfigError::new("$.sweep.axes", "need one or two axes"));
    }
    if axes.len() == 2 && axes[0].axis == axes[1].axis {
        return Err(ConfigError::new("$.sweep.axes[1].axis", "duplicate axis"));
    }
    for (i, a) in axes.iter().enumerate() {
        if a.points < 2 {
            return Err(ConfigError::new(format!("$.sweep.axes[{i}].points"), "grids need at least 2 points"));
        }
        if !(a.min.is_finite() && a.max.is_finite() && a.min <= a.max) {
            return Err(ConfigError::new(format!("$.sweep.axes[{i}]"), "need finite min <= max"));
        }
        if a.axis == SweepAxis::GammabarOverGamma && a.min < 0.0 {
            return Err(ConfigError::new(format!("$.sweep.axes[{i}].min"), "gamma_bar must be >= 0"));
        }
    }
    Ok(())
}

fn validate_sizes(sc: &ScalingConfig) -> Result<(), ConfigError> {
    if sc.sizes.len() < 2 {
        return Err(ConfigError::new("$.scaling.sizes", "need at least 2 sizes"));
    }
    if let Some(i) = sc.sizes.iter().position(|&n| n <= 2) {
        return Err(ConfigError::new(format!("$.scaling.sizes[{i}]"), "sizes must be > 2"));
    }
    if let Some(i) = sc.sizes.windows(2).position(|w| w[1] <= w[0]) {
        return Err(ConfigError::new(format!("$.scaling.sizes[{}]", i + 1), "sizes must be strictly increasing"));
    }
    if let Some(p) = sc.profile_size {
        if p <= 2 {
            return Err(ConfigError::new("$.scaling.profile_size", "must be > 2"));
        }
    }
    Ok(())
}

fn resolve_system(s: &SystemConfig) -> Result<System, ConfigError> {
    let array_keys = [
        ("n_elements", s.n_elements.is_some()),
        ("detuning", s.detuning.is_some()),
        ("kappa", s.kappa.is_some()),
        ("n_bath", s.n_bath.is_some()),
        ("g", s.g.is_some()),
        ("profile", s.profile.is_some()),
    ];
    let effective_keys = [
        ("lambda", s.lambda.is_some()),
        ("gamma_bar", s.gamma_bar.is_some()),
        ("n1", s.n1.is_some()),
        ("n2", s.n2.is_some()),
        ("n_common", s.n_common.is_some()),
    ];
    let is_array = array_keys.iter().any(|k| k.1);
    let effective_key = effective_keys.iter().find(|k| k.1).map(|k| k.0);
    match (is_array, effective_key) {
        (true, Some(key)) => Err(ConfigError::new(
            format!("$.system.{key}"),
            "array fields and effective-model fields cannot be mixed",
        )),
        (true, None) => resolve_array(s).map(System::Array),
        (false, Some(_)) => resolve_effective(s).map(System::Effective),
        (false, None) => Err(ConfigError::new(
            "$.system",
            "give either array fields (kappa, detuning, n_bath, g) or effective-model fields (n1, n2, gamma_bar)",
        )),
    }
}

fn required<T: Copy>(v: Option<T>, key: &str) -> Result<T, ConfigError> {
    v.ok_or_else(|| ConfigError::new(format!("$.system.{key}"), "missing field"))
}

fn resolve_effective(s: &SystemConfig) -> Result<EffectiveTwoOscModel, ConfigError> {
    let gamma = match &s.gamma {
        None => 1.0,
        Some(OneOrMany::One(g)) => *g,
        Some(OneOrMany::Many(_)) => return Err(ConfigError::new("$.system.gamma", "expected a single rate")),
    };
    EffectiveTwoOscModel::new(
        required(s.omega, "omega")?,
        s.lambda.unwrap_or(0.0),
        gamma,
        s.gamma_bar.unwrap_or(0.0),
        required(s.n1, "n1")?,
        required(s.n2, "n2")?,
        s.n_common.unwrap_or(0.0),
    )
    .map_err(|e| ConfigError::new("$.system", e))
}

fn resolve_array(s: &SystemConfig) -> Result<ValidatedSpec, ConfigError> {
    let lists = [("gamma", &s.gamma), ("n_bath", &s.n_bath), ("g", &s.g)];
    let n = match s.n_elements {
        Some(n) => n,
        None => lists
            .iter()
            .find_map(|(_, v)| match v {
                Some(OneOrMany::Many(xs)) => Some(xs.len()),
                _ => None,
            })
            .ok_or_else(|| ConfigError::new("$.system.n_elements", "missing field"))?,
    };
    if n == 0 {
        return Err(ConfigError::new("$.system.n_elements", "must be >= 1"));
    }
    let expand = |key: &str, v: &Option<OneOrMany>, default: Option<f64>| -> Result<Vec<f64>, ConfigError> {
        match v {
            None => default
                .map(|d| vec![d; n])
                .ok_or_else(|| ConfigError::new(format!("$.system.{key}"), "missing field")),
            Some(OneOrMany::One(x)) => Ok(vec![*x; n]),
            Some(OneOrMany::Many(xs)) if xs.len() == n => Ok(xs.clone()),
            Some(OneOrMany::Many(xs)) => Err(ConfigError::new(
                format!("$.system.{key}"),
                format!("expected {n} entries, got {}", xs.len()),
            )),
        }
    };
    let gamma = expand("gamma", &s.gamma, Some(1.0))?;
    let n_bath = expand("n_bath", &s.n_bath, None)?;
    let g = match (&s.g, s.profile) {
        (None, _) => return Err(ConfigError::new("$.system.g", "missing field")),
        (Some(OneOrMany::Many(_)), Some(_)) => {
            return Err(ConfigError::new("$.system.profile", "only valid with a scalar collective g"))
        }
        (Some(OneOrMany::Many(_)), None) => expand("g", &s.g, None)?,
        (Some(OneOrMany::One(g)), None | Some(CouplingProfile::Uniform)) => vec![g / (n as f64).sqrt(); n],
        (Some(OneOrMany::One(g)), Some(CouplingProfile::Transmissive)) => {
            transmissive_couplings(n, *g).map_err(|e| ConfigError::new("$.system.profile", e))?
        }
    };
    ArraySpec {
        n_elements: n,
        omega: required(s.omega, "omega")?,
        detuning: required(s.detuning, "detuning")?,
        kappa: required(s.kappa, "kappa")?,
        gamma,
        n_bath,
        g,
    }
    .validate()
    .map_err(|e| ConfigError::new("$.system", e))
}
