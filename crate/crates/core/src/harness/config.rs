use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bandit::{RadiusMode, UcbParams};
use crate::env::{SyntheticSpec, DEFAULT_GAP};
use crate::error::{Error, Result};
use crate::policy::{adaptive_schedule, PolicyKind};
use crate::reward::dyadic_exponent;

/// Grid gap for the planning discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapSetting {
    Fixed(f64),
    /// Run `lizard` with scheduled refinement; the base grid is the final
    /// gap of the schedule.
    Adaptive,
}

impl fmt::Display for GapSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapSetting::Fixed(g) => write!(f, "{g}"),
            GapSetting::Adaptive => f.write_str("adaptive"),
        }
    }
}

impl Serialize for GapSetting {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GapSetting::Fixed(g) => s.serialize_f64(*g),
            GapSetting::Adaptive => s.serialize_str("adaptive"),
        }
    }
}

impl<'de> Deserialize<'de> for GapSetting {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(g) => Ok(GapSetting::Fixed(g)),
            Raw::Int(g) => Ok(GapSetting::Fixed(g as f64)),
            Raw::Text(s) if s == "adaptive" => Ok(GapSetting::Adaptive),
            Raw::Text(s) => s
                .parse()
                .map(GapSetting::Fixed)
                .map_err(|_| serde::de::Error::custom(format!("gap must be a number or `adaptive`, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadiusKind {
    Theory,
    Epsilon,
}

/// Flat experiment configuration. Every key has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_targets: usize,
    pub budget: f64,
    pub horizon: u64,
    pub history_steps: usize,
    pub policies: Vec<String>,
    pub trials: u64,
    pub seed: u64,
    pub radius_mode: RadiusKind,
    pub epsilon: f64,
    pub use_monotonicity: bool,
    pub use_zero_anchor: bool,
    pub use_cross_target: bool,
    /// Lipschitz constant handed to the policies instead of the instance's.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lipschitz_override: Option<f64>,
    pub gap: GapSetting,
    pub bias_weight: f64,
    pub segments_min: usize,
    pub segments_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_grid_step: Option<f64>,
    /// Also dump the per-round bound tables.
    pub verbose: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_targets: 25,
            budget: 1.0,
            horizon: 500,
            history_steps: 50,
            policies: ["lizard", "cucb", "zooming", "exploit"].map(String::from).to_vec(),
            trials: 30,
            seed: 0,
            radius_mode: RadiusKind::Epsilon,
            epsilon: 0.1,
            use_monotonicity: true,
            use_zero_anchor: true,
            use_cross_target: true,
            lipschitz_override: None,
            gap: GapSetting::Fixed(DEFAULT_GAP),
            bias_weight: 3.0,
            segments_min: 4,
            segments_max: 6,
            optimal_grid_step: None,
            verbose: false,
        }
    }
}

/// Instance Lipschitz constant of the synthetic generator.
pub const SYNTHETIC_LIPSCHITZ: f64 = 1.0;

/// Names accepted in `policies` besides the [`PolicyKind`] names.
pub const ORACLE_POLICY: &str = "oracle";

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Overrides one key from its textual value. Values are read as TOML
    /// literals, falling back to plain strings; `policies` also accepts a
    /// comma-separated list.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let parsed = if key == "policies" && !value.trim_start().starts_with('[') {
            toml::Value::Array(
                value
                    .split(',')
                    .map(|s| toml::Value::String(s.trim().to_string()))
                    .filter(|v| v.as_str() != Some(""))
                    .collect(),
            )
        } else {
            toml::from_str::<toml::Table>(&format!("v = {value}"))
                .ok()
                .and_then(|mut t| t.remove("v"))
                .unwrap_or_else(|| toml::Value::String(value.to_string()))
        };
        let mut table = toml::Table::try_from(&*self).expect("config serializes");
        if !FIELD_NAMES.contains(&key) {
            return Err(Error::Config(format!("unknown configuration key `{key}`")));
        }
        table.insert(key.to_string(), parsed);
        *self = table
            .try_into()
            .map_err(|e| Error::Config(format!("bad value `{value}` for `{key}`: {e}")))?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_targets == 0 {
            return bad("n_targets must be at least 1".into());
        }
        if !(self.budget >= 0.0 && self.budget <= self.n_targets as f64) {
            return bad(format!("budget {} must lie in [0, n_targets]", self.budget));
        }
        if self.horizon == 0 {
            return bad("horizon must be at least 1".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.policies.is_empty() {
            return bad("no policies given".into());
        }
        for p in &self.policies {
            if p != ORACLE_POLICY {
                p.parse::<PolicyKind>()?;
            }
        }
        if self.radius_mode == RadiusKind::Epsilon && !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon {} must be positive", self.epsilon));
        }
        if let Some(l) = self.lipschitz_override {
            if !(l > 0.0) {
                return bad(format!("lipschitz_override {l} must be positive"));
            }
        }
        if let GapSetting::Fixed(g) = self.gap {
            dyadic_exponent(g).map_err(|e| Error::Config(format!("gap: {e}")))?;
        }
        if self.segments_min == 0 || self.segments_min > self.segments_max {
            return bad("segments_min must be in [1, segments_max]".into());
        }
        if !self.bias_weight.is_finite() {
            return bad("bias_weight must be finite".into());
        }
        Ok(())
    }

    pub fn policy_lipschitz(&self) -> f64 {
        self.lipschitz_override.unwrap_or(SYNTHETIC_LIPSCHITZ)
    }

    pub fn radius(&self) -> RadiusMode {
        match self.radius_mode {
            RadiusKind::Theory => RadiusMode::Theory,
            RadiusKind::Epsilon => RadiusMode::Epsilon(self.epsilon),
        }
    }

    pub fn ucb_params(&self) -> UcbParams {
        UcbParams {
            use_monotonicity: self.use_monotonicity,
            use_zero_anchor: self.use_zero_anchor,
            use_cross_target: self.use_cross_target,
            ..UcbParams::lizard(self.radius(), self.policy_lipschitz())
        }
    }

    /// Gap of the planning grid shared by history, baselines and fixed LIZARD.
    pub fn base_gap(&self) -> f64 {
        match self.gap {
            GapSetting::Fixed(g) => g,
            GapSetting::Adaptive => {
                adaptive_schedule(self.n_targets, self.policy_lipschitz(), self.horizon).final_gap()
            }
        }
    }

    pub fn synthetic_spec(&self) -> SyntheticSpec {
        SyntheticSpec {
            n_targets: self.n_targets,
            segments: self.segments_min..=self.segments_max,
            budget: self.budget,
            gap: self.base_gap(),
            lipschitz_constant: SYNTHETIC_LIPSCHITZ,
            ..SyntheticSpec::default()
        }
    }
}

pub const FIELD_NAMES: &[&str] = &[
    "n_targets",
    "budget",
    "horizon",
    "history_steps",
    "policies",
    "trials",
    "seed",
    "radius_mode",
    "epsilon",
    "use_monotonicity",
    "use_zero_anchor",
    "use_cross_target",
    "lipschitz_override",
    "gap",
    "bias_weight",
    "segments_min",
    "segments_max",
    "optimal_grid_step",
    "verbose",
];
