//! JSON scenario files: one complete, reviewable description of a run.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analytic::{SpeedModel, SpeedModelInput};
use crate::error::{Error, Result};
use crate::locomotion::RobotParams;
use crate::oscillator::OscillatorConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub oscillator: OscillatorConfig,
    pub robot: RobotParams,
    pub model: SpeedModel,
    pub duration_s: f64,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default)]
    pub targets: Targets,
    /// Dotted paths of parameters that were fitted rather than measured.
    #[serde(default)]
    pub calibrated: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary_json: Option<String>,
}

/// Measured values a scenario is calibrated against or compared with.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Targets {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub avg_speed_m_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oscillation_period_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured_displacement_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured_duration_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_bounds_kg: Option<[f64; 2]>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            name: None,
            oscillator: OscillatorConfig::default(),
            robot: RobotParams::default(),
            model: SpeedModel::default(),
            duration_s: 60.0,
            output: OutputPaths::default(),
            targets: Targets::default(),
            calibrated: Vec::new(),
        }
    }
}

fn qualify(prefix: &str, e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => Error::InvalidConfig(format!("{prefix}.{name}: {reason}")),
        Error::InvalidConfig(msg) => Error::InvalidConfig(format!("{prefix}: {msg}")),
        other => other,
    }
}

impl ScenarioConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::InvalidConfig(format!("{path}: {}", e.into_inner()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Checks every module invariant, reporting the offending key path.
    pub fn validate(&self) -> Result<()> {
        self.oscillator.validate().map_err(|e| qualify("oscillator", e))?;
        self.robot.validate().map_err(|e| qualify("robot", e))?;
        self.speed_input().validate().map_err(|e| qualify("model", e))?;
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "duration_s: must be finite and > 0, got {}",
                self.duration_s
            )));
        }
        if let Some([lo, hi]) = self.targets.mass_bounds_kg {
            if !(lo > 0.0 && lo < hi) {
                return Err(Error::InvalidConfig(format!(
                    "targets.mass_bounds_kg: need 0 < lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        let echo = serde_json::to_value(self).expect("scenario serializes");
        for path in &self.calibrated {
            if lookup(&echo, path).is_none() {
                return Err(Error::InvalidConfig(format!(
                    "calibrated: unknown parameter path {path:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn speed_input(&self) -> SpeedModelInput {
        SpeedModelInput::new(self.robot, self.model)
    }

    /// `(path, value, calibrated: true)` records for every fitted parameter.
    pub fn calibrated_parameters(&self) -> Vec<Value> {
        let echo = serde_json::to_value(self).expect("scenario serializes");
        self.calibrated
            .iter()
            .map(|p| {
                serde_json::json!({
                    "path": p,
                    "value": lookup(&echo, p).cloned().unwrap_or(Value::Null),
                    "calibrated": true,
                })
            })
            .collect()
    }

    pub fn mark_calibrated(&mut self, path: &str) {
        if !self.calibrated.iter().any(|p| p == path) {
            self.calibrated.push(path.to_string());
        }
    }
}

fn lookup<'a>(v: &'a Value, dotted: &str) -> Option<&'a Value> {
    dotted.split('.').try_fold(v, |cur, key| cur.get(key))
}
