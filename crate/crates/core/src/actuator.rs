//! Lumped electro-thermal model of one super-coiled polymer actuator.
//!
//! `C_th * dT/dt = [powered] * I^2 R - h * (T - T_amb)`, stepped exactly.
//! Tension grows linearly with the temperature rise and is never negative.

use serde::{Deserialize, Serialize};

use crate::error::{require_nonnegative, require_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorParams {
    pub resistance_ohm: f64,
    #[serde(rename = "thermal_capacitance_J_per_K")]
    pub thermal_capacitance_j_per_k: f64,
    /// Newtonian loss coefficient, including forced-air cooling.
    #[serde(rename = "heat_loss_W_per_K")]
    pub heat_loss_w_per_k: f64,
    #[serde(rename = "tension_coeff_N_per_K")]
    pub tension_coeff_n_per_k: f64,
    #[serde(rename = "ambient_K")]
    pub ambient_k: f64,
}

impl ActuatorParams {
    pub fn validate(&self) -> Result<()> {
        require_positive("resistance_ohm", self.resistance_ohm)?;
        require_positive("thermal_capacitance_J_per_K", self.thermal_capacitance_j_per_k)?;
        require_positive("heat_loss_W_per_K", self.heat_loss_w_per_k)?;
        require_positive("tension_coeff_N_per_K", self.tension_coeff_n_per_k)?;
        require_positive("ambient_K", self.ambient_k)
    }

    /// Thermal time constant `C_th / h`.
    pub fn time_constant_s(&self) -> f64 {
        self.thermal_capacitance_j_per_k / self.heat_loss_w_per_k
    }

    pub fn template(&self) -> ActuatorTemplate {
        ActuatorTemplate {
            resistance_ohm: self.resistance_ohm,
            thermal_capacitance_j_per_k: self.thermal_capacitance_j_per_k,
            tension_coeff_n_per_k: self.tension_coeff_n_per_k,
            ambient_k: self.ambient_k,
        }
    }
}

impl Default for ActuatorParams {
    /// Measured 3.8 ohm resistance and ~22 C cooling air. The heat loss is
    /// the value fitted to a 3.4 s oscillation at 0.62 A with the default
    /// beam; capacitance and tension slope are chosen, not measured.
    fn default() -> Self {
        ActuatorTemplate::default().with_heat_loss(DEFAULT_HEAT_LOSS_W_PER_K)
    }
}

/// Heat loss fitted by `analytic::calibrate_thermal` for the default
/// template, beam, 0.62 A supply and a 3.4 s target period.
pub const DEFAULT_HEAT_LOSS_W_PER_K: f64 = 0.050_919_064_414_461;

/// Actuator parameters with the heat-loss coefficient left free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorTemplate {
    pub resistance_ohm: f64,
    #[serde(rename = "thermal_capacitance_J_per_K")]
    pub thermal_capacitance_j_per_k: f64,
    #[serde(rename = "tension_coeff_N_per_K")]
    pub tension_coeff_n_per_k: f64,
    #[serde(rename = "ambient_K")]
    pub ambient_k: f64,
}

impl ActuatorTemplate {
    pub fn with_heat_loss(&self, heat_loss_w_per_k: f64) -> ActuatorParams {
        ActuatorParams {
            resistance_ohm: self.resistance_ohm,
            thermal_capacitance_j_per_k: self.thermal_capacitance_j_per_k,
            heat_loss_w_per_k,
            tension_coeff_n_per_k: self.tension_coeff_n_per_k,
            ambient_k: self.ambient_k,
        }
    }
}

impl Default for ActuatorTemplate {
    fn default() -> Self {
        ActuatorTemplate {
            resistance_ohm: 3.8,
            thermal_capacitance_j_per_k: 0.025,
            tension_coeff_n_per_k: 0.002,
            ambient_k: 295.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorState {
    pub temperature_k: f64,
    pub powered: bool,
}

impl ActuatorState {
    pub fn ambient(p: &ActuatorParams) -> Self {
        ActuatorState {
            temperature_k: p.ambient_k,
            powered: false,
        }
    }
}

/// Joule heating `I^2 R`.
pub fn electrical_power(current_a: f64, p: &ActuatorParams) -> f64 {
    current_a * current_a * p.resistance_ohm
}

pub fn equilibrium_temp(current_a: f64, powered: bool, p: &ActuatorParams) -> f64 {
    if powered {
        p.ambient_k + electrical_power(current_a, p) / p.heat_loss_w_per_k
    } else {
        p.ambient_k
    }
}

/// Advances the temperature by `dt_s` using the exact solution of the linear ODE.
pub fn step_thermal(s: &ActuatorState, current_a: f64, dt_s: f64, p: &ActuatorParams) -> Result<ActuatorState> {
    require_positive("dt_s", dt_s)?;
    require_nonnegative("current_A", current_a)?;
    Ok(advance(s, current_a, dt_s, p))
}

/// Unchecked exact update; `dt_s` may be zero.
pub(crate) fn advance(s: &ActuatorState, current_a: f64, dt_s: f64, p: &ActuatorParams) -> ActuatorState {
    let t_eq = equilibrium_temp(current_a, s.powered, p);
    let decay = (-dt_s / p.time_constant_s()).exp();
    ActuatorState {
        temperature_k: t_eq + (s.temperature_k - t_eq) * decay,
        powered: s.powered,
    }
}

pub fn tension(s: &ActuatorState, p: &ActuatorParams) -> f64 {
    (p.tension_coeff_n_per_k * (s.temperature_k - p.ambient_k)).max(0.0)
}

/// Time for a powered actuator starting at ambient to rise by `rise_k`.
///
/// `None` when the equilibrium rise `I^2 R / h` does not exceed `rise_k`.
pub fn heating_time(rise_k: f64, current_a: f64, p: &ActuatorParams) -> Option<f64> {
    let q = electrical_power(current_a, p);
    let loss = p.heat_loss_w_per_k * rise_k;
    if loss >= q {
        return None;
    }
    Some(p.time_constant_s() * (q / (q - loss)).ln())
}

pub(crate) fn side_error(side: &'static str, pull: f64, critical: f64) -> Error {
    Error::NoOscillation {
        side,
        equilibrium_pull_n: pull,
        critical_force_n: critical,
        shortfall_n: critical - pull,
    }
}
