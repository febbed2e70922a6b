//! Closed-form average-speed model, calibration, and attached-mass design.
//!
//! Two forms of the average speed are kept side by side:
//!
//! * the *composed* model, `2 * s / T` with `s` the glide distance after one
//!   snap impulse, which simplifies to `2 ηE m / (μ g (M+m)^2 T)`;
//! * the *printed* closed form `2 ηE / (μ g (M/m + 1)^2 T)`.
//!
//! They differ by a factor of `m` (in kilograms), so the printed form is not
//! a velocity. Both are reported; only the printed form reproduces the
//! published 2.2x speed-reduction figure for 2 g -> 1 g.

use serde::{Deserialize, Serialize};

use crate::actuator::{ActuatorParams, ActuatorTemplate};
use crate::beam::{self, BeamParams};
use crate::error::{require_positive, Error, Result};
use crate::locomotion::{self, RobotParams};
use crate::oscillator::{self, OscillatorConfig, SnapKind};

/// Measured: 146.0 mm in 350.1 s with the 2 g mass.
pub const MEASURED_SPEED_2G_M_S: f64 = 0.146 / 350.1;
/// Measured: 39 mm in 4 minutes with the 1 g mass.
pub const MEASURED_SPEED_1G_M_S: f64 = 0.039 / 240.0;

/// Energy and period inputs of the speed model; stored in scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeedModel {
    /// Fused efficiency-times-energy, the only identifiable energy quantity.
    #[serde(rename = "eta_E_J")]
    pub eta_e_j: f64,
    pub period_s: f64,
}

impl Default for SpeedModel {
    fn default() -> Self {
        SpeedModel {
            eta_e_j: 1.75e-5,
            period_s: 3.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedModelInput {
    pub robot: RobotParams,
    pub eta_e_j: f64,
    pub period_s: f64,
}

impl SpeedModelInput {
    pub fn new(robot: RobotParams, model: SpeedModel) -> Self {
        SpeedModelInput {
            robot,
            eta_e_j: model.eta_e_j,
            period_s: model.period_s,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.robot.validate()?;
        require_positive("eta_E_J", self.eta_e_j)?;
        require_positive("period_s", self.period_s)
    }

    pub fn with_attached_mass(&self, m: f64) -> Self {
        SpeedModelInput {
            robot: self.robot.with_attached_mass(m),
            ..*self
        }
    }

    fn friction_factor(&self) -> f64 {
        self.robot.mu_forward * self.robot.gravity_m_s2 * self.period_s
    }
}

/// Average speed of the composed impulse-glide model, in m/s.
pub fn avg_speed_composed(input: &SpeedModelInput) -> f64 {
    let r = &input.robot;
    let total = r.total_mass_kg();
    2.0 * input.eta_e_j * r.attached_mass_kg / (input.friction_factor() * total * total)
}

/// Same model evaluated by chaining the per-snap impulse and glide.
pub fn avg_speed_by_composition(input: &SpeedModelInput) -> Result<f64> {
    let fused = RobotParams {
        efficiency: 1.0,
        ..input.robot
    };
    let v = locomotion::snap_impulse_velocity(input.eta_e_j, &fused, SnapKind::SnapBack)?;
    Ok(2.0 * locomotion::glide_distance(v, &fused) / input.period_s)
}

/// The printed closed form, evaluated verbatim. Its value equals
/// `m * avg_speed_composed` and carries units of kg*m/s.
pub fn avg_speed_printed(input: &SpeedModelInput) -> f64 {
    let r = &input.robot;
    let w = r.body_mass_kg / r.attached_mass_kg + 1.0;
    2.0 * input.eta_e_j / (input.friction_factor() * w * w)
}

/// `printed(m1) / printed(m2)`.
pub fn speed_ratio_printed(shared: &SpeedModelInput, m1: f64, m2: f64) -> Result<f64> {
    require_positive("m1", m1)?;
    require_positive("m2", m2)?;
    Ok(avg_speed_printed(&shared.with_attached_mass(m1)) / avg_speed_printed(&shared.with_attached_mass(m2)))
}

/// `composed(m1) / composed(m2)`.
pub fn speed_ratio_composed(shared: &SpeedModelInput, m1: f64, m2: f64) -> Result<f64> {
    require_positive("m1", m1)?;
    require_positive("m2", m2)?;
    Ok(avg_speed_composed(&shared.with_attached_mass(m1)) / avg_speed_composed(&shared.with_attached_mass(m2)))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` on `[lo, hi]`, stopping once the
/// bracket is narrower than `tol`.
fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Attached mass that maximizes the composed average speed within `bounds`.
pub fn optimize_attached_mass(shared: &SpeedModelInput, bounds: (f64, f64)) -> Result<f64> {
    let (lo, hi) = bounds;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return Err(Error::InvalidBounds { lo, hi });
    }
    let speed = |m: f64| avg_speed_composed(&shared.with_attached_mass(m));
    let interior = golden_section_max(speed, lo, hi, 1e-9 * hi);
    let best = [lo, hi]
        .into_iter()
        .fold(interior, |best, x| if speed(x) > speed(best) { x } else { best });
    Ok(best)
}

/// Fused `ηE` that makes the composed model hit `measured_speed`.
pub fn calibrate_eta_e(measured_speed: f64, r: &RobotParams, period_s: f64) -> Result<f64> {
    require_positive("measured_speed", measured_speed)?;
    require_positive("period_s", period_s)?;
    let total = r.total_mass_kg();
    Ok(measured_speed * r.mu_forward * r.gravity_m_s2 * total * total * period_s / (2.0 * r.attached_mass_kg))
}

enum PeriodProbe {
    Period(f64),
    /// Never snaps, or slower than the probe window allows.
    TooLong,
}

fn probe_period(cfg: &OscillatorConfig, window_s: f64) -> Result<PeriodProbe> {
    match oscillator::simulate_oscillator(cfg, window_s) {
        Ok(run) if run.events.len() >= 3 => Ok(PeriodProbe::Period(oscillator::measure_period(&run.events)?)),
        Ok(_) | Err(Error::NoOscillation { .. }) => Ok(PeriodProbe::TooLong),
        Err(e) => Err(e),
    }
}

/// Fits the heat-loss coefficient `h` (shared by both actuators) so the
/// simulated oscillation period equals `target_period_s`.
///
/// The period grows monotonically with `h` from `4 C_th F_c / (k_T I^2 R)`
/// at `h -> 0` to infinity at `h = k_T I^2 R / F_c`, where the equilibrium
/// pull drops to the critical force. The bracket is bisected in log space.
pub fn calibrate_thermal(
    target_period_s: f64,
    current_a: f64,
    fixed: &ActuatorTemplate,
    beam_params: &BeamParams,
    dt_s: f64,
) -> Result<ActuatorParams> {
    require_positive("target_period_s", target_period_s)?;
    require_positive("current_A", current_a)?;
    require_positive("dt_s", dt_s)?;
    beam_params.validate()?;
    fixed.with_heat_loss(1.0).validate()?;

    let critical = beam::critical_force(beam_params);
    let power = current_a * current_a * fixed.resistance_ohm;
    let h_max = fixed.tension_coeff_n_per_k * power / critical;
    let h_min = h_max * 1e-9;
    let window = 5.0 * target_period_s;
    let config = |h: f64| OscillatorConfig {
        beam: *beam_params,
        left: fixed.with_heat_loss(h),
        right: fixed.with_heat_loss(h),
        supply_current_a: current_a,
        dt_s,
        initial_well: beam::Well::State1,
    };

    match probe_period(&config(h_min), window)? {
        PeriodProbe::Period(p) if p > target_period_s => {
            return Err(Error::Unachievable(format!(
                "shortest reachable period is {p:.6} s, above target {target_period_s} s"
            )))
        }
        PeriodProbe::TooLong => {
            return Err(Error::Unachievable(
                "no heat-loss value in the bracket oscillates".into(),
            ))
        }
        PeriodProbe::Period(_) => {}
    }

    let (mut lo, mut hi) = (h_min.ln(), h_max.ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo < 1e-14 {
            break;
        }
        match probe_period(&config(mid.exp()), window)? {
            PeriodProbe::Period(p) if p <= target_period_s => lo = mid,
            _ => hi = mid,
        }
    }
    let h = lo.exp();
    match probe_period(&config(h), window)? {
        PeriodProbe::Period(p) if ((p - target_period_s) / target_period_s).abs() <= 1e-3 => {
            Ok(fixed.with_heat_loss(h))
        }
        PeriodProbe::Period(p) => Err(Error::Unachievable(format!(
            "bracket exhausted at period {p} s for target {target_period_s} s"
        ))),
        PeriodProbe::TooLong => Err(Error::Unachievable("bracket exhausted".into())),
    }
}

/// Model predictions for the 1 g robot next to the measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OneGramReport {
    /// Printed-form figure at 1 g (units kg*m/s, see module docs).
    pub printed_figure: f64,
    pub composed_speed_m_s: f64,
    pub measured_speed_m_s: f64,
    /// printed(2 g) / printed(1 g).
    pub printed_ratio: f64,
    /// composed(2 g) / composed(1 g).
    pub composed_ratio: f64,
    /// measured(2 g) / measured(1 g).
    pub measured_ratio: f64,
}

/// Evaluates both model forms at a 1 g attached mass, keeping everything
/// else from an input calibrated at the 2 g configuration.
pub fn predict_one_gram(calibrated: &SpeedModelInput) -> Result<OneGramReport> {
    calibrated.validate()?;
    let m_cal = calibrated.robot.attached_mass_kg;
    let one = calibrated.with_attached_mass(1e-3);
    Ok(OneGramReport {
        printed_figure: avg_speed_printed(&one),
        composed_speed_m_s: avg_speed_composed(&one),
        measured_speed_m_s: MEASURED_SPEED_1G_M_S,
        printed_ratio: speed_ratio_printed(calibrated, m_cal, 1e-3)?,
        composed_ratio: speed_ratio_composed(calibrated, m_cal, 1e-3)?,
        measured_ratio: MEASURED_SPEED_2G_M_S / MEASURED_SPEED_1G_M_S,
    })
}
