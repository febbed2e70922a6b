//! Stick-slip ratchet driven by snap events.
//!
//! A snap releases the beam energy into the attached mass, which merges
//! inelastically with the body; the robot then glides forward against
//! Coulomb friction `mu_f * (M + m) * g` until it stops. Backward recoil is
//! taken as fully stuck under the larger backward coefficient, so the robot
//! only ever moves forward and only at snap events.

use serde::{Deserialize, Serialize};

use crate::beam;
use crate::error::{require_positive, Error, Result};
use crate::oscillator::{self, OscillatorConfig, SnapKind};
use crate::trace::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotParams {
    /// Robot mass without the attached mass (`M`).
    pub body_mass_kg: f64,
    /// Mass carried by the beam (`m`).
    pub attached_mass_kg: f64,
    pub mu_forward: f64,
    pub mu_backward: f64,
    /// Fraction of the released beam energy that becomes kinetic energy.
    pub efficiency: f64,
    pub gravity_m_s2: f64,
    /// Velocity scale applied to snap-through impulses relative to snap-back.
    pub thru_velocity_factor: f64,
}

impl Default for RobotParams {
    /// 3.8 g robot including a 2 g tin mass, friction measured as 0.36
    /// forward and 0.72 backward.
    fn default() -> Self {
        RobotParams {
            body_mass_kg: 1.8e-3,
            attached_mass_kg: 2.0e-3,
            mu_forward: 0.36,
            mu_backward: 0.72,
            efficiency: 1.0,
            gravity_m_s2: 9.81,
            thru_velocity_factor: 1.0,
        }
    }
}

impl RobotParams {
    pub fn validate(&self) -> Result<()> {
        require_positive("body_mass_kg", self.body_mass_kg)?;
        require_positive("attached_mass_kg", self.attached_mass_kg)?;
        require_positive("mu_forward", self.mu_forward)?;
        require_positive("mu_backward", self.mu_backward)?;
        require_positive("gravity_m_s2", self.gravity_m_s2)?;
        let invalid = |name: &str, reason: &str| Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.to_string(),
        };
        if self.mu_forward > self.mu_backward {
            return Err(invalid("mu_forward", "must not exceed mu_backward"));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(invalid("efficiency", "must lie in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.thru_velocity_factor) {
            return Err(invalid("thru_velocity_factor", "must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn total_mass_kg(&self) -> f64 {
        self.body_mass_kg + self.attached_mass_kg
    }

    /// Normal force of the whole robot on the substrate.
    pub fn normal_force_n(&self) -> f64 {
        self.total_mass_kg() * self.gravity_m_s2
    }

    pub fn with_attached_mass(&self, attached_mass_kg: f64) -> RobotParams {
        RobotParams {
            attached_mass_kg,
            ..*self
        }
    }
}

/// Forward displacement produced by one snap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrawlStep {
    pub time_s: f64,
    pub kind: SnapKind,
    pub distance_m: f64,
}

/// Body velocity right after the attached mass merges with the body.
///
/// The mass leaves the snap with speed `sqrt(2 * eta * E / m)`; momentum
/// conservation over `M + m` scales that by `m / (M + m)`.
pub fn snap_impulse_velocity(energy_j: f64, r: &RobotParams, kind: SnapKind) -> Result<f64> {
    require_positive("energy_J", energy_j)?;
    let m = r.attached_mass_kg;
    let mass_speed = (2.0 * r.efficiency * energy_j / m).sqrt();
    let v = mass_speed * m / r.total_mass_kg();
    Ok(match kind {
        SnapKind::SnapBack => v,
        SnapKind::SnapThrough => v * r.thru_velocity_factor,
    })
}

/// Distance covered while forward friction decelerates the body to rest.
pub fn glide_distance(v_init: f64, r: &RobotParams) -> f64 {
    let v = v_init.max(0.0);
    v * v / (2.0 * r.mu_forward * r.gravity_m_s2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrawlRun {
    pub trace: Trace,
    pub steps: Vec<CrawlStep>,
}

pub fn simulate_crawl(osc: &OscillatorConfig, r: &RobotParams, duration_s: f64) -> Result<CrawlRun> {
    r.validate().map_err(|e| Error::InvalidConfig(format!("robot: {e}")))?;
    let energy = beam::released_energy(&osc.beam);
    let back = glide_distance(snap_impulse_velocity(energy, r, SnapKind::SnapBack)?, r);
    let thru = glide_distance(snap_impulse_velocity(energy, r, SnapKind::SnapThrough)?, r);
    let mut steps = Vec::new();
    let run = oscillator::run(osc, duration_s, |ev| {
        let d = match ev.kind {
            SnapKind::SnapBack => back,
            SnapKind::SnapThrough => thru,
        };
        steps.push(CrawlStep {
            time_s: ev.time_s,
            kind: ev.kind,
            distance_m: d,
        });
        Some(d)
    })?;
    Ok(CrawlRun {
        trace: run.trace,
        steps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepSummary {
    pub mean_back_m: f64,
    pub mean_thru_m: f64,
    /// `mean_back_m + mean_thru_m`, the advance per oscillation cycle.
    pub mean_cycle_m: f64,
}

/// Mean displacement per snap kind. A kind with no steps contributes 0.
pub fn step_decomposition(steps: &[CrawlStep]) -> Result<StepSummary> {
    if steps.is_empty() {
        return Err(Error::EmptySteps);
    }
    let mean_of = |kind: SnapKind| {
        let (sum, n) = steps
            .iter()
            .filter(|s| s.kind == kind)
            .fold((0.0, 0usize), |(sum, n), s| (sum + s.distance_m, n + 1));
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    };
    let back = mean_of(SnapKind::SnapBack);
    let thru = mean_of(SnapKind::SnapThrough);
    Ok(StepSummary {
        mean_back_m: back,
        mean_thru_m: thru,
        mean_cycle_m: back + thru,
    })
}
