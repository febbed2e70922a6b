//! Bistable buckled beam modeled as a symmetric quartic double well.
//!
//! `U(x) = E_b * ((x/a)^2 - 1)^2` has minima at `x = ±a` and a barrier of
//! height `E_b` at `x = 0`. Only the barrier energy and the well separation
//! enter the locomotion model, so no elastica is solved here.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Result};

/// Which stable well the beam center currently sits in.
///
/// `State1` is the left well (`x < 0`), `State2` the right well (`x > 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Well {
    State1,
    State2,
}

impl Well {
    pub fn opposite(self) -> Well {
        match self {
            Well::State1 => Well::State2,
            Well::State2 => Well::State1,
        }
    }

    /// Resting position of the beam center in this well.
    pub fn rest_position(self, p: &BeamParams) -> f64 {
        match self {
            Well::State1 => -p.half_separation_m,
            Well::State2 => p.half_separation_m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamParams {
    /// Barrier (stored bending) energy released by one snap, in joules.
    #[serde(rename = "barrier_energy_J")]
    pub barrier_energy_j: f64,
    /// Distance from the center to either stable state, in meters.
    pub half_separation_m: f64,
}

impl BeamParams {
    pub fn new(barrier_energy_j: f64, half_separation_m: f64) -> Result<Self> {
        let p = BeamParams {
            barrier_energy_j,
            half_separation_m,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("barrier_energy_J", self.barrier_energy_j)?;
        require_positive("half_separation_m", self.half_separation_m)
    }
}

impl Default for BeamParams {
    /// 0.5 mm half travel gives the ~1 mm peak-to-peak output motion of the
    /// physical oscillator; the energy is the calibrated reference value.
    fn default() -> Self {
        BeamParams {
            barrier_energy_j: 1.75e-5,
            half_separation_m: 0.5e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamState {
    pub position_m: f64,
    pub well: Well,
}

impl BeamState {
    /// Beam resting at the bottom of `well`.
    pub fn at_rest(well: Well, p: &BeamParams) -> Self {
        BeamState {
            position_m: well.rest_position(p),
            well,
        }
    }

    /// Instantaneous transition into the opposite well.
    pub fn snapped(&self, p: &BeamParams) -> Self {
        BeamState::at_rest(self.well.opposite(), p)
    }
}

pub fn potential(x: f64, p: &BeamParams) -> f64 {
    let r = x / p.half_separation_m;
    let w = r * r - 1.0;
    p.barrier_energy_j * w * w
}

/// `-dU/dx`.
pub fn restoring_force(x: f64, p: &BeamParams) -> f64 {
    let a = p.half_separation_m;
    let r = x / a;
    -4.0 * p.barrier_energy_j * x * (r * r - 1.0) / (a * a)
}

/// Peak restoring force on one branch, reached at `|x| = a/sqrt(3)`.
///
/// A pull at least this large drives the beam over the barrier.
pub fn critical_force(p: &BeamParams) -> f64 {
    8.0 * p.barrier_energy_j / (3.0 * 3.0_f64.sqrt() * p.half_separation_m)
}

pub fn released_energy(p: &BeamParams) -> f64 {
    p.barrier_energy_j
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> BeamParams {
        BeamParams::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn potential_minima_and_barrier() {
        let p = BeamParams::new(3.0, 0.2).unwrap();
        assert_eq!(potential(0.2, &p), 0.0);
        assert_eq!(potential(-0.2, &p), 0.0);
        assert_eq!(potential(0.0, &unit()), 1.0);
        assert_eq!(potential(0.0, &p) - potential(0.2, &p), 3.0);
    }

    #[test]
    fn potential_half_way() {
        // ((0.5)^2 - 1)^2 = 0.5625
        assert_relative_eq!(potential(0.5, &unit()), 0.5625, max_relative = 1e-15);
    }

    #[test]
    fn force_zeros() {
        let p = BeamParams::new(2.0, 0.3).unwrap();
        for x in [-0.3, 0.0, 0.3] {
            assert!(restoring_force(x, &p).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_force_values() {
        assert_relative_eq!(critical_force(&unit()), 1.539_600_717_839_002, max_relative = 1e-12);
        let p2 = BeamParams::new(2.0, 1.0).unwrap();
        assert_relative_eq!(critical_force(&p2), 2.0 * critical_force(&unit()), max_relative = 1e-15);
        let small = BeamParams::new(1.0, 0.0005).unwrap();
        assert_relative_eq!(critical_force(&small), 3_079.201_435_678_004, max_relative = 1e-12);
    }

    #[test]
    fn released_energy_ignores_separation() {
        let a = BeamParams::new(17.5e-6, 0.5e-3).unwrap();
        let b = BeamParams::new(17.5e-6, 2.0e-3).unwrap();
        assert_eq!(released_energy(&a), 17.5e-6);
        assert_eq!(released_energy(&a), released_energy(&b));
    }

    #[test]
    fn construction_rejects_nonpositive() {
        assert!(BeamParams::new(0.0, 1.0).is_err());
        assert!(BeamParams::new(1.0, -1.0).is_err());
        assert!(BeamParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn snapping_toggles_well() {
        let p = BeamParams::default();
        let s = BeamState::at_rest(Well::State1, &p);
        assert!(s.position_m < 0.0);
        let t = s.snapped(&p);
        assert_eq!(t.well, Well::State2);
        assert_eq!(t.position_m, p.half_separation_m);
    }
}
