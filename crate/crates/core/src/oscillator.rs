//! Event-driven simulation of the self-sustained oscillator.
//!
//! The beam is quasi-static between snaps. Each biased contact routes the
//! supply current to exactly one actuator, chosen by the beam's well. The
//! powered actuator heats while the other cools; when the net antagonistic
//! pull reaches the beam's critical force the beam snaps into the other
//! well, which swaps the powered side. Temperatures are advanced with the
//! exact exponential solution and snap times are solved inside the step, so
//! event times do not depend on the sample period.

use serde::{Deserialize, Serialize};

use crate::actuator::{self, ActuatorParams, ActuatorState};
use crate::beam::{self, BeamParams, BeamState, Well};
use crate::error::{require_nonnegative, require_positive, Error, Result};
use crate::trace::{Sample, Trace, TraceEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapKind {
    /// State 2 to state 1 (leftward).
    SnapBack,
    /// State 1 to state 2 (rightward).
    SnapThrough,
}

impl SnapKind {
    /// Kind of the snap that leaves `from`.
    pub fn leaving(from: Well) -> SnapKind {
        match from {
            Well::State1 => SnapKind::SnapThrough,
            Well::State2 => SnapKind::SnapBack,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SnapKind::SnapBack => "snap_back",
            SnapKind::SnapThrough => "snap_through",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapEvent {
    pub time_s: f64,
    pub kind: SnapKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorConfig {
    pub beam: BeamParams,
    pub left: ActuatorParams,
    pub right: ActuatorParams,
    #[serde(rename = "supply_current_A")]
    pub supply_current_a: f64,
    pub dt_s: f64,
    /// Well occupied at `t = 0`, with both actuators at ambient.
    #[serde(default = "default_initial_well")]
    pub initial_well: Well,
}

fn default_initial_well() -> Well {
    Well::State1
}

impl Default for OscillatorConfig {
    fn default() -> Self {
        OscillatorConfig {
            beam: BeamParams::default(),
            left: ActuatorParams::default(),
            right: ActuatorParams::default(),
            supply_current_a: 0.62,
            dt_s: 0.01,
            initial_well: Well::State1,
        }
    }
}

impl OscillatorConfig {
    pub fn validate(&self) -> Result<()> {
        let ctx = |prefix: &str, e: Error| match e {
            Error::InvalidParameter { name, reason } => Error::InvalidParameter {
                name: format!("{prefix}.{name}"),
                reason,
            },
            other => other,
        };
        self.beam.validate().map_err(|e| ctx("beam", e))?;
        self.left.validate().map_err(|e| ctx("left", e))?;
        self.right.validate().map_err(|e| ctx("right", e))?;
        require_nonnegative("supply_current_A", self.supply_current_a)?;
        require_positive("dt_s", self.dt_s)
    }

    fn actuator(&self, side: Side) -> &ActuatorParams {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// Steady pull of `side` when powered indefinitely and the opposing
    /// actuator has cooled to ambient.
    pub fn equilibrium_pull(&self, side: Side) -> f64 {
        let p = self.actuator(side);
        let rise = actuator::equilibrium_temp(self.supply_current_a, true, p) - p.ambient_k;
        p.tension_coeff_n_per_k * rise
    }

    /// Fails with `NoOscillation` unless both sides can eventually snap the beam.
    pub fn check_oscillation(&self) -> Result<()> {
        let critical = beam::critical_force(&self.beam);
        let first = powered_side(self.initial_well);
        let second = powered_side(self.initial_well.opposite());
        for side in [first, second] {
            let pull = self.equilibrium_pull(side);
            if pull <= critical {
                return Err(actuator::side_error(side.as_str(), pull, critical));
            }
        }
        Ok(())
    }
}

/// Side whose biased contact is closed in `well`.
pub fn powered_side(well: Well) -> Side {
    match well {
        Well::State1 => Side::Right,
        Well::State2 => Side::Left,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscState {
    pub beam: BeamState,
    pub left: ActuatorState,
    pub right: ActuatorState,
    pub time_s: f64,
}

impl OscState {
    pub fn initial(cfg: &OscillatorConfig) -> Self {
        let mut s = OscState {
            beam: BeamState::at_rest(cfg.initial_well, &cfg.beam),
            left: ActuatorState::ambient(&cfg.left),
            right: ActuatorState::ambient(&cfg.right),
            time_s: 0.0,
        };
        s.route_power();
        s
    }

    pub fn powered(&self) -> Side {
        powered_side(self.beam.well)
    }

    fn route_power(&mut self) {
        let side = self.powered();
        self.left.powered = side == Side::Left;
        self.right.powered = side == Side::Right;
    }

    /// Powered tension minus the opposing (cooling) tension.
    pub fn net_pull(&self, cfg: &OscillatorConfig) -> f64 {
        let l = actuator::tension(&self.left, &cfg.left);
        let r = actuator::tension(&self.right, &cfg.right);
        match self.powered() {
            Side::Left => l - r,
            Side::Right => r - l,
        }
    }

    fn advanced(&self, cfg: &OscillatorConfig, ds: f64) -> OscState {
        OscState {
            beam: self.beam,
            left: actuator::advance(&self.left, cfg.supply_current_a, ds, &cfg.left),
            right: actuator::advance(&self.right, cfg.supply_current_a, ds, &cfg.right),
            time_s: self.time_s + ds,
        }
    }

    fn snap(&mut self, cfg: &OscillatorConfig) -> SnapEvent {
        let kind = SnapKind::leaving(self.beam.well);
        self.beam = self.beam.snapped(&cfg.beam);
        self.route_power();
        SnapEvent {
            time_s: self.time_s,
            kind,
        }
    }

    fn sample(&self, cfg: &OscillatorConfig, robot_x_m: f64) -> Sample {
        Sample {
            time_s: self.time_s,
            beam_x_m: self.beam.well.rest_position(&cfg.beam),
            robot_x_m,
            temp_left_k: self.left.temperature_k,
            temp_right_k: self.right.temperature_k,
            powered: self.powered(),
        }
    }

    /// Offset in `(0, span]` at which the net pull first reaches `critical`,
    /// if it does within `span`.
    fn snap_offset(&self, cfg: &OscillatorConfig, critical: f64, span: f64) -> Option<f64> {
        if self.net_pull(cfg) >= critical {
            return Some(0.0);
        }
        if self.advanced(cfg, span).net_pull(cfg) < critical {
            return None;
        }
        let (pp, up, ps, us) = match self.powered() {
            Side::Left => (&cfg.left, &cfg.right, &self.left, &self.right),
            Side::Right => (&cfg.right, &cfg.left, &self.right, &self.left),
        };
        let tau_p = pp.time_constant_s();
        let tau_u = up.time_constant_s();
        let rise_p = ps.temperature_k - pp.ambient_k;
        let rise_u = us.temperature_k - up.ambient_k;
        if (tau_p - tau_u).abs() <= 1e-12 * tau_p && rise_p >= 0.0 && rise_u >= 0.0 {
            // net(s) = k_p*dT_eq - (k_p*(dT_eq - rise_p) + k_u*rise_u) * exp(-s/tau)
            let eq_rise = actuator::electrical_power(cfg.supply_current_a, pp) / pp.heat_loss_w_per_k;
            let asymptote = pp.tension_coeff_n_per_k * eq_rise;
            let gap = pp.tension_coeff_n_per_k * (eq_rise - rise_p) + up.tension_coeff_n_per_k * rise_u;
            if gap > 0.0 && asymptote > critical {
                let s = -tau_p * ((asymptote - critical) / gap).ln();
                if s.is_finite() {
                    return Some(s.clamp(0.0, span));
                }
            }
        }
        // net pull is monotone in time between snaps
        let (mut lo, mut hi) = (0.0, span);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.advanced(cfg, mid).net_pull(cfg) >= critical {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }
}

/// Result of one oscillator or crawl run.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorRun {
    pub trace: Trace,
    pub events: Vec<SnapEvent>,
}

pub fn simulate_oscillator(cfg: &OscillatorConfig, duration_s: f64) -> Result<OscillatorRun> {
    run(cfg, duration_s, |_| None)
}

/// Shared stepping loop. `on_snap` returns the robot displacement caused by
/// a snap, if any; displacements accumulate into the trace's robot column.
pub(crate) fn run<F>(cfg: &OscillatorConfig, duration_s: f64, mut on_snap: F) -> Result<OscillatorRun>
where
    F: FnMut(&SnapEvent) -> Option<f64>,
{
    cfg.validate().map_err(|e| Error::InvalidConfig(e.to_string()))?;
    if !(duration_s.is_finite() && duration_s > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "duration_s must be > 0, got {duration_s}"
        )));
    }
    cfg.check_oscillation()?;

    let critical = beam::critical_force(&cfg.beam);
    let dt = cfg.dt_s;
    let n_steps = (duration_s / dt * (1.0 + 1e-12)).floor() as usize;

    let mut state = OscState::initial(cfg);
    let mut robot_x = 0.0;
    let mut samples = Vec::with_capacity(n_steps + 1);
    let mut trace_events = Vec::new();
    let mut events = Vec::new();
    samples.push(state.sample(cfg, robot_x));

    for i in 1..=n_steps {
        let t_end = i as f64 * dt;
        loop {
            let span = t_end - state.time_s;
            if span <= 0.0 {
                break;
            }
            match state.snap_offset(cfg, critical, span) {
                Some(s) => {
                    state = state.advanced(cfg, s);
                    let ev = state.snap(cfg);
                    let step = on_snap(&ev);
                    if let Some(d) = step {
                        robot_x += d;
                    }
                    trace_events.push(TraceEvent {
                        time_s: ev.time_s,
                        kind: ev.kind,
                        step_m: step,
                    });
                    events.push(ev);
                }
                None => {
                    state = state.advanced(cfg, span);
                    break;
                }
            }
        }
        state.time_s = t_end;
        samples.push(state.sample(cfg, robot_x));
    }

    Ok(OscillatorRun {
        trace: Trace::new(samples, trace_events),
        events,
    })
}

/// Mean spacing between consecutive events of the same kind.
pub fn measure_period(events: &[SnapEvent]) -> Result<f64> {
    if events.len() < 3 {
        return Err(Error::TooFewEvents {
            needed: 3,
            got: events.len(),
        });
    }
    let mut span = 0.0;
    let mut intervals = 0usize;
    for kind in [SnapKind::SnapBack, SnapKind::SnapThrough] {
        let times: Vec<f64> = events.iter().filter(|e| e.kind == kind).map(|e| e.time_s).collect();
        if times.len() >= 2 {
            span += times[times.len() - 1] - times[0];
            intervals += times.len() - 1;
        }
    }
    if intervals == 0 {
        return Err(Error::TooFewEvents {
            needed: 3,
            got: events.len(),
        });
    }
    Ok(span / intervals as f64)
}

/// Closed-form steady-state period for identical left and right actuators.
///
/// After the first snap each half cycle starts with the temperature gap
/// fixed by the snap condition, so every half period is
/// `tau * ln((k*dT_eq + F_c) / (k*dT_eq - F_c))`.
pub fn steady_period(cfg: &OscillatorConfig) -> Option<f64> {
    let p = &cfg.left;
    let pull = cfg.equilibrium_pull(Side::Left);
    let critical = beam::critical_force(&cfg.beam);
    if pull <= critical {
        return None;
    }
    Some(2.0 * p.time_constant_s() * ((pull + critical) / (pull - critical)).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn powered_side_by_well() {
        assert_eq!(powered_side(Well::State1), Side::Right);
        assert_eq!(powered_side(Well::State2), Side::Left);
        assert_ne!(powered_side(Well::State1.opposite()), powered_side(Well::State1));
    }

    #[test]
    fn measure_period_constructed() {
        let kinds = [SnapKind::SnapThrough, SnapKind::SnapBack];
        let events: Vec<_> = [0.0, 1.7, 3.4, 5.1]
            .iter()
            .enumerate()
            .map(|(i, &t)| SnapEvent {
                time_s: t,
                kind: kinds[i % 2],
            })
            .collect();
        assert_relative_eq!(measure_period(&events).unwrap(), 3.4, max_relative = 1e-12);
        assert!(matches!(
            measure_period(&events[..2]),
            Err(Error::TooFewEvents { got: 2, .. })
        ));
    }

    #[test]
    fn measure_period_jittered() {
        // half periods alternate 1.65 +/- j, so every same-kind gap is exactly 3.3
        let kinds = [SnapKind::SnapThrough, SnapKind::SnapBack];
        let mut t = 0.4;
        let mut events = Vec::new();
        for i in 0..40 {
            events.push(SnapEvent {
                time_s: t,
                kind: kinds[i % 2],
            });
            let jitter = 0.05 * ((i * 7 % 5) as f64 - 2.0) / 2.0;
            t += if i % 2 == 0 { 1.65 + jitter } else { 1.65 - jitter };
        }
        let expected = {
            let through: Vec<f64> = events.iter().step_by(2).map(|e| e.time_s).collect();
            let back: Vec<f64> = events.iter().skip(1).step_by(2).map(|e| e.time_s).collect();
            let span = (through[19] - through[0]) + (back[19] - back[0]);
            span / 38.0
        };
        assert_relative_eq!(measure_period(&events).unwrap(), expected, max_relative = 1e-12);
        assert!((expected - 3.3).abs() < 0.01);
    }

    #[test]
    fn zero_current_does_not_oscillate() {
        let cfg = OscillatorConfig {
            supply_current_a: 0.0,
            ..Default::default()
        };
        match simulate_oscillator(&cfg, 10.0) {
            Err(Error::NoOscillation { shortfall_n, .. }) => assert!(shortfall_n > 0.0),
            other => panic!("expected NoOscillation, got {other:?}"),
        }
    }

    #[test]
    fn invalid_step_or_duration() {
        let cfg = OscillatorConfig {
            dt_s: 0.0,
            ..Default::default()
        };
        assert!(matches!(simulate_oscillator(&cfg, 10.0), Err(Error::InvalidConfig(_))));
        let cfg = OscillatorConfig::default();
        assert!(matches!(simulate_oscillator(&cfg, 0.0), Err(Error::InvalidConfig(_))));
        assert!(matches!(simulate_oscillator(&cfg, -3.0), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn default_period_matches_closed_form() {
        let cfg = OscillatorConfig::default();
        let run = simulate_oscillator(&cfg, 60.0).unwrap();
        let measured = measure_period(&run.events).unwrap();
        assert_relative_eq!(measured, steady_period(&cfg).unwrap(), max_relative = 1e-9);
        assert!((measured - 3.4).abs() < 1e-6);
    }

    #[test]
    fn first_snap_matches_heating_time() {
        let cfg = OscillatorConfig::default();
        let run = simulate_oscillator(&cfg, 5.0).unwrap();
        let rise = beam::critical_force(&cfg.beam) / cfg.right.tension_coeff_n_per_k;
        let expected = actuator::heating_time(rise, cfg.supply_current_a, &cfg.right).unwrap();
        assert_relative_eq!(run.events[0].time_s, expected, max_relative = 1e-12);
        assert_eq!(run.events[0].kind, SnapKind::SnapThrough);
    }

    #[test]
    fn start_in_right_well_snaps_back_first() {
        let cfg = OscillatorConfig {
            initial_well: Well::State2,
            ..Default::default()
        };
        let run = simulate_oscillator(&cfg, 5.0).unwrap();
        assert_eq!(run.events[0].kind, SnapKind::SnapBack);
        assert!(run.trace.samples()[0].beam_x_m > 0.0);
    }

    #[test]
    fn asymmetric_actuators_use_numeric_root() {
        let mut cfg = OscillatorConfig::default();
        cfg.left.thermal_capacitance_j_per_k *= 1.3;
        let run = simulate_oscillator(&cfg, 30.0).unwrap();
        assert!(run.events.len() > 6);
        for w in run.events.windows(2) {
            assert_ne!(w[0].kind, w[1].kind);
        }
        // the snap condition holds at each refined event time
        let fine = OscillatorConfig {
            dt_s: cfg.dt_s / 2.0,
            ..cfg
        };
        let run2 = simulate_oscillator(&fine, 30.0).unwrap();
        for (a, b) in run.events.iter().zip(&run2.events) {
            assert!((a.time_s - b.time_s).abs() < 1e-9);
        }
    }
}
