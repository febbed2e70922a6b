//! Simulation and design toolkit for oscillation-driven stick-slip crawling robots.
//!
//! A thermally switched bistable beam oscillates between two wells; each
//! snap kicks the robot forward against directional friction. The crate
//! models the pieces separately and composes them:
//!
//! - [`beam`]: double-well potential, critical force, released energy
//! - [`actuator`]: lumped electro-thermal actuator model
//! - [`oscillator`]: event-driven hybrid simulation of the oscillator
//! - [`locomotion`]: impulse-glide ratchet driven by snap events
//! - [`analytic`]: closed-form speed model, calibration, mass optimization
//! - [`trace`]: sampled traces, period and speed analysis, CSV I/O
//! - [`scenario`] and [`cli`]: JSON scenarios and the `crawlsim` commands

pub mod actuator;
pub mod analytic;
pub mod beam;
pub mod cli;
pub mod error;
pub mod locomotion;
pub mod oscillator;
pub mod scenario;
pub mod trace;

pub use error::{Error, Result};
