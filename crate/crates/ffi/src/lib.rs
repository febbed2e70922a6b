//! C ABI over `crawlsim`.
//!
//! Scenarios and traces are opaque heap handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call
//! returns a [`CrawlStatus`]; on failure the message is available from
//! [`crawl_last_error_message`] on the same thread. Panics never cross the
//! boundary.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use crawlsim::analytic::{self, SpeedModelInput};
use crawlsim::locomotion::{self, RobotParams};
use crawlsim::oscillator::{self, Side, SnapKind};
use crawlsim::scenario::ScenarioConfig;
use crawlsim::trace::{self, Trace};
use crawlsim::{actuator, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrawlStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    NoOscillation = 4,
    TooFewEvents = 5,
    Unachievable = 6,
    InvalidBounds = 7,
    OutOfRange = 8,
    MalformedFile = 9,
    Io = 10,
    Analysis = 11,
    Panic = 99,
}

impl From<&Error> for CrawlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::InvalidConfig(_) => CrawlStatus::InvalidConfig,
            Error::NoOscillation { .. } => CrawlStatus::NoOscillation,
            Error::TooFewEvents { .. } => CrawlStatus::TooFewEvents,
            Error::Unachievable(_) => CrawlStatus::Unachievable,
            Error::InvalidBounds { .. } => CrawlStatus::InvalidBounds,
            Error::MalformedFile { .. } => CrawlStatus::MalformedFile,
            Error::Io(_) => CrawlStatus::Io,
            Error::EmptySteps | Error::TooShort(_) | Error::NoOscillationDetected => CrawlStatus::Analysis,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrawlSide {
    Left = 0,
    Right = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrawlSnapKind {
    SnapBack = 0,
    SnapThrough = 1,
}

/// One trace row.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrawlSample {
    pub time_s: f64,
    pub beam_x_m: f64,
    pub robot_x_m: f64,
    pub temp_left_k: f64,
    pub temp_right_k: f64,
    pub powered: CrawlSide,
}

/// One snap event; `step_m` is meaningful only when `has_step` is true.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrawlEvent {
    pub time_s: f64,
    pub kind: CrawlSnapKind,
    pub has_step: bool,
    pub step_m: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrawlRobotParams {
    pub body_mass_kg: f64,
    pub attached_mass_kg: f64,
    pub mu_forward: f64,
    pub mu_backward: f64,
    pub efficiency: f64,
    pub gravity_m_s2: f64,
    pub thru_velocity_factor: f64,
}

impl From<CrawlRobotParams> for RobotParams {
    fn from(r: CrawlRobotParams) -> Self {
        RobotParams {
            body_mass_kg: r.body_mass_kg,
            attached_mass_kg: r.attached_mass_kg,
            mu_forward: r.mu_forward,
            mu_backward: r.mu_backward,
            efficiency: r.efficiency,
            gravity_m_s2: r.gravity_m_s2,
            thru_velocity_factor: r.thru_velocity_factor,
        }
    }
}

impl From<RobotParams> for CrawlRobotParams {
    fn from(r: RobotParams) -> Self {
        CrawlRobotParams {
            body_mass_kg: r.body_mass_kg,
            attached_mass_kg: r.attached_mass_kg,
            mu_forward: r.mu_forward,
            mu_backward: r.mu_backward,
            efficiency: r.efficiency,
            gravity_m_s2: r.gravity_m_s2,
            thru_velocity_factor: r.thru_velocity_factor,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrawlSpeedInput {
    pub robot: CrawlRobotParams,
    pub eta_e_j: f64,
    pub period_s: f64,
}

impl CrawlSpeedInput {
    fn to_model(self) -> Result<SpeedModelInput, Error> {
        let input = SpeedModelInput {
            robot: self.robot.into(),
            eta_e_j: self.eta_e_j,
            period_s: self.period_s,
        };
        input.validate()?;
        Ok(input)
    }
}

/// Opaque scenario handle.
pub struct CrawlScenario {
    config: ScenarioConfig,
}

/// Opaque trace handle.
pub struct CrawlTrace {
    trace: Trace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: CrawlStatus, msg: impl Into<String>) -> CrawlStatus {
    set_last_error(msg);
    status
}

fn from_error(e: Error) -> CrawlStatus {
    fail(CrawlStatus::from(&e), e.to_string())
}

/// Runs `body`, mapping panics to `CrawlStatus::Panic`.
fn guard<F: FnOnce() -> CrawlStatus>(body: F) -> CrawlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => {
            if status == CrawlStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            status
        }
        Err(_) => fail(CrawlStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, CrawlStatus> {
    if p.is_null() {
        return Err(fail(CrawlStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(CrawlStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(CrawlStatus::NullArgument, concat!("null argument `", stringify!($p), "`"));
        })+
    };
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn crawl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn crawl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses a scenario JSON document.
#[no_mangle]
pub unsafe extern "C" fn crawl_scenario_from_json(json: *const c_char, out: *mut *mut CrawlScenario) -> CrawlStatus {
    guard(|| {
        non_null!(out);
        let text = try_status!(str_arg(json));
        match ScenarioConfig::from_json_str(text) {
            Ok(config) => {
                *out = Box::into_raw(Box::new(CrawlScenario { config }));
                CrawlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Loads a scenario JSON file.
#[no_mangle]
pub unsafe extern "C" fn crawl_scenario_load(path: *const c_char, out: *mut *mut CrawlScenario) -> CrawlStatus {
    guard(|| {
        non_null!(out);
        let path = try_status!(str_arg(path));
        match ScenarioConfig::load(Path::new(path)) {
            Ok(config) => {
                *out = Box::into_raw(Box::new(CrawlScenario { config }));
                CrawlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Built-in default scenario (2 g robot, 0.62 A, 60 s).
#[no_mangle]
pub unsafe extern "C" fn crawl_scenario_default(out: *mut *mut CrawlScenario) -> CrawlStatus {
    guard(|| {
        non_null!(out);
        *out = Box::into_raw(Box::new(CrawlScenario {
            config: ScenarioConfig::default(),
        }));
        CrawlStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn crawl_scenario_free(scenario: *mut CrawlScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Serializes the scenario as pretty JSON. Free with `crawl_string_free`.
#[no_mangle]
pub unsafe extern "C" fn crawl_scenario_to_json(scenario: *const CrawlScenario, out: *mut *mut c_char) -> CrawlStatus {
    guard(|| {
        non_null!(scenario, out);
        let text = (*scenario).config.to_json_pretty();
        match CString::new(text) {
            Ok(s) => {
                *out = s.into_raw();
                CrawlStatus::Ok
            }
            Err(_) => fail(CrawlStatus::Panic, "scenario JSON contains NUL"),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn crawl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn with_scenario_mut<F>(scenario: *mut CrawlScenario, edit: F) -> CrawlStatus
where
    F: FnOnce(&mut ScenarioConfig),
{
    guard(|| {
        non_null!(scenario);
        let mut next = (*scenario).config.clone();
        edit(&mut next);
        match next.validate() {
            Ok(()) => {
                (*scenario).config = next;
                CrawlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Sets the supply current; the scenario is unchanged if the value is invalid.
#[no_mangle]
pub unsafe extern "C" fn crawl_scenario_set_supply_current(
    scenario: *mut CrawlScenario,
    current_a: f64,
) -> CrawlStatus {
    with_scenario_mut(scenario, |c| c.oscillator.supply_current_a = current_a)
}

#[no_mangle]
pub unsafe extern "C" fn crawl_scenario_set_dt(scenario: *mut CrawlScenario, dt_s: f64) -> CrawlStatus {
    with_scenario_mut(scenario, |c| c.oscillator.dt_s = dt_s)
}

#[no_mangle]
pub unsafe extern "C" fn crawl_scenario_set_duration(scenario: *mut CrawlScenario, duration_s: f64) -> CrawlStatus {
    with_scenario_mut(scenario, |c| c.duration_s = duration_s)
}

#[no_mangle]
pub unsafe extern "C" fn crawl_scenario_robot(
    scenario: *const CrawlScenario,
    out: *mut CrawlRobotParams,
) -> CrawlStatus {
    guard(|| {
        non_null!(scenario, out);
        *out = (*scenario).config.robot.into();
        CrawlStatus::Ok
    })
}

/// Runs the oscillator for the scenario's duration.
#[no_mangle]
pub unsafe extern "C" fn crawl_simulate_oscillator(
    scenario: *const CrawlScenario,
    out: *mut *mut CrawlTrace,
) -> CrawlStatus {
    guard(|| {
        non_null!(scenario, out);
        let cfg = &(*scenario).config;
        match oscillator::simulate_oscillator(&cfg.oscillator, cfg.duration_s) {
            Ok(run) => {
                *out = Box::into_raw(Box::new(CrawlTrace { trace: run.trace }));
                CrawlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Runs the crawling robot for the scenario's duration.
#[no_mangle]
pub unsafe extern "C" fn crawl_simulate_crawl(
    scenario: *const CrawlScenario,
    out: *mut *mut CrawlTrace,
) -> CrawlStatus {
    guard(|| {
        non_null!(scenario, out);
        let cfg = &(*scenario).config;
        match locomotion::simulate_crawl(&cfg.oscillator, &cfg.robot, cfg.duration_s) {
            Ok(run) => {
                *out = Box::into_raw(Box::new(CrawlTrace { trace: run.trace }));
                CrawlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn crawl_trace_free(trace: *mut CrawlTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Number of samples; 0 for a NULL handle.
#[no_mangle]
pub unsafe extern "C" fn crawl_trace_sample_count(trace: *const CrawlTrace) -> usize {
    if trace.is_null() {
        return 0;
    }
    (*trace).trace.len()
}

#[no_mangle]
pub unsafe extern "C" fn crawl_trace_event_count(trace: *const CrawlTrace) -> usize {
    if trace.is_null() {
        return 0;
    }
    (*trace).trace.events().len()
}

#[no_mangle]
pub unsafe extern "C" fn crawl_trace_sample(
    trace: *const CrawlTrace,
    index: usize,
    out: *mut CrawlSample,
) -> CrawlStatus {
    guard(|| {
        non_null!(trace, out);
        let Some(s) = (*trace).trace.samples().get(index) else {
            return fail(CrawlStatus::OutOfRange, format!("sample index {index} out of range"));
        };
        *out = CrawlSample {
            time_s: s.time_s,
            beam_x_m: s.beam_x_m,
            robot_x_m: s.robot_x_m,
            temp_left_k: s.temp_left_k,
            temp_right_k: s.temp_right_k,
            powered: match s.powered {
                Side::Left => CrawlSide::Left,
                Side::Right => CrawlSide::Right,
            },
        };
        CrawlStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn crawl_trace_event(
    trace: *const CrawlTrace,
    index: usize,
    out: *mut CrawlEvent,
) -> CrawlStatus {
    guard(|| {
        non_null!(trace, out);
        let Some(e) = (*trace).trace.events().get(index) else {
            return fail(CrawlStatus::OutOfRange, format!("event index {index} out of range"));
        };
        *out = CrawlEvent {
            time_s: e.time_s,
            kind: match e.kind {
                SnapKind::SnapBack => CrawlSnapKind::SnapBack,
                SnapKind::SnapThrough => CrawlSnapKind::SnapThrough,
            },
            has_step: e.step_m.is_some(),
            step_m: e.step_m.unwrap_or(0.0),
        };
        CrawlStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn crawl_trace_period(trace: *const CrawlTrace, out_s: *mut f64) -> CrawlStatus {
    guard(|| {
        non_null!(trace, out_s);
        match trace::detect_period(&(*trace).trace) {
            Ok(p) => {
                *out_s = p;
                CrawlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn crawl_trace_average_speed(trace: *const CrawlTrace, out_m_s: *mut f64) -> CrawlStatus {
    guard(|| {
        non_null!(trace, out_m_s);
        match trace::average_speed(&(*trace).trace) {
            Ok(v) => {
                *out_m_s = v;
                CrawlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Writes `path` and its sibling `.events.csv` file.
#[no_mangle]
pub unsafe extern "C" fn crawl_trace_write_csv(trace: *const CrawlTrace, path: *const c_char) -> CrawlStatus {
    guard(|| {
        non_null!(trace);
        let path = try_status!(str_arg(path));
        match trace::write_csv(&(*trace).trace, Path::new(path)) {
            Ok(()) => CrawlStatus::Ok,
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn crawl_trace_read_csv(path: *const c_char, out: *mut *mut CrawlTrace) -> CrawlStatus {
    guard(|| {
        non_null!(out);
        let path = try_status!(str_arg(path));
        match trace::read_csv(Path::new(path)) {
            Ok(trace) => {
                *out = Box::into_raw(Box::new(CrawlTrace { trace }));
                CrawlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn crawl_robot_params_default(out: *mut CrawlRobotParams) -> CrawlStatus {
    guard(|| {
        non_null!(out);
        *out = RobotParams::default().into();
        CrawlStatus::Ok
    })
}

/// Joule power `I^2 R`, in watts.
#[no_mangle]
pub extern "C" fn crawl_electrical_power(current_a: f64, resistance_ohm: f64) -> f64 {
    let p = actuator::ActuatorParams {
        resistance_ohm,
        ..Default::default()
    };
    actuator::electrical_power(current_a, &p)
}

#[no_mangle]
pub unsafe extern "C" fn crawl_avg_speed_composed(input: *const CrawlSpeedInput, out_m_s: *mut f64) -> CrawlStatus {
    guard(|| {
        non_null!(input, out_m_s);
        let model = try_status!((*input).to_model().map_err(from_error));
        *out_m_s = analytic::avg_speed_composed(&model);
        CrawlStatus::Ok
    })
}

/// The printed closed form; the result is `m` times the composed speed.
#[no_mangle]
pub unsafe extern "C" fn crawl_avg_speed_printed(input: *const CrawlSpeedInput, out: *mut f64) -> CrawlStatus {
    guard(|| {
        non_null!(input, out);
        let model = try_status!((*input).to_model().map_err(from_error));
        *out = analytic::avg_speed_printed(&model);
        CrawlStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn crawl_speed_ratio_printed(
    input: *const CrawlSpeedInput,
    m1_kg: f64,
    m2_kg: f64,
    out: *mut f64,
) -> CrawlStatus {
    guard(|| {
        non_null!(input, out);
        let model = try_status!((*input).to_model().map_err(from_error));
        match analytic::speed_ratio_printed(&model, m1_kg, m2_kg) {
            Ok(r) => {
                *out = r;
                CrawlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn crawl_optimize_attached_mass(
    input: *const CrawlSpeedInput,
    lo_kg: f64,
    hi_kg: f64,
    out_kg: *mut f64,
) -> CrawlStatus {
    guard(|| {
        non_null!(input, out_kg);
        let model = try_status!((*input).to_model().map_err(from_error));
        match analytic::optimize_attached_mass(&model, (lo_kg, hi_kg)) {
            Ok(m) => {
                *out_kg = m;
                CrawlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn crawl_calibrate_eta_e(
    measured_speed_m_s: f64,
    robot: *const CrawlRobotParams,
    period_s: f64,
    out_j: *mut f64,
) -> CrawlStatus {
    guard(|| {
        non_null!(robot, out_j);
        let r: RobotParams = (*robot).into();
        match analytic::calibrate_eta_e(measured_speed_m_s, &r, period_s) {
            Ok(e) => {
                *out_j = e;
                CrawlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
