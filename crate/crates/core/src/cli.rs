//! Subcommand implementations behind the `crawlsim` binary.
//!
//! Every command returns the JSON document it prints, so the binary is a
//! thin argument parser and the commands are testable in-process.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::analytic::{self, MEASURED_SPEED_1G_M_S, MEASURED_SPEED_2G_M_S};
use crate::error::Error;
use crate::locomotion;
use crate::oscillator;
use crate::scenario::ScenarioConfig;
use crate::trace::{self, Trace};

/// Process exit status for a failed command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Usage = 1,
    NoOscillation = 2,
}

#[derive(Debug)]
pub struct CommandError {
    pub code: ExitCode,
    pub message: String,
}

impl std::fmt::Display for CommandError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoOscillation { .. } => ExitCode::NoOscillation,
            _ => ExitCode::Usage,
        };
        CommandError {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<Value, CommandError>;

/// Overrides applied on top of a scenario file.
#[derive(Debug, Clone, Default)]
pub struct RunOverrides {
    pub current_a: Option<f64>,
    pub dt_s: Option<f64>,
    pub duration_s: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

impl RunOverrides {
    fn apply(&self, cfg: &mut ScenarioConfig) -> Result<(), Error> {
        if let Some(i) = self.current_a {
            cfg.oscillator.supply_current_a = i;
        }
        if let Some(dt) = self.dt_s {
            cfg.oscillator.dt_s = dt;
        }
        if let Some(d) = self.duration_s {
            cfg.duration_s = d;
        }
        cfg.validate()
    }
}

fn output_paths(cfg: &ScenarioConfig, command: &str, out_dir: Option<&Path>) -> (PathBuf, PathBuf) {
    let name = cfg.name.clone().unwrap_or_else(|| "scenario".into());
    let pick = |configured: &Option<String>, default: String| {
        let file = configured.clone().unwrap_or(default);
        match out_dir {
            Some(dir) => dir.join(Path::new(&file).file_name().unwrap_or_default()),
            None => PathBuf::from(file),
        }
    };
    (
        pick(&cfg.output.trace_csv, format!("{name}.{command}.csv")),
        pick(&cfg.output.summary_json, format!("{name}.{command}.summary.json")),
    )
}

fn write_summary(path: &Path, summary: &Value) -> Result<(), Error> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut text = serde_json::to_string_pretty(summary).expect("summary serializes");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn write_trace(path: &Path, tr: &Trace) -> Result<(), Error> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    trace::write_csv(tr, path)
}

fn config_echo(cfg: &ScenarioConfig) -> Value {
    serde_json::to_value(cfg).expect("scenario serializes")
}

fn period_or_null(tr: &Trace) -> Value {
    trace::detect_period(tr).map(Value::from).unwrap_or(Value::Null)
}

pub fn oscillate(mut cfg: ScenarioConfig, flags: &RunOverrides) -> CmdResult {
    flags.apply(&mut cfg)?;
    let run = oscillator::simulate_oscillator(&cfg.oscillator, cfg.duration_s)?;
    let (trace_path, summary_path) = output_paths(&cfg, "oscillate", flags.out_dir.as_deref());
    write_trace(&trace_path, &run.trace)?;
    let summary = json!({
        "command": "oscillate",
        "config": config_echo(&cfg),
        "calibrated_parameters": cfg.calibrated_parameters(),
        "period_s": period_or_null(&run.trace),
        "avg_speed_m_s": trace::average_speed(&run.trace).unwrap_or(0.0),
        "total_displacement_m": run.trace.total_displacement_m(),
        "n_cycles": run.trace.n_cycles(),
        "n_events": run.events.len(),
        "trace_csv": trace_path.display().to_string(),
        "events_csv": trace::events_path(&trace_path).display().to_string(),
    });
    write_summary(&summary_path, &summary)?;
    Ok(summary)
}

pub fn crawl(mut cfg: ScenarioConfig, flags: &RunOverrides) -> CmdResult {
    flags.apply(&mut cfg)?;
    let run = locomotion::simulate_crawl(&cfg.oscillator, &cfg.robot, cfg.duration_s)?;
    let (trace_path, summary_path) = output_paths(&cfg, "crawl", flags.out_dir.as_deref());
    write_trace(&trace_path, &run.trace)?;
    let steps = locomotion::step_decomposition(&run.steps)
        .map(|s| serde_json::to_value(s).expect("summary serializes"))
        .unwrap_or(Value::Null);
    let mut summary = json!({
        "command": "crawl",
        "config": config_echo(&cfg),
        "calibrated_parameters": cfg.calibrated_parameters(),
        "period_s": period_or_null(&run.trace),
        "avg_speed_m_s": trace::average_speed(&run.trace).unwrap_or(0.0),
        "total_displacement_m": run.trace.total_displacement_m(),
        "n_cycles": run.trace.n_cycles(),
        "n_steps": run.steps.len(),
        "step_summary": steps,
        "trace_csv": trace_path.display().to_string(),
        "events_csv": trace::events_path(&trace_path).display().to_string(),
    });
    if let Some(d) = cfg.targets.measured_displacement_m {
        summary["measured_displacement_m"] = json!(d);
    }
    if let Some(t) = cfg.targets.measured_duration_s {
        summary["measured_duration_s"] = json!(t);
    }
    write_summary(&summary_path, &summary)?;
    Ok(summary)
}

pub fn model(cfg: &ScenarioConfig, compare_mass_kg: Option<f64>) -> CmdResult {
    let input = cfg.speed_input();
    input.validate()?;
    let m = input.robot.attached_mass_kg;
    let other = compare_mass_kg.unwrap_or(1e-3);
    let composed = analytic::avg_speed_composed(&input);
    let printed = analytic::avg_speed_printed(&input);
    let other_input = input.with_attached_mass(other);
    Ok(json!({
        "command": "model",
        "config": config_echo(cfg),
        "calibrated_parameters": cfg.calibrated_parameters(),
        "attached_mass_kg": m,
        "composed_speed_m_s": composed,
        "printed_figure": printed,
        "printed_over_composed": printed / composed,
        "compare_mass_kg": other,
        "compare_composed_speed_m_s": analytic::avg_speed_composed(&other_input),
        "compare_printed_figure": analytic::avg_speed_printed(&other_input),
        "printed_ratio": analytic::speed_ratio_printed(&input, m, other)?,
        "composed_ratio": analytic::speed_ratio_composed(&input, m, other)?,
        "measured_ratio": MEASURED_SPEED_2G_M_S / MEASURED_SPEED_1G_M_S,
        "one_gram": serde_json::to_value(analytic::predict_one_gram(&input)?).expect("report serializes"),
    }))
}

#[derive(Debug, Clone, Default)]
pub struct CalibrateFlags {
    pub target_speed_m_s: Option<f64>,
    pub target_period_s: Option<f64>,
    pub write_config: Option<PathBuf>,
}

/// Fits `ηE` to a measured speed and the heat-loss coefficient to a
/// measured oscillation period, then re-simulates to confirm the period.
pub fn calibrate(cfg: &ScenarioConfig, flags: &CalibrateFlags) -> CmdResult {
    let speed = flags
        .target_speed_m_s
        .or(cfg.targets.avg_speed_m_s)
        .unwrap_or(MEASURED_SPEED_2G_M_S);
    let period = flags
        .target_period_s
        .or(cfg.targets.oscillation_period_s)
        .unwrap_or(3.4);
    let eta_e = analytic::calibrate_eta_e(speed, &cfg.robot, cfg.model.period_s)?;

    let osc = &cfg.oscillator;
    let mut out = cfg.clone();
    out.model.eta_e_j = eta_e;
    // the beam releases E = ηE / η, which also sets the critical force
    out.oscillator.beam.barrier_energy_j = eta_e / cfg.robot.efficiency;
    let fitted = analytic::calibrate_thermal(
        period,
        osc.supply_current_a,
        &osc.left.template(),
        &out.oscillator.beam,
        osc.dt_s,
    )?;
    out.oscillator.left = fitted;
    out.oscillator.right = fitted;
    out.targets.avg_speed_m_s = Some(speed);
    out.targets.oscillation_period_s = Some(period);
    for p in [
        "model.eta_E_J",
        "oscillator.beam.barrier_energy_J",
        "oscillator.left.heat_loss_W_per_K",
        "oscillator.right.heat_loss_W_per_K",
    ] {
        out.mark_calibrated(p);
    }
    out.validate()?;

    let check = oscillator::simulate_oscillator(&out.oscillator, 20.0 * period)?;
    let achieved = oscillator::measure_period(&check.events)?;
    if let Some(path) = &flags.write_config {
        let mut text = out.to_json_pretty();
        text.push('\n');
        fs::write(path, text).map_err(Error::from)?;
    }
    Ok(json!({
        "command": "calibrate",
        "target_speed_m_s": speed,
        "target_period_s": period,
        "eta_E_J": {"value": eta_e, "calibrated": true},
        "heat_loss_W_per_K": {"value": fitted.heat_loss_w_per_k, "calibrated": true},
        "achieved_period_s": achieved,
        "config": config_echo(&out),
        "calibrated_parameters": out.calibrated_parameters(),
    }))
}

#[derive(Debug, Clone, Default)]
pub struct OptimizeFlags {
    pub bounds_kg: Option<(f64, f64)>,
    pub samples: Option<usize>,
}

pub fn optimize(cfg: &ScenarioConfig, flags: &OptimizeFlags) -> CmdResult {
    let input = cfg.speed_input();
    input.validate()?;
    let (lo, hi) = flags
        .bounds_kg
        .or(cfg.targets.mass_bounds_kg.map(|[a, b]| (a, b)))
        .unwrap_or((0.1e-3, 10e-3));
    let best = analytic::optimize_attached_mass(&input, (lo, hi))?;
    let n = flags.samples.unwrap_or(50).max(2);
    // log-spaced speed curve; evaluated in parallel, collected in input order
    let curve: Vec<Value> = (0..n)
        .into_par_iter()
        .map(|i| {
            let m = lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
            json!({
                "attached_mass_kg": m,
                "composed_speed_m_s": analytic::avg_speed_composed(&input.with_attached_mass(m)),
            })
        })
        .collect();
    Ok(json!({
        "command": "optimize",
        "config": config_echo(cfg),
        "calibrated_parameters": cfg.calibrated_parameters(),
        "bounds_kg": [lo, hi],
        "optimal_attached_mass_kg": best,
        "optimal_speed_m_s": analytic::avg_speed_composed(&input.with_attached_mass(best)),
        "curve": curve,
    }))
}

pub fn analyze(trace_path: &Path) -> CmdResult {
    let tr = trace::read_csv(trace_path)?;
    let steps: Vec<locomotion::CrawlStep> = tr
        .events()
        .iter()
        .filter_map(|e| {
            e.step_m.map(|d| locomotion::CrawlStep {
                time_s: e.time_s,
                kind: e.kind,
                distance_m: d,
            })
        })
        .collect();
    let step_summary = locomotion::step_decomposition(&steps)
        .map(|s| serde_json::to_value(s).expect("summary serializes"))
        .unwrap_or(Value::Null);
    Ok(json!({
        "command": "analyze",
        "trace_csv": trace_path.display().to_string(),
        "n_samples": tr.len(),
        "dt_s": tr.dt_s(),
        "duration_s": tr.duration_s(),
        "period_s": period_or_null(&tr),
        "zero_crossing_period_s": trace::zero_crossing_period(&tr).map(Value::from).unwrap_or(Value::Null),
        "avg_speed_m_s": trace::average_speed(&tr).map(Value::from).unwrap_or(Value::Null),
        "total_displacement_m": tr.total_displacement_m(),
        "n_cycles": tr.n_cycles(),
        "n_events": tr.events().len(),
        "step_summary": step_summary,
    }))
}
