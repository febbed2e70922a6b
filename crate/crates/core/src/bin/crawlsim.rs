use std::io::Write;
use std::path::{Path, PathBuf};
use std::process;

use clap::{Args, Parser, Subcommand};

use crawlsim::cli::{self, CalibrateFlags, CommandError, ExitCode, OptimizeFlags, RunOverrides};
use crawlsim::scenario::ScenarioConfig;

/// Simulate, calibrate and optimize oscillation-driven crawling robots.
#[derive(Parser)]
#[command(name = "crawlsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON file.
    config: PathBuf,
    /// Supply current override, in amperes.
    #[arg(long)]
    current: Option<f64>,
    /// Integration step override, in seconds.
    #[arg(long)]
    dt: Option<f64>,
    /// Simulated duration override, in seconds.
    #[arg(long)]
    duration: Option<f64>,
    /// Directory for the trace and summary files.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl RunArgs {
    fn overrides(&self) -> RunOverrides {
        RunOverrides {
            current_a: self.current,
            dt_s: self.dt,
            duration_s: self.duration,
            out_dir: self.out_dir.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the oscillator alone and write its trace.
    Oscillate(RunArgs),
    /// Simulate the crawling robot and write its trace and steps.
    Crawl(RunArgs),
    /// Evaluate both speed-model forms and the mass-comparison ratios.
    Model {
        config: PathBuf,
        /// Attached mass to compare against, in kilograms.
        #[arg(long)]
        compare_mass: Option<f64>,
    },
    /// Fit the fused energy and the actuator heat loss to measurements.
    Calibrate {
        config: PathBuf,
        /// Measured average speed, in m/s.
        #[arg(long)]
        target_speed: Option<f64>,
        /// Measured oscillation period, in seconds.
        #[arg(long)]
        target_period: Option<f64>,
        /// Write the calibrated scenario to this path.
        #[arg(long)]
        write_config: Option<PathBuf>,
    },
    /// Find the attached mass that maximizes the average speed.
    Optimize {
        config: PathBuf,
        /// Lower mass bound, in kilograms.
        #[arg(long, requires = "hi")]
        lo: Option<f64>,
        /// Upper mass bound, in kilograms.
        #[arg(long, requires = "lo")]
        hi: Option<f64>,
        /// Number of speed-curve samples.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Re-run trace analysis on an existing trace CSV.
    Analyze { trace: PathBuf },
}

fn load(path: &Path) -> Result<ScenarioConfig, CommandError> {
    let mut cfg = ScenarioConfig::load(path)?;
    if cfg.name.is_none() {
        cfg.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    }
    Ok(cfg)
}

fn dispatch(cmd: Command) -> Result<serde_json::Value, CommandError> {
    match cmd {
        Command::Oscillate(args) => cli::oscillate(load(&args.config)?, &args.overrides()),
        Command::Crawl(args) => cli::crawl(load(&args.config)?, &args.overrides()),
        Command::Model { config, compare_mass } => cli::model(&load(&config)?, compare_mass),
        Command::Calibrate {
            config,
            target_speed,
            target_period,
            write_config,
        } => cli::calibrate(
            &load(&config)?,
            &CalibrateFlags {
                target_speed_m_s: target_speed,
                target_period_s: target_period,
                write_config,
            },
        ),
        Command::Optimize {
            config,
            lo,
            hi,
            samples,
        } => cli::optimize(
            &load(&config)?,
            &OptimizeFlags {
                bounds_kg: lo.zip(hi),
                samples,
            },
        ),
        Command::Analyze { trace } => cli::analyze(&trace),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                ExitCode::Usage
            } else {
                ExitCode::Success
            };
            let _ = e.print();
            process::exit(code as i32);
        }
    };
    match dispatch(cli.command) {
        Ok(summary) => {
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
            let _ = writeln!(std::io::stdout().lock(), "{text}");
        }
        Err(e) => {
            eprintln!("error: {e}");
            process::exit(e.code as i32);
        }
    }
}
