//! Uniformly sampled run traces, their analysis, and CSV I/O.
//!
//! A trace is written as two files: the sample table at the given path and
//! the event table next to it (`<stem>.events.csv`). Floats are written with
//! 17 significant digits so a read-back is bit-exact.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::oscillator::{self, Side, SnapEvent, SnapKind};

pub const SAMPLE_HEADER: &str = "t_s,beam_x_m,robot_X_m,T_left_K,T_right_K,powered";
pub const EVENT_HEADER: &str = "t_s,kind,step_m";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub time_s: f64,
    pub beam_x_m: f64,
    pub robot_x_m: f64,
    pub temp_left_k: f64,
    pub temp_right_k: f64,
    pub powered: Side,
}

/// A snap, optionally with the robot displacement it caused.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEvent {
    pub time_s: f64,
    pub kind: SnapKind,
    pub step_m: Option<f64>,
}

impl TraceEvent {
    pub fn snap(&self) -> SnapEvent {
        SnapEvent {
            time_s: self.time_s,
            kind: self.kind,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    samples: Vec<Sample>,
    events: Vec<TraceEvent>,
}

impl Trace {
    pub fn new(samples: Vec<Sample>, events: Vec<TraceEvent>) -> Self {
        Trace { samples, events }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn snap_events(&self) -> Vec<SnapEvent> {
        self.events.iter().map(TraceEvent::snap).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample period; `None` with fewer than two samples.
    pub fn dt_s(&self) -> Option<f64> {
        match self.samples.as_slice() {
            [a, b, ..] => Some(b.time_s - a.time_s),
            _ => None,
        }
    }

    pub fn total_displacement_m(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.robot_x_m - a.robot_x_m,
            _ => 0.0,
        }
    }

    pub fn duration_s(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.time_s - a.time_s,
            _ => 0.0,
        }
    }

    /// Checks uniform sampling, nondecreasing robot position and event ordering.
    pub fn validate(&self) -> Result<()> {
        if let Some(dt) = self.dt_s() {
            if dt.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::MalformedFile {
                    line: 3,
                    reason: format!("nonpositive sample period {dt}"),
                });
            }
            let t0 = self.samples[0].time_s;
            for (i, s) in self.samples.iter().enumerate() {
                let expected = t0 + i as f64 * dt;
                if (s.time_s - expected).abs() > 1e-6 * dt {
                    return Err(Error::MalformedFile {
                        line: i + 2,
                        reason: format!("non-uniform sampling: t={} expected {}", s.time_s, expected),
                    });
                }
            }
        }
        for (i, w) in self.samples.windows(2).enumerate() {
            if w[1].robot_x_m < w[0].robot_x_m {
                return Err(Error::MalformedFile {
                    line: i + 3,
                    reason: "robot position decreases".into(),
                });
            }
        }
        for (i, w) in self.events.windows(2).enumerate() {
            if w[1].time_s < w[0].time_s {
                return Err(Error::MalformedFile {
                    line: i + 3,
                    reason: "events out of time order".into(),
                });
            }
        }
        Ok(())
    }

    /// Number of complete oscillation cycles represented by the events.
    pub fn n_cycles(&self) -> usize {
        self.events.len().saturating_sub(1) / 2
    }
}

pub fn average_speed(tr: &Trace) -> Result<f64> {
    if tr.len() < 2 {
        return Err(Error::TooShort(tr.len()));
    }
    Ok(tr.total_displacement_m() / tr.duration_s())
}

/// Oscillation period of a trace, from its snap events when there are at
/// least three, otherwise from zero crossings of the beam displacement.
pub fn detect_period(tr: &Trace) -> Result<f64> {
    if tr.events.len() >= 3 {
        return oscillator::measure_period(&tr.snap_events()).map_err(|_| Error::NoOscillationDetected);
    }
    zero_crossing_period(tr)
}

/// Mean spacing of same-direction zero crossings of `beam_x_m`, with
/// crossing times linearly interpolated between samples.
pub fn zero_crossing_period(tr: &Trace) -> Result<f64> {
    let mut rising = Vec::new();
    let mut falling = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for s in &tr.samples {
        let x = s.beam_x_m;
        if x == 0.0 || !x.is_finite() {
            continue;
        }
        if let Some((t0, x0)) = prev {
            if x0.signum() != x.signum() {
                let tc = t0 + (s.time_s - t0) * (x0 / (x0 - x));
                if x > 0.0 {
                    rising.push(tc);
                } else {
                    falling.push(tc);
                }
            }
        }
        prev = Some((s.time_s, x));
    }
    if rising.len() + falling.len() < 3 {
        return Err(Error::NoOscillationDetected);
    }
    let mut span = 0.0;
    let mut intervals = 0usize;
    for c in [&rising, &falling] {
        if c.len() >= 2 {
            span += c[c.len() - 1] - c[0];
            intervals += c.len() - 1;
        }
    }
    if intervals == 0 {
        return Err(Error::NoOscillationDetected);
    }
    Ok(span / intervals as f64)
}

/// Path of the event table that accompanies a sample table.
pub fn events_path(samples_path: &Path) -> PathBuf {
    let stem = samples_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trace".into());
    samples_path.with_file_name(format!("{stem}.events.csv"))
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_samples<W: Write>(tr: &Trace, mut out: W) -> Result<()> {
    writeln!(out, "{SAMPLE_HEADER}")?;
    for s in &tr.samples {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(s.time_s),
            fmt_f64(s.beam_x_m),
            fmt_f64(s.robot_x_m),
            fmt_f64(s.temp_left_k),
            fmt_f64(s.temp_right_k),
            s.powered.as_str()
        )?;
    }
    Ok(())
}

pub fn write_events<W: Write>(tr: &Trace, mut out: W) -> Result<()> {
    writeln!(out, "{EVENT_HEADER}")?;
    for e in &tr.events {
        let step = e.step_m.map(fmt_f64).unwrap_or_default();
        writeln!(out, "{},{},{}", fmt_f64(e.time_s), e.kind.as_str(), step)?;
    }
    Ok(())
}

/// Writes the sample table to `path` and the event table beside it.
pub fn write_csv(tr: &Trace, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_samples(tr, &mut buf)?;
    fs::write(path, buf)?;
    let mut buf = Vec::new();
    write_events(tr, &mut buf)?;
    fs::write(events_path(path), buf)?;
    Ok(())
}

fn parse_f64(field: &str, line: usize, column: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::MalformedFile {
        line,
        reason: format!("bad number {field:?} in column {column}"),
    })
}

fn check_header(first: Option<std::io::Result<String>>, expected: &str) -> Result<()> {
    match first {
        Some(Ok(h)) if h.trim_end() == expected => Ok(()),
        Some(Ok(h)) => Err(Error::MalformedFile {
            line: 1,
            reason: format!("expected header {expected:?}, found {:?}", h.trim_end()),
        }),
        Some(Err(e)) => Err(e.into()),
        None => Err(Error::MalformedFile {
            line: 1,
            reason: "missing header".into(),
        }),
    }
}

fn split_fields(line: &str, n: usize, lineno: usize) -> Result<Vec<&str>> {
    let fields: Vec<&str> = line.trim_end().split(',').collect();
    if fields.len() != n {
        return Err(Error::MalformedFile {
            line: lineno,
            reason: format!("expected {n} fields, found {}", fields.len()),
        });
    }
    Ok(fields)
}

pub fn read_samples<R: BufRead>(input: R) -> Result<Vec<Sample>> {
    let mut lines = input.lines();
    check_header(lines.next(), SAMPLE_HEADER)?;
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f = split_fields(&line, 6, lineno)?;
        let powered = match f[5].trim() {
            "left" => Side::Left,
            "right" => Side::Right,
            other => {
                return Err(Error::MalformedFile {
                    line: lineno,
                    reason: format!("bad powered side {other:?}"),
                })
            }
        };
        out.push(Sample {
            time_s: parse_f64(f[0], lineno, "t_s")?,
            beam_x_m: parse_f64(f[1], lineno, "beam_x_m")?,
            robot_x_m: parse_f64(f[2], lineno, "robot_X_m")?,
            temp_left_k: parse_f64(f[3], lineno, "T_left_K")?,
            temp_right_k: parse_f64(f[4], lineno, "T_right_K")?,
            powered,
        });
    }
    Ok(out)
}

pub fn read_events<R: BufRead>(input: R) -> Result<Vec<TraceEvent>> {
    let mut lines = input.lines();
    check_header(lines.next(), EVENT_HEADER)?;
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f = split_fields(&line, 3, lineno)?;
        let kind = match f[1].trim() {
            "snap_back" => SnapKind::SnapBack,
            "snap_through" => SnapKind::SnapThrough,
            other => {
                return Err(Error::MalformedFile {
                    line: lineno,
                    reason: format!("bad event kind {other:?}"),
                })
            }
        };
        let step_m = match f[2].trim() {
            "" => None,
            s => Some(parse_f64(s, lineno, "step_m")?),
        };
        out.push(TraceEvent {
            time_s: parse_f64(f[0], lineno, "t_s")?,
            kind,
            step_m,
        });
    }
    Ok(out)
}

/// Reads a sample table and, when present, its sibling event table.
pub fn read_csv(path: &Path) -> Result<Trace> {
    let samples = read_samples(BufReader::new(fs::File::open(path)?))?;
    let ev_path = events_path(path);
    let events = if ev_path.exists() {
        read_events(BufReader::new(fs::File::open(ev_path)?))?
    } else {
        Vec::new()
    };
    let tr = Trace::new(samples, events);
    tr.validate()?;
    Ok(tr)
}
