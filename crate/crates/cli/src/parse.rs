//! Text parsers for everything the CLI reads: the key=value config file,
//! free-form grid parameter records, complex amplitudes, sweep specs and
//! axis pairs.
//!
//! All of these consume untrusted input, so they must never panic: every
//! failure is a `ParseError`, numbers are rejected unless finite, and
//! unknown keys are reported rather than ignored.

use std::fmt;
use std::path::PathBuf;

use num_complex::Complex64;
use polwig::wigner::{Axis, PhaseSpacePoint, WignerParams};
use polwig::wrap_angle;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError(msg.into()))
}

pub fn parse_f64(text: &str) -> Result<f64, ParseError> {
    let t = text.trim();
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => err(format!("non-finite number `{v}`")),
        Err(_) => err(format!("malformed number `{t}`")),
    }
}

fn parse_usize(text: &str) -> Result<usize, ParseError> {
    text.trim()
        .parse::<usize>()
        .map_err(|_| ParseError(format!("malformed integer `{}`", text.trim())))
}

fn parse_u64(text: &str) -> Result<u64, ParseError> {
    text.trim()
        .parse::<u64>()
        .map_err(|_| ParseError(format!("malformed integer `{}`", text.trim())))
}

fn parse_branch(text: &str) -> Result<u8, ParseError> {
    match text.trim() {
        "0" => Ok(0),
        "1" => Ok(1),
        other => err(format!("branch index must be 0 or 1, got `{other}`")),
    }
}

/// Output format selector shared by the emitting subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl OutputFormat {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        match text.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            other => err(format!("unknown format `{other}` (expected csv, json or svg)")),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Svg => "svg",
        }
    }
}

/// `key = value` lines; `#` comments and blank lines are skipped.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>, ParseError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(format!("line {}: expected key=value", lineno + 1));
        };
        let key = key.trim();
        if key.is_empty() {
            return err(format!("line {}: empty key", lineno + 1));
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Defaults read from the optional config file. Later occurrences of a key
/// override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub res: Option<usize>,
    pub dim: Option<usize>,
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub format: Option<OutputFormat>,
    pub outdir: Option<PathBuf>,
}

pub fn parse_config(text: &str) -> Result<FileConfig, ParseError> {
    let mut cfg = FileConfig::default();
    for (key, value) in parse_key_values(text)? {
        match key.as_str() {
            "res" => cfg.res = Some(parse_usize(&value)?),
            "dim" => cfg.dim = Some(parse_usize(&value)?),
            "seed" => cfg.seed = Some(parse_u64(&value)?),
            "points" => cfg.points = Some(parse_usize(&value)?),
            "format" => cfg.format = Some(OutputFormat::parse(&value)?),
            "outdir" => cfg.outdir = Some(PathBuf::from(value)),
            other => return err(format!("unknown config key `{other}`")),
        }
    }
    Ok(cfg)
}

/// A complex amplitude in cartesian (`0.7`, `1+2i`, `-0.3i`) or polar
/// (`0.7@1.0472`, modulus@phase) notation.
pub fn parse_complex(text: &str) -> Result<Complex64, ParseError> {
    let t = text.trim();
    if t.is_empty() {
        return err("empty complex number");
    }
    if let Some((modulus, phase)) = t.split_once('@') {
        let m = parse_f64(modulus)?;
        if m < 0.0 {
            return err(format!("negative modulus {m}"));
        }
        return Ok(Complex64::from_polar(m, parse_f64(phase)?));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(parse_f64(t)?, 0.0));
    };
    // split `a±b` at the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let c = bytes[idx];
        if (c == b'+' || c == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
            split = Some(idx);
            break;
        }
    }
    match split {
        Some(idx) => {
            let re = parse_f64(&body[..idx])?;
            let im = match &body[idx..] {
                "+" => 1.0,
                "-" => -1.0,
                rest => parse_f64(rest)?,
            };
            Ok(Complex64::new(re, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                rest => parse_f64(rest)?,
            };
            Ok(Complex64::new(0.0, im))
        }
    }
}

/// Inclusive sweep specification `start:stop:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + i as f64 * step).collect()
    }
}

pub fn parse_sweep(text: &str) -> Result<SweepSpec, ParseError> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    if parts.len() != 3 {
        return err(format!("sweep must be start:stop:count, got `{}`", text.trim()));
    }
    let start = parse_f64(parts[0])?;
    let stop = parse_f64(parts[1])?;
    let count = parse_usize(parts[2])?;
    if count == 0 {
        return err("sweep count must be at least 1");
    }
    if start < 0.0 {
        return err(format!("sweep start must be nonnegative, got {start}"));
    }
    if stop < start {
        return err(format!("sweep stop {stop} is below start {start}"));
    }
    Ok(SweepSpec { start, stop, count })
}

/// Two distinct comma-separated axis names out of delta, phi_x, alpha_mod.
pub fn parse_axes(text: &str) -> Result<(Axis, Axis), ParseError> {
    let parts: Vec<&str> = text.trim().split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return err(format!("expected two comma-separated axes, got `{}`", text.trim()));
    }
    let axis = |name: &str| match name {
        "delta" => Ok(Axis::Delta),
        "phi_x" => Ok(Axis::PhiX),
        "alpha_mod" => Ok(Axis::AlphaMod),
        other => err(format!("unknown axis `{other}` (expected delta, phi_x or alpha_mod)")),
    };
    Ok((axis(parts[0])?, axis(parts[1])?))
}

/// A fully resolved free-form parameter record for the grid command.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRecord {
    pub order: u32,
    pub params: WignerParams,
    pub point: PhaseSpacePoint,
}

/// Parse a comma/semicolon/newline-separated list of `key=value` pairs into
/// a grid record, filling unspecified entries with the figure-regime
/// defaults. `k` defaults to `m`; `delta` defaults to the value consistent
/// with `p2_phase`, and an explicit `delta` refreshes `p2_phase` to match.
pub fn parse_grid_record(text: &str) -> Result<GridRecord, ParseError> {
    let mut params = WignerParams {
        beta_mod: 0.7,
        beta_phase: 0.0,
        p2_mod: 1.0,
        p2_phase: 0.0,
        phs_mod: 1.0,
        phs_phase: 0.0,
    };
    let mut order = 2u32;
    let mut alpha_mod = 0.8f64;
    let mut phi_x = 0.0f64;
    let mut m = 1u8;
    let mut l = 0u8;
    let mut k: Option<u8> = None;
    let mut delta: Option<f64> = None;

    for piece in text.split([',', ';', '\n']) {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let Some((key, value)) = piece.split_once('=') else {
            return err(format!("expected key=value, got `{piece}`"));
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "beta_mod" => params.beta_mod = nonnegative(key, parse_f64(value)?)?,
            "beta_phase" => params.beta_phase = wrap_angle(parse_f64(value)?),
            "p2_mod" => params.p2_mod = nonnegative(key, parse_f64(value)?)?,
            "p2_phase" => params.p2_phase = wrap_angle(parse_f64(value)?),
            "phs_mod" => params.phs_mod = nonnegative(key, parse_f64(value)?)?,
            "phs_phase" => params.phs_phase = wrap_angle(parse_f64(value)?),
            "alpha_mod" => alpha_mod = nonnegative(key, parse_f64(value)?)?,
            "phi_x" => phi_x = wrap_angle(parse_f64(value)?),
            "delta" => delta = Some(wrap_angle(parse_f64(value)?)),
            "m" => m = parse_branch(value)?,
            "l" => l = parse_branch(value)?,
            "k" => k = Some(parse_branch(value)?),
            "order" => {
                order = match value {
                    "2" => 2,
                    "3" => 3,
                    other => return err(format!("order must be 2 or 3, got `{other}`")),
                }
            }
            other => return err(format!("unknown parameter `{other}`")),
        }
    }

    let k = k.unwrap_or(m);
    let point = match delta {
        Some(d) => {
            params = params.with_delta(d);
            PhaseSpacePoint { alpha_mod, phi_x, delta: d, m, l, k }
        }
        None => PhaseSpacePoint::consistent(&params, alpha_mod, phi_x, m, l, k),
    };
    Ok(GridRecord { order, params, point })
}

fn nonnegative(key: &str, v: f64) -> Result<f64, ParseError> {
    if v < 0.0 {
        err(format!("{key} must be nonnegative, got {v}"))
    } else {
        Ok(v)
    }
}
