//! The four batch commands and their exit-code discipline:
//! 0 success, 1 usage, 2 I/O, 3 verification-bound failure, 4 truncation.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use polwig::fock::{Amplitude, FockDim, FockError};
use polwig::kernel::{KernelError, SParameter};
use polwig::oracle::{self, OracleError};
use polwig::states::{self, ModePair, StateError};
use polwig::wigner::{
    self, sample_grid, sample_grid_odd, Axis, AxisSpec, PhaseSpacePoint, WignerError,
    WignerParams,
};
use polwig::Tolerances;

use crate::output::{self, fmt_float};
use crate::parse::{
    parse_axes, parse_complex, parse_config, parse_grid_record, parse_sweep, FileConfig,
    OutputFormat, ParseError,
};
use crate::presets;

pub const ENV_OUTDIR: &str = "POLWIG_OUTDIR";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Verification(String),
    Truncation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Truncation(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
            CliError::Verification(m) => write!(f, "verification: {m}"),
            CliError::Truncation(m) => write!(f, "truncation: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Usage(e.0)
    }
}

fn map_state(e: StateError) -> CliError {
    match &e {
        StateError::Fock(FockError::TruncationTooSmall { .. }) => {
            CliError::Truncation(e.to_string())
        }
        _ => CliError::Usage(e.to_string()),
    }
}

fn map_oracle(e: OracleError) -> CliError {
    let truncated = matches!(
        &e,
        OracleError::Fock(FockError::TruncationTooSmall { .. })
            | OracleError::Kernel(KernelError::Fock(FockError::TruncationTooSmall { .. }))
            | OracleError::State(StateError::Fock(FockError::TruncationTooSmall { .. }))
    );
    if truncated {
        CliError::Truncation(e.to_string())
    } else {
        CliError::Verification(e.to_string())
    }
}

fn map_wigner(e: WignerError) -> CliError {
    match &e {
        WignerError::NonPositiveCell { .. } => CliError::Verification(e.to_string()),
        WignerError::State(StateError::Fock(FockError::TruncationTooSmall { .. })) => {
            CliError::Truncation(e.to_string())
        }
        _ => CliError::Usage(e.to_string()),
    }
}

/// Options after merging flags, the optional config file, the environment
/// and the built-in defaults (in that order of precedence).
#[derive(Debug, Clone)]
pub struct Resolved {
    pub res: usize,
    pub dim: usize,
    pub seed: u64,
    pub points: usize,
    pub format: OutputFormat,
    pub outdir: Option<PathBuf>,
}

pub struct Flags {
    pub config: Option<PathBuf>,
    pub res: Option<usize>,
    pub dim: Option<usize>,
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub format: Option<String>,
}

pub fn resolve_options(flags: &Flags) -> Result<Resolved, CliError> {
    let cfg = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("config {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => FileConfig::default(),
    };
    let format = match &flags.format {
        Some(f) => OutputFormat::parse(f)?,
        None => cfg.format.unwrap_or(OutputFormat::Csv),
    };
    let outdir = cfg
        .outdir
        .or_else(|| std::env::var_os(ENV_OUTDIR).map(PathBuf::from));
    Ok(Resolved {
        res: flags.res.or(cfg.res).unwrap_or(64),
        dim: flags.dim.or(cfg.dim).unwrap_or(32),
        seed: flags.seed.or(cfg.seed).unwrap_or(oracle::DEFAULT_SEED),
        points: flags.points.or(cfg.points).unwrap_or(100),
        format,
        outdir,
    })
}

fn resolve_out(out: Option<PathBuf>, outdir: &Option<PathBuf>, default_name: String) -> PathBuf {
    match out {
        Some(p) if p.is_absolute() => p,
        Some(p) => match outdir {
            Some(dir) => dir.join(p),
            None => p,
        },
        None => match outdir {
            Some(dir) => dir.join(default_name),
            None => PathBuf::from(default_name),
        },
    }
}

fn write_output(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
        }
    }
    fs::write(path, content).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn grid_content(
    grid: &wigner::WignerGrid,
    format: OutputFormat,
    extra: &[(&str, String)],
) -> String {
    match format {
        OutputFormat::Csv => output::grid_csv(grid, extra),
        OutputFormat::Json => output::grid_json(grid, extra),
        OutputFormat::Svg => output::grid_svg(grid, extra),
    }
}

/// `figure <id>`: the preset surface over (δ, φ_x) ∈ [0, 2π)².
pub fn cmd_figure(
    id: &str,
    opts: &Resolved,
    out: Option<PathBuf>,
) -> Result<PathBuf, CliError> {
    let preset =
        presets::lookup(id).ok_or_else(|| CliError::Usage(format!("unknown preset `{id}`")))?;
    if opts.res < 8 {
        return Err(CliError::Usage(format!("resolution must be at least 8, got {}", opts.res)));
    }
    let grid = sample_grid(
        &preset.params(),
        &preset.base_point(),
        AxisSpec::default_for(Axis::Delta, opts.res),
        AxisSpec::default_for(Axis::PhiX, opts.res),
    )
    .map_err(map_wigner)?;
    let extra = [
        ("command", "figure".to_string()),
        ("preset", preset.id.to_string()),
        ("preset_phi_beta", fmt_float(preset.phi_beta)),
        ("preset_delta_hs", fmt_float(preset.delta_hs)),
    ];
    let path = resolve_out(
        out,
        &opts.outdir,
        format!("figure_{id}.{}", opts.format.extension()),
    );
    write_output(&path, &grid_content(&grid, opts.format, &extra))?;
    Ok(path)
}

/// `grid`: a surface for a free-form parameter record over two chosen axes.
pub fn cmd_grid(
    record_text: &str,
    axes_text: &str,
    opts: &Resolved,
    out: Option<PathBuf>,
) -> Result<PathBuf, CliError> {
    let record = parse_grid_record(record_text)?;
    let (a1, a2) = parse_axes(axes_text)?;
    if opts.res < 8 {
        return Err(CliError::Usage(format!("resolution must be at least 8, got {}", opts.res)));
    }
    let ax1 = AxisSpec::default_for(a1, opts.res);
    let ax2 = AxisSpec::default_for(a2, opts.res);
    let grid = match record.order {
        3 => sample_grid_odd(&record.params, &record.point, ax1, ax2),
        _ => sample_grid(&record.params, &record.point, ax1, ax2),
    }
    .map_err(map_wigner)?;
    let extra = [
        ("command", "grid".to_string()),
        ("order", record.order.to_string()),
    ];
    let path = resolve_out(out, &opts.outdir, format!("grid.{}", opts.format.extension()));
    write_output(&path, &grid_content(&grid, opts.format, &extra))?;
    Ok(path)
}

fn fmt_complex(z: Complex64) -> String {
    format!("{}@{}", fmt_float(z.norm()), fmt_float(Amplitude(z).phase()))
}

/// `stokes`: closed-form Stokes table over an amplitude scale sweep, with
/// the 𝒥_sum → 0 limit row always included.
pub fn cmd_stokes(
    beta_text: &str,
    gamma_text: &str,
    sweep_text: &str,
    opts: &Resolved,
    out: Option<PathBuf>,
) -> Result<PathBuf, CliError> {
    let beta = parse_complex(beta_text)?;
    let gamma = parse_complex(gamma_text)?;
    let sweep = parse_sweep(sweep_text)?;
    let mut scales = sweep.values();
    if scales.first() != Some(&0.0) {
        scales.insert(0, 0.0);
    }
    let rows: Vec<(f64, f64, f64, f64, f64, states::StokesVector)> = scales
        .iter()
        .map(|&t| {
            let modes = ModePair::new(
                Amplitude(beta * Complex64::from(t)),
                Amplitude(gamma * Complex64::from(t)),
            );
            let sv = states::stokes_closed(&modes);
            (
                t,
                modes.beta.modulus(),
                modes.gamma.modulus(),
                modes.j_sum(),
                states::lambda_factor(modes.j_sum()),
                sv,
            )
        })
        .collect();
    let header = [
        ("command", "stokes".to_string()),
        ("beta", fmt_complex(beta)),
        ("gamma", fmt_complex(gamma)),
        (
            "sweep",
            format!("{}:{}:{}", fmt_float(sweep.start), fmt_float(sweep.stop), sweep.count),
        ),
    ];
    let content = match opts.format {
        OutputFormat::Csv => output::stokes_csv(&header, &rows),
        OutputFormat::Json => {
            let json_rows: Vec<serde_json::Value> = rows
                .iter()
                .map(|(t, bm, gm, js, lam, sv)| {
                    json!({
                        "scale": t, "beta_mod": bm, "gamma_mod": gm,
                        "j_sum": js, "lambda": lam,
                        "s0": sv.s0, "s1": sv.s1, "s2": sv.s2, "s3": sv.s3,
                    })
                })
                .collect();
            let meta: serde_json::Map<String, serde_json::Value> = header
                .iter()
                .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.clone())))
                .collect();
            let mut text = serde_json::to_string_pretty(&json!({
                "generator": output::GENERATOR,
                "metadata": meta,
                "rows": json_rows,
            }))
            .expect("stokes json");
            text.push('\n');
            text
        }
        OutputFormat::Svg => {
            return Err(CliError::Usage("stokes supports csv or json output".into()))
        }
    };
    let path = resolve_out(out, &opts.outdir, format!("stokes.{}", opts.format.extension()));
    write_output(&path, &content)?;
    Ok(path)
}

struct CheckLog {
    entries: Vec<serde_json::Value>,
    failed: Vec<String>,
}

impl CheckLog {
    fn new() -> Self {
        CheckLog { entries: Vec::new(), failed: Vec::new() }
    }

    fn record(&mut self, name: &str, pass: bool, details: serde_json::Value) {
        let mut obj = json!({ "name": name, "pass": pass });
        obj.as_object_mut()
            .unwrap()
            .insert("details".into(), details);
        self.entries.push(obj);
        if !pass {
            self.failed.push(name.to_string());
        }
    }
}

/// `verify`: the oracle-equivalence suite at the requested dimension, plus
/// the fixed-dimension criterion, convergence, Stokes, positivity and
/// odd-order checks. The JSON report is written even when a bound fails.
pub fn cmd_verify(
    opts: &Resolved,
    out: Option<PathBuf>,
) -> Result<(PathBuf, bool), CliError> {
    if opts.points == 0 {
        return Err(CliError::Usage("points must be positive".into()));
    }
    if opts.dim < 4 {
        return Err(CliError::Usage(format!("dim must be at least 4, got {}", opts.dim)));
    }
    let dim = FockDim::new(opts.dim).map_err(|e| CliError::Usage(e.to_string()))?;
    let tol = Tolerances::default();
    let path = resolve_out(out, &opts.outdir, "verify.json".to_string());

    // run parameters drawn once from the seed: |β| = |γ| = 0.7 with random
    // phases and a random kernel-index modulus
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let tau = std::f64::consts::TAU;
    let params = WignerParams {
        beta_mod: 0.7,
        beta_phase: rng.gen_range(0.0..tau),
        p2_mod: rng.gen_range(0.5..1.25),
        p2_phase: rng.gen_range(0.0..tau),
        phs_mod: 1.0,
        phs_phase: rng.gen_range(0.0..tau),
    };
    let modes = params.modes(0);

    let mut log = CheckLog::new();
    let result = run_verify_checks(&mut log, &mut rng, &params, &modes, dim, opts, tol);

    let pass = log.failed.is_empty() && result.is_ok();
    let mut doc = json!({
        "generator": output::GENERATOR,
        "command": "verify",
        "seed": opts.seed,
        "dim": opts.dim,
        "points": opts.points,
        "params": {
            "beta_mod": params.beta_mod,
            "beta_phase": params.beta_phase,
            "p2_mod": params.p2_mod,
            "p2_phase": params.p2_phase,
            "phs_mod": params.phs_mod,
            "phs_phase": params.phs_phase,
        },
        "checks": log.entries,
        "pass": pass,
    });
    if let Err(e) = &result {
        doc.as_object_mut()
            .unwrap()
            .insert("error".into(), json!(e.to_string()));
    }
    let mut text = serde_json::to_string_pretty(&doc).expect("verify json");
    text.push('\n');
    write_output(&path, &text)?;

    result?;
    if !pass {
        return Err(CliError::Verification(format!(
            "bounds violated: {}",
            log.failed.join(", ")
        )));
    }
    Ok((path, pass))
}

fn run_verify_checks(
    log: &mut CheckLog,
    rng: &mut ChaCha8Rng,
    params: &WignerParams,
    modes: &ModePair,
    dim: FockDim,
    opts: &Resolved,
    tol: Tolerances,
) -> Result<(), CliError> {
    // 1. oracle equivalence at the requested dimension
    let report = oracle::compare_closed_form_seeded(params, opts.points, 1.2, opts.seed, dim)
        .map_err(map_oracle)?;
    log.record(
        "oracle_equivalence",
        report.max_rel_error < 1e-6,
        json!({
            "points": report.points,
            "max_rel_error": report.max_rel_error,
            "bound": 1e-6,
            "seed": report.seed,
        }),
    );

    // 2. negative control: corrupting the prefactor exponent must be seen
    let state = states::even_ecs(modes, dim).map_err(map_state)?;
    let points = oracle::sample_points(params, opts.points, 1.2, opts.seed);
    let mut control = 0.0f64;
    for point in &points {
        if (point.alpha_mod - 0.8).abs() > 0.25 {
            continue;
        }
        let cell = params.with_delta(point.delta);
        let a2 = point.alpha_mod * point.alpha_mod;
        let corrupted = wigner::w2_closed(point, &cell)
            * (-2.0 * (1.0 + cell.p2_mod * cell.p2_mod) * (a2 - a2 * a2)).exp();
        let brute = oracle::w_bruteforce(
            &state,
            point.alpha(),
            cell.kernel_index(),
            SParameter::WIGNER,
            dim,
        )
        .map_err(map_oracle)?;
        control = control.max(oracle::rel_error(corrupted, brute));
    }
    log.record(
        "negative_control",
        control > 1e-2,
        json!({ "max_rel_error": control, "threshold": 1e-2 }),
    );

    // 3. criterion residual: shrinking over the fixed scan dims
    let p2 = states::polarization_index(modes, 2).map_err(map_state)?;
    let mut residuals = Vec::new();
    for n in [16usize, 24, 32] {
        let fd = FockDim::new(n).expect("scan dim");
        let psi = states::even_ecs_truncated(modes, fd);
        residuals.push(states::criterion_residual(&psi, p2, fd).map_err(map_state)?);
    }
    let monotone = residuals.windows(2).all(|w| w[1] < w[0]);
    log.record(
        "criterion_residual",
        monotone && residuals[2] < 1e-8,
        json!({ "dims": [16, 24, 32], "residuals": residuals, "bound": 1e-8 }),
    );

    // 4. truncation convergence of the brute-force value
    let scan = oracle::convergence_scan(
        |fd| states::even_ecs_truncated(modes, fd),
        Amplitude::from_polar(0.8, 1.1),
        p2,
        SParameter::WIGNER,
        &[16, 24, 32],
        tol.convergence,
    )
    .map_err(map_oracle)?;
    log.record(
        "truncation_convergence",
        scan.converged,
        json!({ "dims": scan.dims, "values": scan.values, "rel_gaps": scan.rel_gaps }),
    );

    // 5. Stokes: closed form against the operator oracle, plus the limits
    let sv_closed = states::stokes_closed(modes);
    let sv_oracle = states::stokes_oracle(&state, dim).map_err(map_state)?;
    let stokes_err = [
        sv_closed.s0 - sv_oracle.s0,
        sv_closed.s1 - sv_oracle.s1,
        sv_closed.s2 - sv_oracle.s2,
        sv_closed.s3 - sv_oracle.s3,
    ]
    .iter()
    .map(|d| d.abs())
    .fold(0.0, f64::max);
    let origin = states::stokes_closed(&ModePair::new(Amplitude::zero(), Amplitude::zero()));
    let origin_zero =
        origin.s0 == 0.0 && origin.s1 == 0.0 && origin.s2 == 0.0 && origin.s3 == 0.0;
    // equal moduli must zero s1 exactly; γ = −β has a bitwise-equal modulus
    let flipped = ModePair::new(modes.beta, Amplitude(-modes.beta.value()));
    let equal_moduli_s1 = states::stokes_closed(&flipped).s1 == 0.0;
    let lambda_monotone = [0.1, 1.0, 10.0, 50.0]
        .windows(2)
        .all(|w| states::lambda_factor(w[0]) < states::lambda_factor(w[1]));
    log.record(
        "stokes",
        stokes_err < 1e-8 && origin_zero && equal_moduli_s1 && lambda_monotone,
        json!({
            "max_component_error": stokes_err,
            "bound": 1e-8,
            "origin_zero": origin_zero,
            "equal_moduli_s1_zero": equal_moduli_s1,
            "lambda_monotone": lambda_monotone,
        }),
    );

    // 6. positivity of the closed form over random draws
    let draws = 10_000usize;
    let mut min_value = f64::INFINITY;
    for _ in 0..draws {
        let p = WignerParams {
            beta_mod: rng.gen_range(0.0..1.2),
            beta_phase: rng.gen_range(0.0..std::f64::consts::TAU),
            p2_mod: rng.gen_range(0.0..1.5),
            p2_phase: rng.gen_range(0.0..std::f64::consts::TAU),
            phs_mod: rng.gen_range(0.0..1.5),
            phs_phase: rng.gen_range(0.0..std::f64::consts::TAU),
        };
        let point = PhaseSpacePoint::consistent(
            &p,
            rng.gen_range(0.0..1.5),
            rng.gen_range(0.0..std::f64::consts::TAU),
            rng.gen_range(0..2u8),
            rng.gen_range(0..2u8),
            rng.gen_range(0..2u8),
        );
        let w = wigner::w2_closed(&point, &p);
        if !(w.is_finite() && w > 0.0) {
            min_value = f64::NEG_INFINITY;
            break;
        }
        min_value = min_value.min(w);
    }
    log.record(
        "positivity",
        min_value > 0.0,
        json!({ "draws": draws, "min_value": min_value }),
    );

    // 7. odd order: flat in φ_x near the origin, tracks the proportional
    // closed form up to one constant; the wide-radius spread is recorded
    // because the flatness is a small-displacement statement
    let p3 = states::polarization_index(modes, 3).map_err(map_state)?;
    let w3 = wigner::w3_closed(modes, p3).map_err(map_wigner)?;
    let sweep_at = |amod: f64| -> Result<Vec<f64>, CliError> {
        (0..24)
            .map(|i| {
                let phi = std::f64::consts::TAU * i as f64 / 24.0;
                oracle::w_bruteforce(
                    &state,
                    Amplitude::from_polar(amod, phi),
                    p3,
                    SParameter::WIGNER,
                    dim,
                )
                .map_err(map_oracle)
            })
            .collect()
    };
    let flat = sweep_at(0.02)?;
    let spread = |vals: &[f64]| {
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (hi - lo) / hi.abs().max(1e-300)
    };
    let near_spread = spread(&flat);
    let ratios: Vec<f64> = flat.iter().map(|v| v / w3).collect();
    let ratio_spread = spread(&ratios);
    let wide_spread = spread(&sweep_at(0.8)?);
    log.record(
        "odd_order_intensity_dependence",
        near_spread < 1e-6 && ratio_spread < 1e-6,
        json!({
            "alpha_mod": 0.02,
            "phi_spread": near_spread,
            "ratio_spread": ratio_spread,
            "bound": 1e-6,
            "alpha_mod_wide": 0.8,
            "phi_spread_wide": wide_spread,
        }),
    );

    Ok(())
}
