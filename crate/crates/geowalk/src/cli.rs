//! Config-driven experiment runner behind the `geowalk` binary.
//!
//! One JSON config describes a model, a walk and a mode; each mode writes
//! its results as CSV (bulk traces) and JSON (reports) into an output
//! directory, plus a manifest capturing the config hash, seed and library
//! version. Runs with the same config and seed are byte-identical.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::json;

use crate::diagnostics::{contraction_profile, uniformity_stats, wasserstein1};
use crate::error::GeoError;
use crate::geometry::{AmbientVector, RngStream};
use crate::integrator::{ChordIntegrator, ExactSphereIntegrator, GeodesicIntegrator};
use crate::manifolds::{
    ConvexBodyModel, CurvatureBounds, SphereModel, SurfacePoint, ellipsoid_model,
};
use crate::walk::{WalkConfig, budget_report, run_chains, run_coupled};

/// Exit code for configuration problems (unreadable, invalid, bad paths).
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for numerical-contract violations during computation.
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Configuration or I/O problem; exits with code 2.
    Config(String),
    /// Contract violation raised by the library; exits with code 3.
    Numeric(GeoError),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Numeric(e) => write!(f, "numerical contract error: {e}"),
        }
    }
}

impl From<GeoError> for CliError {
    fn from(e: GeoError) -> Self {
        CliError::Numeric(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
pub enum ModelConfig {
    Sphere { radius: f64, dim: usize },
    Ellipsoid { semi_axes: Vec<f64> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkSection {
    #[serde(rename = "T")]
    pub step_time: f64,
    #[serde(rename = "N")]
    pub steps: usize,
    /// Chord-oracle accuracy; 0 selects the exact integrator where one exists.
    #[serde(default)]
    pub theta: f64,
    pub seed: u64,
    /// Defaults to the accuracy budget's chain length when `eps` is given,
    /// otherwise 0.
    pub burn_in: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sample,
    Couple,
    Budget,
    Diagnose,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub walk: WalkSection,
    pub mode: Mode,
    pub eps: Option<f64>,
    #[serde(default = "default_chains")]
    pub chains: usize,
    pub output_dir: PathBuf,
    /// Initial pair distance for couple mode (default 0.5).
    pub d0: Option<f64>,
    /// Trace files compared by diagnose mode.
    pub trace_a: Option<PathBuf>,
    pub trace_b: Option<PathBuf>,
    /// Keep only the last this-many rows of each trace in diagnose mode.
    pub max_points: Option<usize>,
}

fn default_chains() -> usize {
    1
}

enum BuiltModel {
    Sphere(SphereModel),
    Convex {
        body: ConvexBodyModel,
        axes: Vec<f64>,
    },
}

impl BuiltModel {
    fn bounds(&self) -> CurvatureBounds {
        match self {
            BuiltModel::Sphere(m) => m.bounds(),
            BuiltModel::Convex { body, .. } => *body.bounds(),
        }
    }

    fn start_point(&self) -> SurfacePoint {
        match self {
            BuiltModel::Sphere(m) => {
                let mut c = AmbientVector::zeros(m.ambient_dim());
                c[0] = m.radius();
                SurfacePoint::new_unchecked(c)
            }
            BuiltModel::Convex { axes, .. } => {
                let mut c = AmbientVector::zeros(axes.len());
                c[0] = axes[0];
                SurfacePoint::new_unchecked(c)
            }
        }
    }
}

fn build_model(config: &ModelConfig) -> Result<BuiltModel, CliError> {
    match config {
        ModelConfig::Sphere { radius, dim } => Ok(BuiltModel::Sphere(
            SphereModel::new(*radius, *dim).map_err(|e| config_err(e.to_string()))?,
        )),
        ModelConfig::Ellipsoid { semi_axes } => Ok(BuiltModel::Convex {
            body: ellipsoid_model(semi_axes).map_err(|e| config_err(e.to_string()))?,
            axes: semi_axes.clone(),
        }),
    }
}

fn build_integrator(
    model: &BuiltModel,
    theta: f64,
) -> Result<Box<dyn GeodesicIntegrator>, CliError> {
    match model {
        BuiltModel::Sphere(m) if theta == 0.0 => Ok(Box::new(ExactSphereIntegrator::new(*m))),
        BuiltModel::Sphere(m) => {
            let axes = vec![m.radius(); m.ambient_dim()];
            let body = ellipsoid_model(&axes).map_err(|e| config_err(e.to_string()))?;
            Ok(Box::new(
                ChordIntegrator::new(body, theta).map_err(|e| config_err(e.to_string()))?,
            ))
        }
        BuiltModel::Convex { body, .. } => {
            if theta == 0.0 {
                return Err(config_err(
                    "convex bodies have no exact integrator; set walk.theta > 0",
                ));
            }
            Ok(Box::new(
                ChordIntegrator::new(body.clone(), theta).map_err(|e| config_err(e.to_string()))?,
            ))
        }
    }
}

/// 17 significant digits: round-trip exact for 64-bit floats.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// FNV-1a over the raw config bytes; recorded in the manifest.
fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

fn thread_cap() -> Result<usize, CliError> {
    match std::env::var("GEOWALK_THREADS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&n| n >= 1).ok_or_else(|| {
            config_err(format!(
                "GEOWALK_THREADS must be a positive integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| config_err(format!("cannot write {}: {e}", path.display())))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| config_err(format!("cannot serialize {}: {e}", path.display())))?;
    text.push('\n');
    write_file(path, &text)
}

fn trace_csv(traces: &[crate::walk::ChainTrace]) -> String {
    let dim = traces
        .first()
        .and_then(|t| t.points.first())
        .map_or(0, |p| p.coords().len());
    let mut out = String::from("chain_id,step");
    for i in 0..dim {
        out.push_str(&format!(",coord_{i}"));
    }
    out.push_str(",star_calls\n");
    for (chain_id, trace) in traces.iter().enumerate() {
        for (step, point) in trace.points.iter().enumerate() {
            let calls = if step == 0 {
                0
            } else {
                trace.star_calls_per_step[step - 1]
            };
            out.push_str(&format!("{chain_id},{step}"));
            for c in point.coords().iter() {
                out.push(',');
                out.push_str(&fmt_f64(*c));
            }
            out.push_str(&format!(",{calls}\n"));
        }
    }
    out
}

fn read_trace_csv(path: &Path) -> Result<Vec<SurfacePoint>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| config_err(format!("{} is empty", path.display())))?;
    let columns: Vec<&str> = header.split(',').collect();
    let coord_cols: Vec<usize> = columns
        .iter()
        .enumerate()
        .filter(|(_, name)| name.starts_with("coord_"))
        .map(|(i, _)| i)
        .collect();
    if coord_cols.is_empty() {
        return Err(config_err(format!(
            "{} has no coord_* columns",
            path.display()
        )));
    }
    let mut points = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let mut coords = Vec::with_capacity(coord_cols.len());
        for &c in &coord_cols {
            let field = fields.get(c).ok_or_else(|| {
                config_err(format!(
                    "{}:{} is missing column {c}",
                    path.display(),
                    lineno + 2
                ))
            })?;
            let value: f64 = field.parse().map_err(|_| {
                config_err(format!(
                    "{}:{} has non-numeric {field:?}",
                    path.display(),
                    lineno + 2
                ))
            })?;
            coords.push(value);
        }
        points.push(SurfacePoint::new_unchecked(AmbientVector::from_vec(coords)));
    }
    Ok(points)
}

fn effective_burn_in(
    config: &ExperimentConfig,
    bounds: &CurvatureBounds,
) -> Result<usize, CliError> {
    if let Some(b) = config.walk.burn_in {
        return Ok(b);
    }
    match config.eps {
        Some(eps) => {
            let (alpha, beta) = crate::chord::accuracy_constants(bounds);
            let budget = crate::walk::accuracy_budget(bounds, alpha, beta, eps)?;
            Ok(budget.walk_steps as usize)
        }
        None => Ok(0),
    }
}

fn run_sample(config: &ExperimentConfig, out_dir: &Path, seed: u64) -> Result<(), CliError> {
    let model = build_model(&config.model)?;
    let integrator = build_integrator(&model, config.walk.theta)?;
    let bounds = model.bounds();
    let burn_in = effective_burn_in(config, &bounds)?;
    let walk = WalkConfig {
        step_time: config.walk.step_time,
        steps: config.walk.steps,
        theta: config.walk.theta,
        seed,
        burn_in,
    };
    let start = model.start_point();
    let threads = thread_cap()?;
    let traces = run_chains(integrator.as_ref(), &start, &walk, config.chains, threads)?;

    let kept: Vec<&SurfacePoint> = traces
        .iter()
        .flat_map(|t| t.points.iter().skip(burn_in.min(t.points.len())))
        .collect();
    let uniformity = match &model {
        BuiltModel::Sphere(m) if kept.len() >= 100 => {
            let owned: Vec<SurfacePoint> = kept.iter().map(|p| (*p).clone()).collect();
            Some(uniformity_stats(&owned, m)?)
        }
        _ => None,
    };
    let star_total: u64 = traces.iter().map(|t| t.total_star_calls()).sum();

    write_file(&out_dir.join("trace.csv"), &trace_csv(&traces))?;
    write_json(
        &out_dir.join("summary.json"),
        &json!({
            "chains": config.chains,
            "points_per_chain": config.walk.steps,
            "burn_in": burn_in,
            "star_calls_total": star_total,
            "uniformity": uniformity,
        }),
    )
}

fn run_couple(config: &ExperimentConfig, out_dir: &Path, seed: u64) -> Result<(), CliError> {
    let BuiltModel::Sphere(m) = build_model(&config.model)? else {
        return Err(config_err(
            "couple mode needs exact parallel transport; use a sphere model",
        ));
    };
    let d0 = config.d0.unwrap_or(0.5);
    if !(d0 > 0.0 && d0 < std::f64::consts::PI * m.radius()) {
        return Err(config_err(format!(
            "d0 must lie in (0, pi * radius), got {d0}"
        )));
    }
    let mut xc = AmbientVector::zeros(m.ambient_dim());
    xc[0] = m.radius();
    let x = SurfacePoint::new_unchecked(xc);
    let angle = d0 / m.radius();
    let mut yc = AmbientVector::zeros(m.ambient_dim());
    yc[0] = m.radius() * angle.cos();
    yc[1] = m.radius() * angle.sin();
    let y = SurfacePoint::new_unchecked(yc);

    let mut rng = RngStream::new(seed, 0);
    let (ax, ay) = run_coupled(
        &m,
        &x,
        &y,
        config.walk.step_time,
        config.walk.steps,
        &mut rng,
    )?;
    let profile = contraction_profile(&ax, &ay, &m)?;

    let mut csv = String::from("step,dist,ratio\n");
    for i in 0..ax.len() {
        let dist = m.distance(&ax.points[i], &ay.points[i]);
        if i == 0 {
            csv.push_str(&format!("0,{},\n", fmt_f64(dist)));
        } else {
            csv.push_str(&format!(
                "{i},{},{}\n",
                fmt_f64(dist),
                fmt_f64(profile.ratios[i - 1])
            ));
        }
    }
    write_file(&out_dir.join("distances.csv"), &csv)?;

    // the quadrature reference describes one step on the unit 2-sphere;
    // rescale the inputs when the radius differs
    let reference = (m.dim() == 2).then(|| {
        crate::diagnostics::one_step_sphere_contraction_reference(
            d0 / m.radius(),
            config.walk.step_time / m.radius(),
        )
    });
    let mean_ratio = if profile.ratios.is_empty() {
        None
    } else {
        Some(profile.ratios.iter().sum::<f64>() / profile.ratios.len() as f64)
    };
    write_json(
        &out_dir.join("summary.json"),
        &json!({
            "d0": d0,
            "step_time": config.walk.step_time,
            "steps": config.walk.steps,
            "quadrature_reference": reference,
            "mean_ratio": mean_ratio,
            "coalesced_steps": profile.coalesced.iter().filter(|&&c| c).count(),
        }),
    )
}

fn run_budget(config: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    let eps = config
        .eps
        .ok_or_else(|| config_err("budget mode requires eps"))?;
    let model = build_model(&config.model)?;
    let report = budget_report(&model.bounds(), config.walk.step_time, eps)?;
    write_json(
        &out_dir.join("budget.json"),
        &serde_json::to_value(report).map_err(|e| config_err(e.to_string()))?,
    )
}

fn run_diagnose(config: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    let (Some(a_path), Some(b_path)) = (&config.trace_a, &config.trace_b) else {
        return Err(config_err("diagnose mode requires trace_a and trace_b"));
    };
    let mut a = read_trace_csv(a_path)?;
    let mut b = read_trace_csv(b_path)?;
    if let Some(cap) = config.max_points {
        if a.len() > cap {
            a.drain(..a.len() - cap);
        }
        if b.len() > cap {
            b.drain(..b.len() - cap);
        }
    }
    let model = build_model(&config.model)?;
    let (metric_name, distance) = match &model {
        BuiltModel::Sphere(m) => {
            let m = *m;
            (
                "geodesic",
                wasserstein1(&a, &b, move |x, y| m.distance(x, y))?,
            )
        }
        // chord metric: geodesic distances on a convex body have no closed
        // form; the ambient distance underestimates them by at most the
        // curvature-ratio factor reported alongside
        BuiltModel::Convex { .. } => (
            "chord",
            wasserstein1(&a, &b, |x, y| (x.coords() - y.coords()).norm())?,
        ),
    };
    let bounds = model.bounds();
    let chord_to_geodesic = 2.0 * std::f64::consts::PI * (bounds.upper() / bounds.lower()).sqrt();
    write_json(
        &out_dir.join("wasserstein.json"),
        &json!({
            "n": a.len(),
            "distance": distance,
            "metric": metric_name,
            "chord_to_geodesic_factor": chord_to_geodesic,
        }),
    )
}

/// Execute one experiment. `seed_override` and `out_override` take
/// precedence over the config file.
pub fn run(
    config_path: &Path,
    seed_override: Option<u64>,
    out_override: Option<PathBuf>,
) -> Result<(), CliError> {
    let raw = fs::read(config_path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", config_path.display())))?;
    let config: ExperimentConfig = serde_json::from_slice(&raw)
        .map_err(|e| config_err(format!("invalid config {}: {e}", config_path.display())))?;
    let seed = seed_override.unwrap_or(config.walk.seed);
    let out_dir = out_override.unwrap_or_else(|| config.output_dir.clone());
    fs::create_dir_all(&out_dir)
        .map_err(|e| config_err(format!("cannot create {}: {e}", out_dir.display())))?;

    match config.mode {
        Mode::Sample => run_sample(&config, &out_dir, seed)?,
        Mode::Couple => run_couple(&config, &out_dir, seed)?,
        Mode::Budget => run_budget(&config, &out_dir)?,
        Mode::Diagnose => run_diagnose(&config, &out_dir)?,
    }

    write_json(
        &out_dir.join("manifest.json"),
        &json!({
            "config_hash": fnv1a_hex(&raw),
            "seed": seed,
            "version": env!("CARGO_PKG_VERSION"),
            "mode": format!("{:?}", config.mode).to_lowercase(),
        }),
    )
}

const USAGE: &str =
    "usage: geowalk <sample|couple|budget|diagnose> --config <path> [--seed <u64>] [--out <dir>]";

/// Entry point used by the binary: parses arguments, runs, and maps errors
/// to exit codes (2 config, 3 numerical contract).
pub fn run_from_args(args: Vec<String>) -> i32 {
    let mut mode_arg: Option<String> = None;
    let mut config: Option<PathBuf> = None;
    let mut seed: Option<u64> = None;
    let mut out: Option<PathBuf> = None;
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--config" => match it.next() {
                Some(v) => config = Some(PathBuf::from(v)),
                None => {
                    eprintln!("--config needs a value\n{USAGE}");
                    return EXIT_CONFIG;
                }
            },
            "--seed" => match it.next().and_then(|v| v.parse().ok()) {
                Some(v) => seed = Some(v),
                None => {
                    eprintln!("--seed needs an unsigned integer\n{USAGE}");
                    return EXIT_CONFIG;
                }
            },
            "--out" => match it.next() {
                Some(v) => out = Some(PathBuf::from(v)),
                None => {
                    eprintln!("--out needs a value\n{USAGE}");
                    return EXIT_CONFIG;
                }
            },
            "--help" | "-h" => {
                println!("{USAGE}");
                return 0;
            }
            other if mode_arg.is_none() && !other.starts_with('-') => {
                mode_arg = Some(other.to_string());
            }
            other => {
                eprintln!("unexpected argument {other:?}\n{USAGE}");
                return EXIT_CONFIG;
            }
        }
    }
    let Some(mode) = mode_arg else {
        eprintln!("{USAGE}");
        return EXIT_CONFIG;
    };
    if !matches!(mode.as_str(), "sample" | "couple" | "budget" | "diagnose") {
        eprintln!("unknown mode {mode:?}\n{USAGE}");
        return EXIT_CONFIG;
    }
    let Some(config_path) = config else {
        eprintln!("--config is required\n{USAGE}");
        return EXIT_CONFIG;
    };
    // the subcommand must agree with the config's mode field
    let expected = match fs::read(&config_path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", config_path.display())))
        .and_then(|raw| {
            serde_json::from_slice::<ExperimentConfig>(&raw)
                .map_err(|e| config_err(format!("invalid config: {e}")))
        }) {
        Ok(c) => c.mode,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let requested = match mode.as_str() {
        "sample" => Mode::Sample,
        "couple" => Mode::Couple,
        "budget" => Mode::Budget,
        _ => Mode::Diagnose,
    };
    if requested != expected {
        eprintln!("config mode {expected:?} does not match subcommand {mode:?}");
        return EXIT_CONFIG;
    }
    match run(&config_path, seed, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
