//! The geodesic walk, its coupled-pair construction, and cost budgets.
//!
//! One walk step samples a uniform tangent direction at the current point
//! and follows the (exact or chord-approximated) geodesic for a fixed time.
//! The coupled runner drives a second chain whose velocity is the parallel
//! transport of the first chain's, which makes the pair contract on
//! positively curved surfaces. Budget helpers turn curvature bounds and a
//! target accuracy into a chord angle, a chain length and an oracle-call
//! count.

use std::f64::consts::PI;

use crate::chord::accuracy_constants;
use crate::error::{GeoError, Result};
use crate::geometry::{AmbientVector, RngStream, sample_unit_tangent};
use crate::integrator::{FINAL_ADJUST_CAP, GeodesicIntegrator};
use crate::manifolds::{CurvatureBounds, SphereModel, SurfacePoint, UnitTangent};

/// Parameters of one walk run.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WalkConfig {
    /// Geodesic time per step.
    pub step_time: f64,
    /// Number of recorded points (the start counts as the first).
    pub steps: usize,
    /// Chord-oracle accuracy; 0 means an exact integrator is in use.
    pub theta: f64,
    pub seed: u64,
    /// Points discarded by summary statistics (the raw trace keeps them).
    pub burn_in: usize,
}

/// Recorded phase-space history of one chain: `points[i]` with the sampled
/// direction `velocities[i]` leading from it, and the oracle cost of that
/// transition.
#[derive(Debug, Clone)]
pub struct ChainTrace {
    pub points: Vec<SurfacePoint>,
    pub velocities: Vec<AmbientVector>,
    pub star_calls_per_step: Vec<u64>,
}

impl ChainTrace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_star_calls(&self) -> u64 {
        self.star_calls_per_step.iter().sum()
    }
}

/// One transition of the walk.
#[derive(Debug, Clone)]
pub struct WalkStep {
    pub next: SurfacePoint,
    /// The sampled direction at the previous point.
    pub velocity: UnitTangent,
    pub star_calls: u64,
}

/// Sample a uniform tangent direction at `state` and follow the geodesic
/// for `step_time`. A zero step time samples the direction but stays put.
pub fn walk_step(
    integrator: &dyn GeodesicIntegrator,
    state: &SurfacePoint,
    step_time: f64,
    rng: &mut RngStream,
) -> Result<WalkStep> {
    let normal = integrator.surface_normal(state)?;
    let dir = sample_unit_tangent(rng, &normal)?;
    let velocity = UnitTangent {
        at: state.clone(),
        dir,
    };
    if step_time == 0.0 {
        return Ok(WalkStep {
            next: state.clone(),
            velocity,
            star_calls: 0,
        });
    }
    let out = integrator.integrate(&velocity, step_time)?;
    Ok(WalkStep {
        next: out.endpoint,
        velocity,
        star_calls: out.star_calls,
    })
}

fn check_step_time(bounds: Option<&CurvatureBounds>, step_time: f64) -> Result<()> {
    if !step_time.is_finite() || step_time <= 0.0 {
        return Err(GeoError::Contract(format!(
            "step time must be positive, got {step_time}"
        )));
    }
    if let Some(b) = bounds {
        let t_max = b.max_step_time();
        if step_time > t_max * (1.0 + 1e-12) {
            return Err(GeoError::Contract(format!(
                "step time {step_time} exceeds the curvature limit {t_max:.6}"
            )));
        }
    }
    Ok(())
}

/// Run one chain of `config.steps` points from `start`. The random stream
/// is `(config.seed, stream_id)`, so chains with distinct ids are
/// independent yet individually reproducible.
pub fn run_walk(
    integrator: &dyn GeodesicIntegrator,
    start: &SurfacePoint,
    config: &WalkConfig,
    stream_id: u64,
) -> Result<ChainTrace> {
    if config.steps == 0 {
        return Err(GeoError::Contract(
            "a trace needs at least one point".into(),
        ));
    }
    check_step_time(integrator.curvature_bounds(), config.step_time)?;
    let mut rng = RngStream::new(config.seed, stream_id);
    let mut points = Vec::with_capacity(config.steps);
    let mut velocities = Vec::with_capacity(config.steps.saturating_sub(1));
    let mut star_calls = Vec::with_capacity(config.steps.saturating_sub(1));
    points.push(start.clone());
    for _ in 1..config.steps {
        let step = walk_step(
            integrator,
            points.last().unwrap(),
            config.step_time,
            &mut rng,
        )?;
        velocities.push(step.velocity.dir);
        star_calls.push(step.star_calls);
        points.push(step.next);
    }
    Ok(ChainTrace {
        points,
        velocities,
        star_calls_per_step: star_calls,
    })
}

/// Run `chains` independent chains, at most `max_threads` in parallel.
/// Chain `c` owns stream id `c`; the output order and contents do not
/// depend on scheduling.
pub fn run_chains(
    integrator: &dyn GeodesicIntegrator,
    start: &SurfacePoint,
    config: &WalkConfig,
    chains: usize,
    max_threads: usize,
) -> Result<Vec<ChainTrace>> {
    let workers = max_threads.clamp(1, chains.max(1));
    if chains == 0 {
        return Ok(Vec::new());
    }
    if workers == 1 {
        return (0..chains)
            .map(|c| run_walk(integrator, start, config, c as u64))
            .collect();
    }
    let mut slots: Vec<Option<Result<ChainTrace>>> = Vec::new();
    slots.resize_with(chains, || None);
    std::thread::scope(|scope| {
        let (tx, rx) = std::sync::mpsc::channel();
        for w in 0..workers {
            let tx = tx.clone();
            scope.spawn(move || {
                let mut c = w;
                while c < chains {
                    let trace = run_walk(integrator, start, config, c as u64);
                    if tx.send((c, trace)).is_err() {
                        return;
                    }
                    c += workers;
                }
            });
        }
        drop(tx);
        for (c, trace) in rx {
            slots[c] = Some(trace);
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("every chain index was scheduled"))
        .collect()
}

/// Result of one coupled transition.
#[derive(Debug, Clone)]
pub struct CoupledStep {
    pub next_x: SurfacePoint,
    pub next_y: SurfacePoint,
    /// The transported direction used at `y`.
    pub velocity_y: AmbientVector,
}

/// Advance a coupled pair once: the second chain moves along the parallel
/// transport of `u` from `x` to `y`. Requires exact transport, hence a
/// sphere. Fails if `x` and `y` are antipodal.
pub fn coupled_step(
    m: &SphereModel,
    x: &SurfacePoint,
    y: &SurfacePoint,
    u: &AmbientVector,
    step_time: f64,
) -> Result<CoupledStep> {
    let v = m.parallel_transport(u, x, y)?;
    let next_x = m
        .geodesic(
            &UnitTangent {
                at: x.clone(),
                dir: u.clone(),
            },
            step_time,
        )
        .at;
    let next_y = m
        .geodesic(
            &UnitTangent {
                at: y.clone(),
                dir: v.clone(),
            },
            step_time,
        )
        .at;
    Ok(CoupledStep {
        next_x,
        next_y,
        velocity_y: v,
    })
}

/// Run two coupled chains of `steps` points from `x` and `y`. Each marginal
/// chain is a plain geodesic walk; the coupling only correlates them.
pub fn run_coupled(
    m: &SphereModel,
    x: &SurfacePoint,
    y: &SurfacePoint,
    step_time: f64,
    steps: usize,
    rng: &mut RngStream,
) -> Result<(ChainTrace, ChainTrace)> {
    if steps == 0 {
        return Err(GeoError::Contract(
            "a trace needs at least one point".into(),
        ));
    }
    let bounds = m.bounds();
    check_step_time(Some(&bounds), step_time)?;
    let mut ax = ChainTrace {
        points: vec![x.clone()],
        velocities: Vec::new(),
        star_calls_per_step: Vec::new(),
    };
    let mut ay = ChainTrace {
        points: vec![y.clone()],
        velocities: Vec::new(),
        star_calls_per_step: Vec::new(),
    };
    for _ in 1..steps {
        let cx = ax.points.last().unwrap().clone();
        let cy = ay.points.last().unwrap().clone();
        let n = m.outward_normal(&cx);
        let u = sample_unit_tangent(rng, &n)?;
        let step = coupled_step(m, &cx, &cy, &u, step_time)?;
        ax.velocities.push(u);
        ay.velocities.push(step.velocity_y);
        ax.star_calls_per_step.push(0);
        ay.star_calls_per_step.push(0);
        ax.points.push(step.next_x);
        ay.points.push(step.next_y);
    }
    Ok((ax, ay))
}

/// Ceiling that tolerates floating-point noise at integer boundaries.
fn noise_tolerant_ceil(x: f64) -> f64 {
    let nearest = x.round();
    if (x - nearest).abs() < 1e-9 {
        nearest
    } else {
        x.ceil()
    }
}

/// Steps needed to bring the worst-case Wasserstein distance to
/// stationarity below `eps`, from the per-step contraction factor
/// `cos(sqrt(lower) * step_time)`.
///
/// `diameter` defaults to the curvature diameter bound. Returns 0 when
/// `eps` already covers the diameter or when the contraction factor is
/// zero to working precision (the degenerate one-step regime).
pub fn mixing_time_bound(
    bounds: &CurvatureBounds,
    step_time: f64,
    eps: f64,
    diameter: Option<f64>,
) -> Result<u64> {
    check_step_time(Some(bounds), step_time)?;
    if !eps.is_finite() || eps <= 0.0 {
        return Err(GeoError::Contract(format!(
            "tolerance must be positive, got {eps}"
        )));
    }
    let d = diameter.unwrap_or_else(|| bounds.diameter_bound());
    if eps >= d {
        return Ok(0);
    }
    let factor = (bounds.sqrt_lower() * step_time).cos();
    if factor <= 1e-15 {
        return Ok(0);
    }
    let raw = (eps / d).ln() / factor.ln();
    Ok(noise_tolerant_ceil(raw).max(0.0) as u64)
}

/// Chord angle and chain length meeting a target sampling accuracy.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AccuracyBudget {
    /// Oracle accuracy parameter for the requested `eps`; scales linearly
    /// in `eps`.
    pub theta: f64,
    /// Walk transitions after which the approximate chain is within `eps`
    /// of uniform.
    pub walk_steps: u64,
    /// Set when the curvature bounds coincide: the contraction factor is
    /// then exactly zero and the step formula degenerates, so the chain
    /// length falls back to 1 instead of trusting the formula.
    pub degenerate_curvature: bool,
}

/// Accuracy budget from curvature bounds, oracle accuracy constants
/// `(alpha, beta)` and target Wasserstein error `eps`, at the maximal
/// admissible step time.
pub fn accuracy_budget(
    bounds: &CurvatureBounds,
    alpha: f64,
    beta: f64,
    eps: f64,
) -> Result<AccuracyBudget> {
    if !(eps > 0.0 && alpha > 0.0 && beta > 0.0) {
        return Err(GeoError::Contract(format!(
            "eps, alpha, beta must be positive, got ({eps}, {alpha}, {beta})"
        )));
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let kappa = bounds.contraction_coefficient();
    let theta = eps * bounds.sqrt_upper() * kappa
        / (2.0 * (1.0 + half_pi * alpha + half_pi * half_pi * beta));
    if bounds.is_degenerate() {
        return Ok(AccuracyBudget {
            theta,
            walk_steps: 1,
            degenerate_curvature: true,
        });
    }
    let raw = (eps * bounds.sqrt_lower() / (2.0 * PI)).ln() / bounds.contraction_cosine().ln();
    Ok(AccuracyBudget {
        theta,
        walk_steps: noise_tolerant_ceil(raw).max(0.0) as u64,
        degenerate_curvature: false,
    })
}

/// Total chord-oracle calls to produce one sample within `eps` of uniform
/// on a convex-body boundary, using the chord oracle's accuracy constants.
pub fn oracle_call_budget(bounds: &CurvatureBounds, eps: f64) -> Result<u64> {
    let (alpha, beta) = accuracy_constants(bounds);
    let budget = accuracy_budget(bounds, alpha, beta, eps)?;
    let delta_min = 2.0 * budget.theta.sin() / bounds.sqrt_upper();
    let per_transition = (bounds.max_step_time() / delta_min).ceil() as u64 + FINAL_ADJUST_CAP;
    Ok((budget.walk_steps.max(1)).saturating_mul(per_transition))
}

/// Everything the budget formulas produce for one `(bounds, step_time, eps)`
/// triple. `delta_min` is the geometric minimum chord `2 sin(theta)/sqrt(upper)`;
/// the `_floor` variants use the cruder linear floor `theta/(2 sqrt(upper))`
/// for comparison.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BudgetReport {
    pub kappa: f64,
    pub theta_eps: f64,
    pub i_eps: u64,
    pub t_mix: u64,
    pub delta_min: f64,
    pub delta_min_floor: f64,
    pub n_eps: u64,
    pub n_eps_floor: u64,
    pub degenerate_curvature: bool,
}

pub fn budget_report(bounds: &CurvatureBounds, step_time: f64, eps: f64) -> Result<BudgetReport> {
    let (alpha, beta) = accuracy_constants(bounds);
    let budget = accuracy_budget(bounds, alpha, beta, eps)?;
    let t_mix = mixing_time_bound(bounds, step_time, eps, None)?;
    let sqrt_upper = bounds.sqrt_upper();
    let delta_min = 2.0 * budget.theta.sin() / sqrt_upper;
    let delta_min_floor = budget.theta / (2.0 * sqrt_upper);
    let steps = budget.walk_steps.max(1);
    let per = |delta: f64| (bounds.max_step_time() / delta).ceil() as u64 + FINAL_ADJUST_CAP;
    Ok(BudgetReport {
        kappa: bounds.contraction_coefficient(),
        theta_eps: budget.theta,
        i_eps: budget.walk_steps,
        t_mix,
        delta_min,
        delta_min_floor,
        n_eps: steps.saturating_mul(per(delta_min)),
        n_eps_floor: steps.saturating_mul(per(delta_min_floor)),
        degenerate_curvature: budget.degenerate_curvature,
    })
}
