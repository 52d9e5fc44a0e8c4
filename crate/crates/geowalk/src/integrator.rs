//! Geodesic trajectory integrators.
//!
//! `approx_geodesic` chains chord steps to cover a total time `T`,
//! committing a step only when it fits in the remaining budget, then closes
//! the gap with a bisection over the chord angle until the last step lands
//! within bisection tolerance of the exact remaining time.
//! `exact_geodesic` wraps the closed-form sphere geodesic behind the same
//! result type so both can drive the walk interchangeably.

use crate::chord::{bisection_tolerance, chord_step};
use crate::error::{GeoError, Result};
use crate::geometry::AmbientVector;
use crate::manifolds::{ConvexBodyModel, CurvatureBounds, SphereModel, SurfacePoint, UnitTangent};

/// Iteration cap for the final chord-angle bisection; pathological
/// callbacks surface as `FinalAdjustFailed` instead of hanging.
pub const FINAL_ADJUST_CAP: u64 = 200;

/// Endpoint of an integrated trajectory plus its cost accounting.
#[derive(Debug, Clone)]
pub struct IntegratorResult {
    pub endpoint: SurfacePoint,
    /// Unit tangent at the endpoint. Diagnostic only: the walk resamples
    /// its direction at every step anyway.
    pub end_velocity: AmbientVector,
    /// Chord-oracle invocations, including discarded and bisection probes.
    pub star_calls: u64,
    /// Committed chord steps.
    pub steps: u64,
    /// Sum of committed step lengths; within tolerance of the requested
    /// time for the approximate integrator, exactly the requested time for
    /// the exact one.
    pub covered_time: f64,
}

/// Approximate the geodesic from `s` over time `total_time` by chaining
/// chord steps at angle `theta`.
///
/// Requires `0 < total_time <= pi / (2 sqrt(upper))`. The endpoint error
/// against the true geodesic is bounded by
/// `(1 + (pi/2) alpha + (pi/2)^2 beta) * theta / sqrt(upper)` with the
/// chord-oracle accuracy constants; in practice the final-step refinement
/// leaves an error quadratic in `theta`.
pub fn approx_geodesic(
    body: &ConvexBodyModel,
    s: &UnitTangent,
    total_time: f64,
    theta: f64,
) -> Result<IntegratorResult> {
    let bounds = body.bounds();
    let t_max = bounds.max_step_time();
    if !(total_time > 0.0 && total_time <= t_max * (1.0 + 1e-12)) {
        return Err(GeoError::Contract(format!(
            "integration time must lie in (0, {t_max:.6}], got {total_time}"
        )));
    }
    if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) {
        return Err(GeoError::Contract(format!(
            "chord angle must lie in (0, pi/2), got {theta}"
        )));
    }

    let tol = bisection_tolerance(bounds);
    let min_step = 2.0 * theta.sin() / bounds.sqrt_upper();
    let max_main_steps = (total_time / min_step).ceil() as u64 + 16;

    let mut state = s.clone();
    let mut covered = 0.0f64;
    let mut steps = 0u64;
    let mut star_calls = 0u64;

    // main loop: commit whole chords while they fit
    let overshoot = loop {
        let candidate = chord_step(body, &state, theta)?;
        star_calls += 1;
        if !candidate.within_accuracy_precondition {
            // the error analysis behind this integrator needs the oracle's
            // accuracy guarantee on every step
            return Err(GeoError::ThetaTooLarge {
                theta,
                step: candidate.delta_star,
            });
        }
        if covered + candidate.delta_star <= total_time {
            covered += candidate.delta_star;
            state = UnitTangent {
                at: candidate.x_star,
                dir: candidate.v_star,
            };
            steps += 1;
            if steps > max_main_steps {
                return Err(GeoError::Contract(format!(
                    "chord steps shorter than the curvature bounds allow ({steps} steps for time {total_time})"
                )));
            }
            if total_time - covered <= tol {
                break None; // landed on the budget exactly
            }
        } else {
            break Some(candidate);
        }
    };

    if let Some(first_over) = overshoot {
        let remaining = total_time - covered;
        // the remaining gap is positive and smaller than the overshooting
        // chord; bisect the angle until the step fills it to tolerance
        let window = theta / bounds.sqrt_upper();
        let mut lo = 0.0f64;
        let mut hi = theta;
        debug_assert!(first_over.delta_star > remaining);
        let mut best: Option<crate::chord::StarStep> = None;
        let mut iters = 0u64;
        while iters < FINAL_ADJUST_CAP {
            let mid = 0.5 * (lo + hi);
            if !(mid > lo && mid < hi) {
                break; // bracket exhausted at float resolution
            }
            iters += 1;
            let probe = chord_step(body, &state, mid)?;
            star_calls += 1;
            if probe.delta_star > remaining {
                hi = mid;
            } else {
                lo = mid;
                let better = best
                    .as_ref()
                    .is_none_or(|b| probe.delta_star > b.delta_star);
                if better {
                    best = Some(probe);
                }
                if remaining - best.as_ref().unwrap().delta_star <= tol {
                    break;
                }
            }
        }
        match best {
            Some(last) if remaining - last.delta_star <= window + tol => {
                covered += last.delta_star;
                state = UnitTangent {
                    at: last.x_star,
                    dir: last.v_star,
                };
                steps += 1;
            }
            _ => return Err(GeoError::FinalAdjustFailed(FINAL_ADJUST_CAP)),
        }
    }

    Ok(IntegratorResult {
        endpoint: state.at,
        end_velocity: state.dir,
        star_calls,
        steps,
        covered_time: covered,
    })
}

/// Exact great-circle integrator: zero oracle cost, perfect accuracy.
pub fn exact_geodesic(m: &SphereModel, s: &UnitTangent, total_time: f64) -> IntegratorResult {
    let out = m.geodesic(s, total_time);
    IntegratorResult {
        endpoint: out.at,
        end_velocity: out.dir,
        star_calls: 0,
        steps: 0,
        covered_time: total_time,
    }
}

/// A model bundled with its way of following geodesics, as used by the walk.
pub trait GeodesicIntegrator: Sync {
    /// Unit normal identifying the tangent plane at `x` (orientation is
    /// irrelevant for tangent sampling).
    fn surface_normal(&self, x: &SurfacePoint) -> Result<AmbientVector>;

    /// Curvature bounds when the model knows them; the walk enforces its
    /// step-time limit only if they are present.
    fn curvature_bounds(&self) -> Option<&CurvatureBounds>;

    /// Follow the (approximate) geodesic from `s` for time `t`.
    fn integrate(&self, s: &UnitTangent, t: f64) -> Result<IntegratorResult>;
}

/// Closed-form sphere integrator.
#[derive(Debug, Clone)]
pub struct ExactSphereIntegrator {
    model: SphereModel,
    bounds: CurvatureBounds,
}

impl ExactSphereIntegrator {
    pub fn new(model: SphereModel) -> Self {
        let bounds = model.bounds();
        Self { model, bounds }
    }

    pub fn model(&self) -> &SphereModel {
        &self.model
    }
}

impl GeodesicIntegrator for ExactSphereIntegrator {
    fn surface_normal(&self, x: &SurfacePoint) -> Result<AmbientVector> {
        Ok(self.model.outward_normal(x))
    }

    fn curvature_bounds(&self) -> Option<&CurvatureBounds> {
        Some(&self.bounds)
    }

    fn integrate(&self, s: &UnitTangent, t: f64) -> Result<IntegratorResult> {
        Ok(exact_geodesic(&self.model, s, t))
    }
}

/// Chord-oracle integrator over a convex-body boundary.
#[derive(Debug, Clone)]
pub struct ChordIntegrator {
    body: ConvexBodyModel,
    theta: f64,
}

impl ChordIntegrator {
    pub fn new(body: ConvexBodyModel, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) {
            return Err(GeoError::Contract(format!(
                "chord angle must lie in (0, pi/2), got {theta}"
            )));
        }
        Ok(Self { body, theta })
    }

    pub fn body(&self) -> &ConvexBodyModel {
        &self.body
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

impl GeodesicIntegrator for ChordIntegrator {
    fn surface_normal(&self, x: &SurfacePoint) -> Result<AmbientVector> {
        self.body.inward_normal(x)
    }

    fn curvature_bounds(&self) -> Option<&CurvatureBounds> {
        Some(self.body.bounds())
    }

    fn integrate(&self, s: &UnitTangent, t: f64) -> Result<IntegratorResult> {
        approx_geodesic(&self.body, s, t, self.theta)
    }
}
