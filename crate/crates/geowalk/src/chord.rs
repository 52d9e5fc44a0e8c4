//! One-chord stepping oracle for convex-body boundaries.
//!
//! A step leaves the boundary along a straight line tilted by an angle
//! `theta` from the tangent plane toward the interior, finds the exit point
//! of that chord by bisection over the membership callback, and projects
//! the line direction onto the tangent plane at the landing point. The
//! chord length is sandwiched by the tangent-chord relation,
//! `2 sin(theta) / sqrt(upper) <= step <= 2 sin(theta) / sqrt(lower)`.

use crate::error::{GeoError, Result};
use crate::geometry::{AmbientVector, ensure_unit, project_to_tangent};
use crate::manifolds::{ConvexBodyModel, CurvatureBounds, SurfacePoint, UnitTangent};

/// Output of a single chord step.
#[derive(Debug, Clone)]
pub struct StarStep {
    /// Landing point on the boundary (inside endpoint of the final bracket,
    /// so membership always holds at it).
    pub x_star: SurfacePoint,
    /// Unit tangent direction at the landing point: the normalized tangent
    /// projection of the chord direction.
    pub v_star: AmbientVector,
    /// Euclidean chord length.
    pub delta_star: f64,
    /// Membership-callback invocations used for this step.
    pub oracle_calls: u64,
    /// Whether `beta * sqrt(upper) * theta * delta_star < 1` held, i.e. the
    /// step is covered by the oracle's position/velocity error guarantee.
    /// The chord geometry itself is exact either way; integrators that rely
    /// on the guarantee reject steps with this flag unset.
    pub within_accuracy_precondition: bool,
}

/// Result of a ray/boundary intersection.
#[derive(Debug, Clone)]
pub struct RayHit {
    pub point: SurfacePoint,
    pub length: f64,
    pub membership_calls: u64,
}

/// Longest possible chord, `2 / sqrt(lower)`: the diameter of the
/// circumscribed tangent sphere.
pub fn max_chord(bounds: &CurvatureBounds) -> f64 {
    2.0 / bounds.sqrt_lower()
}

/// Bisection tolerance on chord lengths, relative to the largest chord.
/// Roughly 34 membership calls per intersection, independent of dimension,
/// and far below every accuracy budget the oracle feeds into.
pub fn bisection_tolerance(bounds: &CurvatureBounds) -> f64 {
    1e-10 * max_chord(bounds)
}

/// Accuracy constants `(alpha, beta)` of the chord oracle:
/// `alpha = 2 pi upper/lower` bounds the position error per unit
/// `theta * step`, and `beta = 5 sqrt(upper/lower)` bounds the velocity
/// error per unit `sqrt(upper) * theta * step`.
pub fn accuracy_constants(bounds: &CurvatureBounds) -> (f64, f64) {
    let ratio = bounds.upper() / bounds.lower();
    (2.0 * std::f64::consts::PI * ratio, 5.0 * ratio.sqrt())
}

/// Upper bound on membership calls per chord step:
/// entry probe + outer probe + bisection iterations.
pub fn max_membership_calls(bounds: &CurvatureBounds) -> u64 {
    2 + (max_chord(bounds) / bisection_tolerance(bounds))
        .log2()
        .ceil() as u64
}

/// Exit point of the ray `origin + t * direction`, `t > 0`, from the body.
///
/// `origin` must be on the boundary and `direction` must point strictly
/// into the interior. Bisection brackets between an entry probe just inside
/// and a point 1% beyond the longest possible chord; the exit is reported
/// at the inside endpoint of the final bracket.
pub fn intersect_ray(
    body: &ConvexBodyModel,
    origin: &SurfacePoint,
    direction: &AmbientVector,
) -> Result<RayHit> {
    ensure_unit(direction, 1e-9, "ray direction")?;
    let bounds = body.bounds();
    let longest = max_chord(bounds);
    let tol = bisection_tolerance(bounds);
    let mut calls = 0u64;

    let entry = 1e-8 * longest;
    calls += 1;
    if !body.contains(&(origin.coords() + direction * entry)) {
        return Err(GeoError::RayExitsImmediately);
    }

    let mut t_hi = longest * 1.01;
    calls += 1;
    if body.contains(&(origin.coords() + direction * t_hi)) {
        return Err(GeoError::CurvatureBoundViolated { probe: t_hi });
    }

    let mut t_lo = entry;
    while t_hi - t_lo > tol {
        let mid = 0.5 * (t_lo + t_hi);
        calls += 1;
        if body.contains(&(origin.coords() + direction * mid)) {
            t_lo = mid;
        } else {
            t_hi = mid;
        }
    }

    Ok(RayHit {
        point: SurfacePoint::new_unchecked(origin.coords() + direction * t_lo),
        length: t_lo,
        membership_calls: calls,
    })
}

/// One chord step from phase-space state `s` at tilt angle `theta`.
///
/// The chord direction is `cos(theta) v + sin(theta) n` with `n` the inward
/// normal, so its tangent projection at the start is parallel to `v`. After
/// landing, the direction is projected onto the new tangent plane and
/// normalized. The accuracy precondition
/// `beta * sqrt(upper) * theta * step < 1` is checked after the step and
/// reported in the result.
pub fn chord_step(body: &ConvexBodyModel, s: &UnitTangent, theta: f64) -> Result<StarStep> {
    if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) {
        return Err(GeoError::Contract(format!(
            "chord angle must lie in (0, pi/2), got {theta}"
        )));
    }
    let n = body.inward_normal(&s.at)?;
    // guard against tangent drift from earlier landings
    let v = project_to_tangent(&s.dir, &n)?;
    let v_len = v.norm();
    if v_len < 1e-8 {
        return Err(GeoError::Contract(
            "state direction is nearly normal to the surface".into(),
        ));
    }
    let v = v / v_len;
    let (sin, cos) = theta.sin_cos();
    let line = v * cos + &n * sin;

    let hit = intersect_ray(body, &s.at, &line)?;

    let n_land = body.inward_normal(&hit.point)?;
    let tangential = project_to_tangent(&line, &n_land)?;
    let t_len = tangential.norm();
    if t_len < 1e-8 {
        return Err(GeoError::DegenerateLanding(1e-8));
    }
    let v_star = tangential / t_len;

    let (_, beta) = accuracy_constants(body.bounds());
    let margin = beta * body.bounds().sqrt_upper() * theta * hit.length;

    Ok(StarStep {
        x_star: hit.point,
        v_star,
        delta_star: hit.length,
        oracle_calls: hit.membership_calls,
        within_accuracy_precondition: margin < 1.0,
    })
}
