//! Error types shared across the crate.

/// Errors raised by geometry, oracle, integrator and walk operations.
#[derive(Debug, thiserror::Error)]
pub enum GeoError {
    /// A documented precondition or invariant was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Antipodal (or otherwise non-unique) minimizing geodesic; parallel
    /// transport along it is not well defined.
    #[error("no unique minimizing geodesic between the given points")]
    NonUniqueGeodesic,

    /// The ray direction does not enter the interior of the body.
    #[error("ray exits the body immediately; direction does not point inward")]
    RayExitsImmediately,

    /// The bracketing point beyond the outer-radius bound was still inside
    /// the body, so the supplied lower curvature bound is wrong.
    #[error(
        "bracket point at {probe:.6e} along the ray is still inside the body; lower curvature bound is violated"
    )]
    CurvatureBoundViolated { probe: f64 },

    /// The chord angle is too large for the accuracy precondition
    /// `beta * sqrt(upper) * theta * step < 1`; reduce theta.
    #[error("chord angle {theta} too large for this body (step length {step:.6e})")]
    ThetaTooLarge { theta: f64, step: f64 },

    /// The chord lands nearly normal to the surface, so its tangent
    /// projection cannot be normalized meaningfully.
    #[error("degenerate landing: tangent projection of the chord has norm below {0:.1e}")]
    DegenerateLanding(f64),

    /// The final step-size bisection did not converge within the iteration cap.
    #[error("final step adjustment failed to converge within {0} bisection iterations")]
    FinalAdjustFailed(u64),

    /// A statistic was requested over too few samples.
    #[error("insufficient samples: need at least {need}, got {got}")]
    InsufficientSamples { need: usize, got: usize },
}

pub type Result<T, E = GeoError> = std::result::Result<T, E>;
