//! Uniform sampling on positively curved surfaces by the geodesic walk.
//!
//! The walk repeatedly picks a uniform random tangent direction and follows
//! the geodesic for a fixed time; its stationary distribution is the
//! uniform measure on the surface. Spheres get closed-form geodesics,
//! distances and parallel transport. Convex-body boundaries, given only a
//! membership callback and a normal callback, get an approximate integrator
//! built from straight chords fired at a small angle into the body, with
//! the accuracy/cost trade controlled by that angle.
//!
//! The crate also ships the tooling to check such a sampler end to end:
//! coupled chains whose contraction rate certifies mixing, an exact
//! empirical Wasserstein distance, moment tests against the uniform law,
//! and budget formulas that map curvature bounds and a target accuracy to
//! chain lengths and oracle-call counts.
//!
//! See the `examples/` directory for one runnable program per capability,
//! and the `geowalk` binary for the config-driven experiment runner.

pub mod chord;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod integrator;
pub mod manifolds;
pub mod walk;

pub use chord::{StarStep, accuracy_constants, bisection_tolerance, chord_step, intersect_ray};
pub use diagnostics::{
    ContractionProfile, UniformityReport, contraction_profile, one_step_ratio_at_angle,
    one_step_sphere_contraction_reference, uniformity_stats, wasserstein1,
};
pub use error::{GeoError, Result};
pub use geometry::{
    AmbientVector, RngStream, project_to_tangent, rotate_in_plane, sample_unit_tangent,
};
pub use integrator::{
    ChordIntegrator, ExactSphereIntegrator, GeodesicIntegrator, IntegratorResult, approx_geodesic,
    exact_geodesic,
};
pub use manifolds::{
    ConvexBodyModel, CurvatureBounds, SphereModel, SurfacePoint, UnitTangent, ellipsoid_model,
    ellipsoid_surface_point,
};
pub use walk::{
    AccuracyBudget, BudgetReport, ChainTrace, CoupledStep, WalkConfig, WalkStep, accuracy_budget,
    budget_report, coupled_step, mixing_time_bound, oracle_call_budget, run_chains, run_coupled,
    run_walk, walk_step,
};
