//! Chord-chain geodesic integration and its convergence in the chord angle.
//!
//! Integrates a quarter great circle on the unit sphere (run as a convex
//! body, so only membership and normal callbacks are used) and compares
//! against the closed form. The endpoint error falls roughly quadratically
//! in theta, well under the linear accuracy budget.
//!
//! ```text
//! cargo run -p geowalk --example approx_geodesic
//! ```

use std::f64::consts::FRAC_PI_2;

use geowalk::{
    AmbientVector, SphereModel, SurfacePoint, UnitTangent, accuracy_constants, approx_geodesic,
    ellipsoid_model,
};

fn main() {
    let body = ellipsoid_model(&[1.0, 1.0, 1.0]).expect("unit ball");
    let sphere = SphereModel::unit(2);
    let start = UnitTangent {
        at: SurfacePoint::new_unchecked(AmbientVector::from_vec(vec![1.0, 0.0, 0.0])),
        dir: AmbientVector::from_vec(vec![0.0, 1.0, 0.0]),
    };
    let total_time = FRAC_PI_2;
    let exact = sphere.geodesic(&start, total_time);
    let (alpha, beta) = accuracy_constants(body.bounds());
    let budget_const = 1.0 + FRAC_PI_2 * alpha + FRAC_PI_2 * FRAC_PI_2 * beta;

    println!("quarter circle on S^2 via chord chains (T = pi/2)");
    println!("accuracy budget: {budget_const:.1} * theta\n");
    println!("  theta    steps  star calls  endpoint error  budget");
    for theta in [0.2f64, 0.1, 0.05, 0.025, 0.0125] {
        let out = approx_geodesic(&body, &start, total_time, theta).expect("integration");
        let err = sphere.distance(&out.endpoint, &exact.at);
        println!(
            "  {theta:<7}  {:>4}  {:>9}   {err:<14.3e}  {:.3e}",
            out.steps,
            out.star_calls,
            budget_const * theta
        );
    }
    println!("\nhalving theta quarters the measured error: the final-step");
    println!("bisection removes the time-accounting term, leaving only the");
    println!("per-chord position error");
}
