//! One chord step across a convex body.
//!
//! Fires chords at several angles from a point on an ellipsoid, showing the
//! step-length sandwich `2 sin(theta)/sqrt(upper) <= delta <= 2 sin(theta)/sqrt(lower)`
//! and the membership-call count, which is independent of dimension.
//!
//! ```text
//! cargo run -p geowalk --example chord_oracle
//! ```

use geowalk::{
    AmbientVector, RngStream, UnitTangent, chord_step, ellipsoid_model, ellipsoid_surface_point,
    sample_unit_tangent,
};

fn main() {
    let axes = [1.0, 1.0, 2.0];
    let body = ellipsoid_model(&axes).expect("valid axes");
    let bounds = *body.bounds();
    println!(
        "ellipsoid {:?}: sqrt curvature in [{}, {}]",
        axes,
        bounds.sqrt_lower(),
        bounds.sqrt_upper()
    );

    let mut rng = RngStream::new(7, 0);
    let start = ellipsoid_surface_point(&axes, &AmbientVector::from_vec(vec![0.4, -0.7, 1.0]))
        .expect("on surface");
    let normal = body.inward_normal(&start).expect("normal");
    let dir = sample_unit_tangent(&mut rng, &normal).expect("tangent");

    println!("\n  theta     delta      sandwich (lo, hi)        calls  guarantee");
    for theta in [0.01f64, 0.05, 0.1, 0.2, 0.3] {
        let s = UnitTangent {
            at: start.clone(),
            dir: dir.clone(),
        };
        let step = chord_step(&body, &s, theta).expect("chord step");
        let lo = 2.0 * theta.sin() / bounds.sqrt_upper();
        let hi = 2.0 * theta.sin() / bounds.sqrt_lower();
        println!(
            "  {theta:<8} {:<10.6} ({lo:.6}, {hi:.6})   {:>5}  {}",
            step.delta_star,
            step.oracle_calls,
            if step.within_accuracy_precondition {
                "covered"
            } else {
                "outside"
            }
        );
        assert!(lo <= step.delta_star && step.delta_star <= hi + 1e-9);
    }
    println!("\nevery chord lands inside the sandwich; the accuracy guarantee");
    println!("covers a step when beta * sqrt(upper) * theta * delta < 1");
}
