//! Mixing and oracle-cost budgets as a function of the curvature ratio.
//!
//! For each ratio upper/lower the table shows the per-step contraction
//! coefficient, the mixing bound at the maximal step time, the chord angle
//! delivering a 0.1-accurate sample, the chain length and both oracle-call
//! counts: with the geometric minimum chord `2 sin(theta)/sqrt(upper)` and
//! with the cruder floor `theta/(2 sqrt(upper))`.
//!
//! ```text
//! cargo run -p geowalk --example budgets
//! ```

use geowalk::{CurvatureBounds, budget_report};

fn main() {
    let eps = 0.1;
    println!("budgets at eps = {eps} (step time fixed to the curvature maximum)\n");
    println!("  ratio    kappa     t_mix  theta(eps)   I(eps)  N(eps)      N(eps) floor");
    for ratio in [1.5f64, 2.0, 4.0, 9.0, 16.0] {
        let bounds = CurvatureBounds::new(1.0, ratio).unwrap();
        let report = budget_report(&bounds, bounds.max_step_time(), eps).unwrap();
        println!(
            "  {ratio:<7}  {:<8.4}  {:>5}  {:<10.3e}  {:>5}  {:<10}  {}",
            report.kappa,
            report.t_mix,
            report.theta_eps,
            report.i_eps,
            report.n_eps,
            report.n_eps_floor
        );
    }

    let sphere = CurvatureBounds::new(1.0, 1.0).unwrap();
    let degenerate = budget_report(&sphere, sphere.max_step_time(), eps).unwrap();
    println!(
        "\nequal bounds (ratio 1) degenerate: contraction factor 0, flagged = {}, chain length {}",
        degenerate.degenerate_curvature, degenerate.i_eps
    );
}
