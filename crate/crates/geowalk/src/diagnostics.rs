//! Empirical verification tooling: plug-in Wasserstein distance via exact
//! optimal assignment, uniformity moment statistics, contraction profiles
//! of coupled traces and an independent quadrature reference for the
//! one-step contraction on the 2-sphere.

use nalgebra::DMatrix;

use crate::error::{GeoError, Result};
use crate::manifolds::{SphereModel, SurfacePoint};
use crate::walk::ChainTrace;

/// Largest sample count the cubic-cost assignment accepts.
pub const MAX_ASSIGNMENT_SIZE: usize = 1024;

/// Distance ratios below this denominator threshold are reported as
/// coalesced.
pub const COALESCE_TOL: f64 = 1e-12;

/// Minimum-cost perfect matching on a square cost matrix by shortest
/// augmenting paths with dual potentials, O(n^3). `cost` is row-major.
fn min_cost_assignment(n: usize, cost: &[f64]) -> f64 {
    debug_assert_eq!(cost.len(), n * n);
    const UNMATCHED: usize = usize::MAX;
    // column 0 is a virtual start; real columns are 1..=n
    let mut potential_row = vec![0.0f64; n];
    let mut potential_col = vec![0.0f64; n + 1];
    let mut matched_row = vec![UNMATCHED; n + 1];
    for row in 0..n {
        matched_row[0] = row;
        let mut j0 = 0usize;
        let mut min_slack = vec![f64::INFINITY; n + 1];
        let mut slack_from = vec![0usize; n + 1];
        let mut visited = vec![false; n + 1];
        loop {
            visited[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if visited[j] {
                    continue;
                }
                let reduced = cost[i0 * n + (j - 1)] - potential_row[i0] - potential_col[j];
                if reduced < min_slack[j] {
                    min_slack[j] = reduced;
                    slack_from[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if visited[j] {
                    potential_row[matched_row[j]] += delta;
                    potential_col[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == UNMATCHED {
                break;
            }
        }
        // augment along the alternating path back to the virtual column
        while j0 != 0 {
            let j1 = slack_from[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
        }
    }
    (1..=n).map(|j| cost[matched_row[j] * n + (j - 1)]).sum()
}

/// Empirical 1-Wasserstein distance between two equally sized sample sets:
/// the minimum-cost perfect matching under `metric`, divided by the count.
///
/// Exact assignment keeps the estimator free of a regularization knob;
/// the cubic cost caps the sample count at 1024.
pub fn wasserstein1<F>(a: &[SurfacePoint], b: &[SurfacePoint], metric: F) -> Result<f64>
where
    F: Fn(&SurfacePoint, &SurfacePoint) -> f64,
{
    if a.len() != b.len() {
        return Err(GeoError::Contract(format!(
            "sample counts must match, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n == 0 {
        return Err(GeoError::Contract("empty sample sets".into()));
    }
    if n > MAX_ASSIGNMENT_SIZE {
        return Err(GeoError::Contract(format!(
            "at most {MAX_ASSIGNMENT_SIZE} samples supported, got {n}"
        )));
    }
    let mut cost = vec![0.0f64; n * n];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            cost[i * n + j] = metric(x, y);
        }
    }
    Ok(min_cost_assignment(n, &cost) / n as f64)
}

/// First- and second-moment summary of a sample set against the uniform
/// sphere law.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct UniformityReport {
    /// Norm of the sample mean vector (zero in law).
    pub mean_norm: f64,
    /// Largest entrywise deviation of the empirical second-moment matrix
    /// from `r^2 I / (d+1)`.
    pub second_moment_max_dev: f64,
    pub n: usize,
}

/// Moment statistics of sphere samples. Requires at least 100 points so the
/// thresholds used downstream are meaningful.
pub fn uniformity_stats(samples: &[SurfacePoint], m: &SphereModel) -> Result<UniformityReport> {
    if samples.len() < 100 {
        return Err(GeoError::InsufficientSamples {
            need: 100,
            got: samples.len(),
        });
    }
    let dim = m.ambient_dim();
    let n = samples.len() as f64;
    let mut mean = crate::geometry::AmbientVector::zeros(dim);
    let mut moment = DMatrix::<f64>::zeros(dim, dim);
    for p in samples {
        mean += p.coords();
        moment += p.coords() * p.coords().transpose();
    }
    mean /= n;
    moment /= n;
    let target = m.radius() * m.radius() / dim as f64;
    let mut max_dev = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let t = if i == j { target } else { 0.0 };
            max_dev = max_dev.max((moment[(i, j)] - t).abs());
        }
    }
    Ok(UniformityReport {
        mean_norm: mean.norm(),
        second_moment_max_dev: max_dev,
        n: samples.len(),
    })
}

/// Per-step distance ratios of a coupled pair of traces.
#[derive(Debug, Clone)]
pub struct ContractionProfile {
    /// `dist(X_{i+1}, Y_{i+1}) / dist(X_i, Y_i)`; reported as 1 where the
    /// chains have coalesced.
    pub ratios: Vec<f64>,
    /// Marks steps whose starting distance was below the coalescence
    /// threshold.
    pub coalesced: Vec<bool>,
}

/// Measure per-step contraction of two coupled traces on a sphere.
pub fn contraction_profile(
    a: &ChainTrace,
    b: &ChainTrace,
    m: &SphereModel,
) -> Result<ContractionProfile> {
    if a.len() != b.len() {
        return Err(GeoError::Contract(format!(
            "coupled traces must have equal length, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let steps = a.len().saturating_sub(1);
    let mut ratios = Vec::with_capacity(steps);
    let mut coalesced = Vec::with_capacity(steps);
    for i in 0..steps {
        let before = m.distance(&a.points[i], &b.points[i]);
        let after = m.distance(&a.points[i + 1], &b.points[i + 1]);
        if before < COALESCE_TOL {
            ratios.push(1.0);
            coalesced.push(true);
        } else {
            ratios.push(after / before);
            coalesced.push(false);
        }
    }
    Ok(ContractionProfile { ratios, coalesced })
}

/// One-step coupled distance ratio on the unit 2-sphere for a direction at
/// angle `psi` to the connecting geodesic.
///
/// With the pair at distance `d0` and both chains moving for time `t` along
/// parallel-transported directions, the endpoints' inner product is
/// `cos^2 t cos d0 + sin^2 t (cos^2 psi cos d0 + sin^2 psi)`,
/// by expanding both great circles in a common frame. `psi = 0` slides both
/// chains along the shared great circle (ratio 1); `psi = pi/2` gives the
/// orthogonal closed form `arccos(sin^2 t + cos^2 t cos d0) / d0`.
pub fn one_step_ratio_at_angle(d0: f64, t: f64, psi: f64) -> f64 {
    assert!(
        d0 > 0.0 && d0 < std::f64::consts::PI,
        "pair distance must lie in (0, pi)"
    );
    let (sd, cd) = (t.sin(), t.cos());
    let (sp, cp) = (psi.sin(), psi.cos());
    let inner = cd * cd * d0.cos() + sd * sd * (cp * cp * d0.cos() + sp * sp);
    inner.clamp(-1.0, 1.0).acos() / d0
}

/// Number of quadrature intervals for the contraction reference.
const QUADRATURE_INTERVALS: usize = 10_000;

/// Expected one-step coupled distance ratio on the unit 2-sphere over a
/// uniform random tangent direction, by composite Simpson quadrature over
/// the direction angle. Independent of the walk implementation; serves as
/// the oracle for measured contraction.
pub fn one_step_sphere_contraction_reference(d0: f64, t: f64) -> f64 {
    assert!(
        d0 > 0.0 && d0 < std::f64::consts::PI,
        "pair distance must lie in (0, pi)"
    );
    assert!(
        t > 0.0 && t <= std::f64::consts::FRAC_PI_2,
        "step time must lie in (0, pi/2]"
    );
    // on S^2 the direction angle is uniform on [0, pi)
    let n = QUADRATURE_INTERVALS;
    let h = std::f64::consts::PI / n as f64;
    let mut sum =
        one_step_ratio_at_angle(d0, t, 0.0) + one_step_ratio_at_angle(d0, t, std::f64::consts::PI);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * one_step_ratio_at_angle(d0, t, k as f64 * h);
    }
    sum * h / 3.0 / std::f64::consts::PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AmbientVector, RngStream};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn vec3(x: f64, y: f64, z: f64) -> AmbientVector {
        AmbientVector::from_vec(vec![x, y, z])
    }

    fn geodesic_metric(m: SphereModel) -> impl Fn(&SurfacePoint, &SurfacePoint) -> f64 {
        move |a, b| m.distance(a, b)
    }

    /// Exact minimum over all n! matchings; only viable for tiny n.
    fn brute_force_wasserstein(
        a: &[SurfacePoint],
        b: &[SurfacePoint],
        metric: &dyn Fn(&SurfacePoint, &SurfacePoint) -> f64,
    ) -> f64 {
        fn permutations(k: usize) -> Vec<Vec<usize>> {
            if k == 1 {
                return vec![vec![0]];
            }
            let mut out = Vec::new();
            for p in permutations(k - 1) {
                for slot in 0..k {
                    let mut q: Vec<usize> = p.iter().map(|&v| v + usize::from(v >= slot)).collect();
                    q.insert(0, slot);
                    out.push(q);
                }
            }
            out
        }
        let n = a.len();
        permutations(n)
            .into_iter()
            .map(|perm| {
                perm.iter()
                    .enumerate()
                    .map(|(i, &j)| metric(&a[i], &b[j]))
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
            / n as f64
    }

    fn random_sphere_set(m: &SphereModel, n: usize, rng: &mut RngStream) -> Vec<SurfacePoint> {
        (0..n).map(|_| m.sample_uniform(rng)).collect()
    }

    #[test]
    fn identical_sets_have_zero_distance() {
        let m = SphereModel::unit(2);
        let mut rng = RngStream::new(1, 0);
        let a = random_sphere_set(&m, 16, &mut rng);
        let d = wasserstein1(&a, &a, geodesic_metric(m)).unwrap();
        assert!(d.abs() < 1e-12, "distance to itself was {d}");
    }

    #[test]
    fn singletons_reduce_to_the_metric() {
        let m = SphereModel::unit(2);
        let a = vec![m.point(vec3(1.0, 0.0, 0.0)).unwrap()];
        let b = vec![m.point(vec3(0.0, 1.0, 0.0)).unwrap()];
        let d = wasserstein1(&a, &b, geodesic_metric(m)).unwrap();
        assert!((d - FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn assignment_matches_factorial_brute_force() {
        let m = SphereModel::unit(2);
        let metric = geodesic_metric(m);
        let mut rng = RngStream::new(5, 0);
        for n in 2..=6 {
            for _ in 0..8 {
                let a = random_sphere_set(&m, n, &mut rng);
                let b = random_sphere_set(&m, n, &mut rng);
                let fast = wasserstein1(&a, &b, &metric).unwrap();
                let slow = brute_force_wasserstein(&a, &b, &metric);
                assert!(
                    (fast - slow).abs() < 1e-12,
                    "n = {n}: assignment {fast} vs brute force {slow}"
                );
            }
        }
    }

    #[test]
    fn triangle_inequality_on_random_triples() {
        let m = SphereModel::unit(2);
        let metric = geodesic_metric(m);
        let mut rng = RngStream::new(6, 0);
        for _ in 0..8 {
            let a = random_sphere_set(&m, 32, &mut rng);
            let b = random_sphere_set(&m, 32, &mut rng);
            let c = random_sphere_set(&m, 32, &mut rng);
            let ab = wasserstein1(&a, &b, &metric).unwrap();
            let bc = wasserstein1(&b, &c, &metric).unwrap();
            let ac = wasserstein1(&a, &c, &metric).unwrap();
            assert!(
                ac <= ab + bc + 1e-9,
                "triangle violated: {ac} > {ab} + {bc}"
            );
            let ba = wasserstein1(&b, &a, &metric).unwrap();
            assert!((ab - ba).abs() < 1e-12);
        }
    }

    #[test]
    fn mismatched_counts_are_rejected() {
        let m = SphereModel::unit(2);
        let mut rng = RngStream::new(2, 0);
        let a = random_sphere_set(&m, 4, &mut rng);
        let b = random_sphere_set(&m, 5, &mut rng);
        assert!(matches!(
            wasserstein1(&a, &b, geodesic_metric(m)),
            Err(GeoError::Contract(_))
        ));
    }

    #[test]
    fn uniform_sampler_passes_the_moment_thresholds() {
        let m = SphereModel::unit(2);
        let mut rng = RngStream::new(12, 0);
        let samples = random_sphere_set(&m, 10_000, &mut rng);
        let report = uniformity_stats(&samples, &m).unwrap();
        assert!(report.mean_norm <= 0.03, "mean norm {}", report.mean_norm);
        assert!(
            report.second_moment_max_dev <= 0.03,
            "moment deviation {}",
            report.second_moment_max_dev
        );
    }

    #[test]
    fn degenerate_sample_sets() {
        let m = SphereModel::unit(2);
        let p = m.point(vec3(0.0, 0.0, 1.0)).unwrap();
        let all_same = vec![p.clone(); 200];
        let report = uniformity_stats(&all_same, &m).unwrap();
        assert!(
            (report.mean_norm - 1.0).abs() < 1e-12,
            "point mass mean is the radius"
        );

        let q = m.point(vec3(0.0, 0.0, -1.0)).unwrap();
        let mut pair = Vec::new();
        for _ in 0..100 {
            pair.push(p.clone());
            pair.push(q.clone());
        }
        let report = uniformity_stats(&pair, &m).unwrap();
        assert!(report.mean_norm < 1e-12, "symmetric pair has zero mean");

        assert!(matches!(
            uniformity_stats(&all_same[..50], &m),
            Err(GeoError::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn identical_traces_report_coalesced_unit_ratios() {
        let m = SphereModel::unit(2);
        let x = m.point(vec3(1.0, 0.0, 0.0)).unwrap();
        let mut rng = RngStream::new(3, 0);
        let (a, b) = crate::walk::run_coupled(&m, &x, &x, 1.0, 20, &mut rng).unwrap();
        let profile = contraction_profile(&a, &b, &m).unwrap();
        assert!(profile.ratios.iter().all(|&r| r == 1.0));
        assert!(profile.coalesced.iter().all(|&c| c));
    }

    #[test]
    fn quadrature_integrand_endpoints_match_closed_forms() {
        let (d0, t) = (0.5, 1.0);
        // direction along the connecting geodesic preserves distance
        assert!((one_step_ratio_at_angle(d0, t, 0.0) - 1.0).abs() < 1e-12);
        // orthogonal direction reproduces the closed form
        let expected = (t.sin().powi(2) + t.cos().powi(2) * d0.cos()).acos() / d0;
        assert!((one_step_ratio_at_angle(d0, t, FRAC_PI_2) - expected).abs() < 1e-12);
    }

    #[test]
    fn vanishing_step_time_means_no_contraction() {
        let r = one_step_sphere_contraction_reference(0.5, 1e-9);
        assert!((r - 1.0).abs() < 1e-9, "reference at t -> 0 was {r}");
    }

    #[test]
    fn quadrature_agrees_with_a_dense_midpoint_rule() {
        // cross-check the Simpson rule against an independent discretization
        let (d0, t) = (0.5, 1.0);
        let simpson = one_step_sphere_contraction_reference(d0, t);
        let n = 200_000;
        let h = PI / n as f64;
        let midpoint: f64 = (0..n)
            .map(|k| one_step_ratio_at_angle(d0, t, (k as f64 + 0.5) * h))
            .sum::<f64>()
            * h
            / PI;
        assert!(
            (simpson - midpoint).abs() < 1e-9,
            "simpson {simpson} vs midpoint {midpoint}"
        );
    }

    #[test]
    fn empirical_mean_contraction_matches_the_reference() {
        let m = SphereModel::unit(2);
        let d0 = 0.5f64;
        let t = 1.0;
        let x = m.point(vec3(1.0, 0.0, 0.0)).unwrap();
        let y = m.point(vec3(d0.cos(), d0.sin(), 0.0)).unwrap();
        let mut rng = RngStream::new(40, 0);
        let trials = 10_000;
        let mut sum = 0.0;
        for _ in 0..trials {
            let n = m.outward_normal(&x);
            let u = crate::geometry::sample_unit_tangent(&mut rng, &n).unwrap();
            let step = crate::walk::coupled_step(&m, &x, &y, &u, t).unwrap();
            let ratio = m.distance(&step.next_x, &step.next_y) / d0;
            assert!(ratio <= 1.0 + 1e-9, "expansion observed: {ratio}");
            sum += ratio;
        }
        let mean = sum / trials as f64;
        let reference = one_step_sphere_contraction_reference(d0, t);
        assert!(
            (mean - reference).abs() < 0.01,
            "mean {mean} vs reference {reference}"
        );
    }
}
