//! Ambient linear algebra and uniform sampling on tangent spheres.
//!
//! Everything is expressed in ambient coordinates in R^(d+1): the tangent
//! plane at a surface point is identified by its unit normal, and no
//! explicit tangent basis is ever constructed. Uniform tangent directions
//! come from an isotropic Gaussian draw projected onto the tangent plane
//! and normalized, which avoids both Gram-Schmidt cost and basis-choice
//! nondeterminism.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{GeoError, Result};

/// Ambient coordinates in R^(d+1).
pub type AmbientVector = DVector<f64>;

/// Reproducible random stream identified by `(seed, stream_id)`.
///
/// Backed by a counter-based generator (ChaCha): identical `(seed,
/// stream_id)` pairs replay the exact same draw sequence, and distinct
/// stream ids give statistically independent streams. Parallel chains each
/// own a stream keyed by their chain index, so output is reproducible
/// independent of scheduling.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// One standard normal draw.
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// `len` independent standard normal draws as an ambient vector.
    pub fn standard_normal_vector(&mut self, len: usize) -> AmbientVector {
        AmbientVector::from_fn(len, |_, _| self.standard_normal())
    }

    /// Uniform integer in `0..bound`.
    pub fn uniform_index(&mut self, bound: usize) -> usize {
        use rand::RngExt as _;
        self.rng.random_range(0..bound)
    }
}

/// Check that `v` is unit within `tol`, naming the offender on failure.
pub(crate) fn ensure_unit(v: &AmbientVector, tol: f64, what: &str) -> Result<()> {
    let err = (v.norm() - 1.0).abs();
    if err > tol {
        return Err(GeoError::Contract(format!(
            "{what} must be a unit vector within {tol:.1e} (norm error {err:.3e})"
        )));
    }
    Ok(())
}

/// Orthogonal projection of `w` onto the tangent plane with unit normal
/// `n`: returns `w - <w,n> n`.
pub fn project_to_tangent(w: &AmbientVector, n: &AmbientVector) -> Result<AmbientVector> {
    ensure_unit(n, 1e-12, "project_to_tangent normal")?;
    Ok(w - n * w.dot(n))
}

/// Threshold below which a projected Gaussian draw is rejected and redrawn.
const DEGENERATE_DRAW: f64 = 1e-8;

/// Uniform draw from the unit sphere of the tangent plane with unit normal `n`.
///
/// Isotropic Gaussian in the ambient space, projected onto the tangent
/// plane and normalized. Draws whose projection is shorter than 1e-8 are
/// redrawn, so the output is always exactly unit and exactly tangent.
pub fn sample_unit_tangent(rng: &mut RngStream, n: &AmbientVector) -> Result<AmbientVector> {
    ensure_unit(n, 1e-9, "sample_unit_tangent normal")?;
    loop {
        let g = rng.standard_normal_vector(n.len());
        let t = &g - n * g.dot(n);
        let len = t.norm();
        if len >= DEGENERATE_DRAW {
            return Ok(t / len);
        }
    }
}

/// Rotate the `span(a, b)` component of `w` by `angle`, fixing the
/// orthogonal complement. `a` and `b` must be orthonormal; positive angles
/// turn `a` toward `b`. Preserves the norm of `w`.
pub fn rotate_in_plane(
    w: &AmbientVector,
    a: &AmbientVector,
    b: &AmbientVector,
    angle: f64,
) -> Result<AmbientVector> {
    ensure_unit(a, 1e-10, "rotate_in_plane axis a")?;
    ensure_unit(b, 1e-10, "rotate_in_plane axis b")?;
    let ab = a.dot(b).abs();
    if ab > 1e-10 {
        return Err(GeoError::Contract(format!(
            "rotate_in_plane axes must be orthogonal within 1e-10 (|<a,b>| = {ab:.3e})"
        )));
    }
    let ca = w.dot(a);
    let cb = w.dot(b);
    let (s, c) = angle.sin_cos();
    Ok(w + a * (ca * c - cb * s - ca) + b * (ca * s + cb * c - cb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vec3(x: f64, y: f64, z: f64) -> AmbientVector {
        AmbientVector::from_vec(vec![x, y, z])
    }

    #[test]
    fn projection_matches_hand_evaluation() {
        let n = vec3(1.0, 0.0, 0.0);
        let full = project_to_tangent(&vec3(1.0, 0.0, 0.0), &n).unwrap();
        assert!(full.norm() < 1e-15, "projection along the normal is zero");

        let tangent = project_to_tangent(&vec3(0.0, 1.0, 0.0), &n).unwrap();
        assert_eq!(tangent, vec3(0.0, 1.0, 0.0));

        // w - <w,n> n evaluated by hand for w = (1,1,0)
        let mixed = project_to_tangent(&vec3(1.0, 1.0, 0.0), &n).unwrap();
        assert!((mixed - vec3(0.0, 1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn projection_rejects_non_unit_normal() {
        let err = project_to_tangent(&vec3(1.0, 0.0, 0.0), &vec3(2.0, 0.0, 0.0));
        assert!(matches!(err, Err(GeoError::Contract(_))));
    }

    #[test]
    fn projection_output_is_orthogonal_to_normal() {
        let mut rng = RngStream::new(7, 0);
        for _ in 0..100 {
            let n = {
                let g = rng.standard_normal_vector(5);
                let len = g.norm();
                g / len
            };
            let w = rng.standard_normal_vector(5) * 3.0;
            let p = project_to_tangent(&w, &n).unwrap();
            assert!(p.dot(&n).abs() < 1e-10);
        }
    }

    #[test]
    fn circle_tangent_sphere_is_two_points_with_equal_frequency() {
        // d = 1: the tangent "sphere" at n = (1,0) is {(0,1), (0,-1)}.
        let n = AmbientVector::from_vec(vec![1.0, 0.0]);
        let mut rng = RngStream::new(42, 0);
        let mut ups = 0usize;
        let draws = 10_000;
        for _ in 0..draws {
            let u = sample_unit_tangent(&mut rng, &n).unwrap();
            assert!((u.norm() - 1.0).abs() < 1e-10);
            assert!(u.dot(&n).abs() < 1e-10);
            assert!((u[1].abs() - 1.0).abs() < 1e-10);
            if u[1] > 0.0 {
                ups += 1;
            }
        }
        let freq = ups as f64 / draws as f64;
        assert!((freq - 0.5).abs() < 0.02, "up frequency {freq}");
    }

    #[test]
    fn tangent_circle_second_moment() {
        // d = 2 with n = e_z: tangent circle in the xy-plane, E[u_x^2] = 1/2.
        let n = vec3(0.0, 0.0, 1.0);
        let mut rng = RngStream::new(3, 0);
        let draws = 10_000;
        let mut sum = 0.0;
        for _ in 0..draws {
            let u = sample_unit_tangent(&mut rng, &n).unwrap();
            sum += u[0] * u[0];
        }
        let m = sum / draws as f64;
        assert!((m - 0.5).abs() < 0.02, "E[u_x^2] = {m}");
    }

    #[test]
    fn tangent_sample_moments_match_uniform_measure() {
        // d = 3 in ambient R^4: mean ~ 0, second moment ~ (I - n n^T)/3.
        let n = {
            let v = AmbientVector::from_vec(vec![0.5, -0.5, 0.5, 0.5]);
            let len = v.norm();
            v / len
        };
        let mut rng = RngStream::new(11, 4);
        let draws = 100_000;
        let dim = 4;
        let mut mean = AmbientVector::zeros(dim);
        let mut moment = nalgebra::DMatrix::<f64>::zeros(dim, dim);
        for _ in 0..draws {
            let u = sample_unit_tangent(&mut rng, &n).unwrap();
            mean += &u;
            moment += &u * u.transpose();
        }
        mean /= draws as f64;
        moment /= draws as f64;
        for i in 0..dim {
            assert!(mean[i].abs() < 0.01, "mean[{i}] = {}", mean[i]);
            for j in 0..dim {
                let target = (if i == j { 1.0 } else { 0.0 } - n[i] * n[j]) / 3.0;
                let dev = (moment[(i, j)] - target).abs();
                assert!(dev < 0.02, "moment[({i},{j})] off by {dev}");
            }
        }
    }

    #[test]
    fn identical_streams_reproduce_and_distinct_streams_differ() {
        let mut a = RngStream::new(123, 9);
        let mut b = RngStream::new(123, 9);
        let mut c = RngStream::new(123, 10);
        let va: Vec<f64> = (0..32).map(|_| a.standard_normal()).collect();
        let vb: Vec<f64> = (0..32).map(|_| b.standard_normal()).collect();
        let vc: Vec<f64> = (0..32).map(|_| c.standard_normal()).collect();
        assert_eq!(va, vb, "same (seed, stream) must be bit-identical");
        assert_ne!(va, vc, "distinct streams must differ");
    }

    #[test]
    fn quarter_rotation_sends_a_to_b() {
        let a = vec3(1.0, 0.0, 0.0);
        let b = vec3(0.0, 1.0, 0.0);
        let r = rotate_in_plane(&a, &a, &b, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((r - &b).norm() < 1e-15);
    }

    #[test]
    fn rotation_fixes_orthogonal_complement() {
        let a = vec3(1.0, 0.0, 0.0);
        let b = vec3(0.0, 1.0, 0.0);
        let w = vec3(0.0, 0.0, 2.5);
        let r = rotate_in_plane(&w, &a, &b, 1.234).unwrap();
        assert!((r - &w).norm() < 1e-14);
    }

    #[test]
    fn half_turn_negates_in_plane_component() {
        // w = a + c with c orthogonal to span(a, b): half turn gives -a + c.
        let a = vec3(1.0, 0.0, 0.0);
        let b = vec3(0.0, 1.0, 0.0);
        let w = vec3(1.0, 0.0, 1.0);
        let r = rotate_in_plane(&w, &a, &b, std::f64::consts::PI).unwrap();
        assert!((r - vec3(-1.0, 0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn rotation_rejects_non_orthonormal_axes() {
        let a = vec3(1.0, 0.0, 0.0);
        let skew = vec3(0.6, 0.8, 0.0);
        assert!(matches!(
            rotate_in_plane(&a, &a, &skew, 0.3),
            Err(GeoError::Contract(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn projection_is_idempotent(coords in proptest::collection::vec(-10.0f64..10.0, 3..6), seed in 0u64..1000) {
            let dim = coords.len();
            let w = AmbientVector::from_vec(coords);
            let mut rng = RngStream::new(seed, 0);
            let n = {
                let g = rng.standard_normal_vector(dim);
                let len = g.norm();
                prop_assume!(len > 1e-3);
                g / len
            };
            let once = project_to_tangent(&w, &n).unwrap();
            let twice = project_to_tangent(&once, &n).unwrap();
            prop_assert!((&twice - &once).norm() <= 1e-12 * (1.0 + once.norm()));
        }

        #[test]
        fn rotation_by_angle_then_back_is_identity(coords in proptest::collection::vec(-5.0f64..5.0, 4), angle in -6.0f64..6.0) {
            let w = AmbientVector::from_vec(coords);
            let a = AmbientVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
            let b = AmbientVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]);
            let there = rotate_in_plane(&w, &a, &b, angle).unwrap();
            prop_assert!((there.norm() - w.norm()).abs() <= 1e-10 * (1.0 + w.norm()));
            let back = rotate_in_plane(&there, &a, &b, -angle).unwrap();
            prop_assert!((&back - &w).norm() <= 1e-10 * (1.0 + w.norm()));
        }
    }
}
