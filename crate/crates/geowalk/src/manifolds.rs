//! Manifold models: an exact sphere and callback-defined convex-body
//! boundaries.
//!
//! The sphere carries closed-form geodesics, distances and parallel
//! transport, and serves as the exactly-solvable reference. Convex bodies
//! are described by a membership callback and an inward-normal callback
//! plus caller-supplied curvature bounds; the ellipsoid constructor is the
//! provided instance. Models expose only what they can compute exactly, so
//! bodies without closed-form geodesics remain first-class citizens of the
//! walk.

use std::fmt;
use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::geometry::{AmbientVector, RngStream, ensure_unit, rotate_in_plane};

/// A point constrained to lie on the model surface, stored in ambient
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePoint(AmbientVector);

impl SurfacePoint {
    /// Wrap raw coordinates without checking the surface constraint.
    /// Use the model constructors (`SphereModel::point`,
    /// `ConvexBodyModel::surface_point`) when validation is wanted.
    pub fn new_unchecked(coords: AmbientVector) -> Self {
        Self(coords)
    }

    pub fn coords(&self) -> &AmbientVector {
        &self.0
    }

    pub fn into_coords(self) -> AmbientVector {
        self.0
    }
}

/// A surface point together with a unit direction in its tangent plane:
/// one element of the walk's phase space.
#[derive(Debug, Clone)]
pub struct UnitTangent {
    pub at: SurfacePoint,
    pub dir: AmbientVector,
}

/// Two-sided sectional-curvature bounds in units of 1/length².
///
/// For convex bodies these double as radius-of-curvature bounds: the body
/// rolls freely inside a ball of radius `1/sqrt(lower)` and contains a
/// rolling ball of radius `1/sqrt(upper)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CurvatureBounds {
    lower: f64,
    upper: f64,
}

impl CurvatureBounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower > 0.0 && lower <= upper && upper.is_finite()) {
            return Err(GeoError::Contract(format!(
                "curvature bounds must satisfy 0 < lower <= upper < inf, got ({lower}, {upper})"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn sqrt_lower(&self) -> f64 {
        self.lower.sqrt()
    }

    pub fn sqrt_upper(&self) -> f64 {
        self.upper.sqrt()
    }

    /// Longest admissible geodesic step time, `pi / (2 sqrt(upper))`.
    pub fn max_step_time(&self) -> f64 {
        std::f64::consts::FRAC_PI_2 / self.sqrt_upper()
    }

    /// Diameter bound `pi / sqrt(lower)`.
    pub fn diameter_bound(&self) -> f64 {
        std::f64::consts::PI / self.sqrt_lower()
    }

    /// Per-step contraction factor `cos(sqrt(lower) * max_step_time())`.
    pub fn contraction_cosine(&self) -> f64 {
        (std::f64::consts::FRAC_PI_2 * (self.lower / self.upper).sqrt()).cos()
    }

    /// Contraction coefficient `1 - contraction_cosine()`.
    pub fn contraction_coefficient(&self) -> f64 {
        1.0 - self.contraction_cosine()
    }

    /// True when the bounds coincide to working precision, i.e. the
    /// contraction cosine is zero up to floating-point noise. Budget
    /// formulas degenerate in this regime and flag it instead of guessing.
    pub fn is_degenerate(&self) -> bool {
        self.contraction_cosine() <= 1e-15
    }
}

/// The sphere S^d of a given radius embedded in R^(d+1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereModel {
    radius: f64,
    dim: usize,
}

impl SphereModel {
    pub fn new(radius: f64, dim: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeoError::Contract(format!(
                "sphere radius must be positive and finite, got {radius}"
            )));
        }
        if dim < 1 {
            return Err(GeoError::Contract(
                "sphere surface dimension must be at least 1".into(),
            ));
        }
        Ok(Self { radius, dim })
    }

    /// Unit sphere S^d.
    pub fn unit(dim: usize) -> Self {
        Self::new(1.0, dim).expect("unit sphere parameters are valid")
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Surface dimension d.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Ambient dimension d + 1.
    pub fn ambient_dim(&self) -> usize {
        self.dim + 1
    }

    /// Constant curvature: lower = upper = 1/radius².
    pub fn bounds(&self) -> CurvatureBounds {
        let c = 1.0 / (self.radius * self.radius);
        CurvatureBounds { lower: c, upper: c }
    }

    /// Validate raw coordinates as a sphere point (norm within 1e-9 relative).
    pub fn point(&self, coords: AmbientVector) -> Result<SurfacePoint> {
        if coords.len() != self.ambient_dim() {
            return Err(GeoError::Contract(format!(
                "expected {} ambient coordinates, got {}",
                self.ambient_dim(),
                coords.len()
            )));
        }
        let err = (coords.norm() - self.radius).abs();
        if err > 1e-9 * self.radius {
            return Err(GeoError::Contract(format!(
                "point is off the sphere by {err:.3e}"
            )));
        }
        Ok(SurfacePoint(coords))
    }

    /// Outward unit normal `x / |x|`.
    pub fn outward_normal(&self, x: &SurfacePoint) -> AmbientVector {
        let n = x.coords().norm();
        x.coords() / n
    }

    /// Validate a (point, direction) pair as phase-space state.
    pub fn tangent(&self, at: SurfacePoint, dir: AmbientVector) -> Result<UnitTangent> {
        let at = self.point(at.into_coords())?;
        ensure_unit(&dir, 1e-9, "tangent direction")?;
        let radial = dir.dot(&self.outward_normal(&at)).abs();
        if radial > 1e-8 {
            return Err(GeoError::Contract(format!(
                "direction has radial component {radial:.3e}"
            )));
        }
        Ok(UnitTangent { at, dir })
    }

    /// Unit-speed great-circle geodesic from `s`, evaluated at arc time `t`:
    /// position `cos(t/r) x + r sin(t/r) v`, velocity `-(1/r) sin(t/r) x + cos(t/r) v`.
    pub fn geodesic(&self, s: &UnitTangent, t: f64) -> UnitTangent {
        let r = self.radius;
        let (sin, cos) = (t / r).sin_cos();
        let x = s.at.coords();
        let p = x * cos + &s.dir * (r * sin);
        let v = x * (-sin / r) + &s.dir * cos;
        // The closed form is exact; re-normalizing keeps the invariants tight
        // over long chains of steps.
        let p = &p * (r / p.norm());
        let n = &p / r;
        let v = &v - &n * v.dot(&n);
        let v = &v / v.norm();
        UnitTangent {
            at: SurfacePoint(p),
            dir: v,
        }
    }

    /// Great-circle distance. Computed as `2 r asin(|x - y| / 2r)`, which
    /// equals `r arccos(<x,y>/r^2)` but stays accurate near zero where the
    /// arccosine form loses half the significant digits; the argument is
    /// clamped against rounding past the antipode.
    pub fn distance(&self, x: &SurfacePoint, y: &SurfacePoint) -> f64 {
        let half_chord = ((x.coords() - y.coords()).norm() / (2.0 * self.radius)).clamp(0.0, 1.0);
        2.0 * self.radius * half_chord.asin()
    }

    /// Parallel transport of a tangent vector `u` at `x` along the minimizing
    /// geodesic to `y`: rotation in `span(x, y)` by the subtended angle,
    /// identity on the orthogonal complement.
    ///
    /// Antipodal pairs have no unique minimizing geodesic and are rejected;
    /// picking one silently would break reproducibility.
    pub fn parallel_transport(
        &self,
        u: &AmbientVector,
        x: &SurfacePoint,
        y: &SurfacePoint,
    ) -> Result<AmbientVector> {
        let xn = x.coords() / x.coords().norm();
        let yn = y.coords() / y.coords().norm();
        let cos = xn.dot(&yn).clamp(-1.0, 1.0);
        let w = &yn - &xn * cos;
        let wn = w.norm();
        if wn < 1e-13 {
            if cos > 0.0 {
                // zero-length transport
                return Ok(u.clone());
            }
            return Err(GeoError::NonUniqueGeodesic);
        }
        // second projection pass: for nearly coincident points the residual
        // <x, w> after one pass is eps/|w|, which the rotation would reject
        let w = &w - &xn * w.dot(&xn);
        let w = &w / w.norm();
        let angle = 2.0 * (((&yn - &xn).norm() / 2.0).clamp(0.0, 1.0)).asin();
        rotate_in_plane(u, &xn, &w, angle)
    }

    /// True uniform sample on the sphere (normalized Gaussian), used as the
    /// reference distribution in diagnostics.
    pub fn sample_uniform(&self, rng: &mut RngStream) -> SurfacePoint {
        loop {
            let g = rng.standard_normal_vector(self.ambient_dim());
            let len = g.norm();
            if len >= 1e-8 {
                return SurfacePoint(g * (self.radius / len));
            }
        }
    }
}

type MembershipFn = dyn Fn(&AmbientVector) -> bool + Send + Sync;
type NormalFn = dyn Fn(&SurfacePoint) -> AmbientVector + Send + Sync;

/// Boundary of a convex body, described by callbacks.
///
/// `membership` answers `x in K`; `inward_normal` returns the unit normal
/// at a boundary point pointing into the body. Curvature bounds are
/// caller-supplied (no estimation is attempted); the `ellipsoid_model`
/// constructor derives them from the semi-axes.
#[derive(Clone)]
pub struct ConvexBodyModel {
    membership: Arc<MembershipFn>,
    inward_normal: Arc<NormalFn>,
    bounds: CurvatureBounds,
    interior_point: AmbientVector,
    membership_tol: f64,
}

impl fmt::Debug for ConvexBodyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexBodyModel")
            .field("bounds", &self.bounds)
            .field("interior_point", &self.interior_point)
            .field("membership_tol", &self.membership_tol)
            .finish_non_exhaustive()
    }
}

impl ConvexBodyModel {
    pub fn new(
        membership: impl Fn(&AmbientVector) -> bool + Send + Sync + 'static,
        inward_normal: impl Fn(&SurfacePoint) -> AmbientVector + Send + Sync + 'static,
        bounds: CurvatureBounds,
        interior_point: AmbientVector,
        membership_tol: f64,
    ) -> Result<Self> {
        if !membership(&interior_point) {
            return Err(GeoError::Contract(
                "interior_point is not inside the body".into(),
            ));
        }
        Ok(Self {
            membership: Arc::new(membership),
            inward_normal: Arc::new(inward_normal),
            bounds,
            interior_point,
            membership_tol,
        })
    }

    /// Raw membership query `x in K`.
    pub fn contains(&self, x: &AmbientVector) -> bool {
        (self.membership)(x)
    }

    /// Inward unit normal at a boundary point. The callback output is
    /// re-checked for unit norm on every call to guard broken callbacks.
    pub fn inward_normal(&self, x: &SurfacePoint) -> Result<AmbientVector> {
        let n = (self.inward_normal)(x);
        ensure_unit(&n, 1e-9, "inward_normal callback output")?;
        Ok(n)
    }

    pub fn bounds(&self) -> &CurvatureBounds {
        self.bounds_ref()
    }

    fn bounds_ref(&self) -> &CurvatureBounds {
        &self.bounds
    }

    pub fn interior_point(&self) -> &AmbientVector {
        &self.interior_point
    }

    pub fn membership_tol(&self) -> f64 {
        self.membership_tol
    }

    pub fn ambient_dim(&self) -> usize {
        self.interior_point.len()
    }

    /// Check that `x` lies within `slack` of the boundary: stepping inward
    /// by `slack` lands inside and stepping outward leaves the body. Robust
    /// for points a rounding error to either side of the exact surface.
    pub fn is_on_boundary(&self, x: &SurfacePoint, slack: f64) -> Result<bool> {
        let n = self.inward_normal(x)?;
        Ok(self.contains(&(x.coords() + &n * slack)) && !self.contains(&(x.coords() - n * slack)))
    }

    /// Validate raw coordinates as a boundary point, with `slack` as the
    /// admitted distance from the exact boundary.
    pub fn surface_point(&self, coords: AmbientVector, slack: f64) -> Result<SurfacePoint> {
        let candidate = SurfacePoint(coords);
        if !self.is_on_boundary(&candidate, slack)? {
            return Err(GeoError::Contract(format!(
                "coordinates are not within {slack:.3e} of the body boundary"
            )));
        }
        Ok(candidate)
    }
}

/// Tolerance on the ellipsoid level value `sum x_i^2 / a_i^2` admitted when
/// validating boundary points. The membership callback itself is strict:
/// inflating the level test would shift shallow-chord exit points by the
/// level slack divided by the chord angle, wrecking the oracle's accuracy.
const ELLIPSOID_LEVEL_TOL: f64 = 1e-10;

/// Ellipsoid `sum x_i^2 / a_i^2 <= 1` as a `ConvexBodyModel`.
///
/// Curvature bounds come from the principal-curvature extremes, attained at
/// the axis endpoints: `sqrt(upper) = a_max / a_min^2` and
/// `sqrt(lower) = a_min / a_max^2`. With all axes equal to `r` this reduces
/// to the sphere values `lower = upper = 1/r^2`.
pub fn ellipsoid_model(semi_axes: &[f64]) -> Result<ConvexBodyModel> {
    if semi_axes.len() < 2 {
        return Err(GeoError::Contract(
            "ellipsoid needs at least two semi-axes".into(),
        ));
    }
    for &a in semi_axes {
        if !(a > 0.0 && a.is_finite()) {
            return Err(GeoError::Contract(format!(
                "semi-axes must be positive and finite, got {a}"
            )));
        }
    }
    let a_min = semi_axes.iter().cloned().fold(f64::INFINITY, f64::min);
    let a_max = semi_axes.iter().cloned().fold(0.0, f64::max);
    let sqrt_upper = a_max / (a_min * a_min);
    let sqrt_lower = a_min / (a_max * a_max);
    let bounds = CurvatureBounds::new(sqrt_lower * sqrt_lower, sqrt_upper * sqrt_upper)?;

    let dim = semi_axes.len();
    let inv_sq: Vec<f64> = semi_axes.iter().map(|a| 1.0 / (a * a)).collect();
    let level = {
        let inv_sq = inv_sq.clone();
        move |x: &AmbientVector| -> f64 {
            x.iter().zip(inv_sq.iter()).map(|(xi, w)| xi * xi * w).sum()
        }
    };
    let membership = {
        let level = level.clone();
        move |x: &AmbientVector| x.len() == dim && level(x) <= 1.0
    };
    let normal = {
        let inv_sq = inv_sq.clone();
        move |p: &SurfacePoint| -> AmbientVector {
            // -grad f / |grad f| with f = sum x_i^2 / a_i^2
            let mut g = AmbientVector::from_fn(dim, |i, _| 2.0 * p.coords()[i] * inv_sq[i]);
            let len = g.norm();
            g /= -len;
            g
        }
    };
    ConvexBodyModel::new(
        membership,
        normal,
        bounds,
        AmbientVector::zeros(dim),
        ELLIPSOID_LEVEL_TOL,
    )
}

/// Scale raw coordinates radially onto the ellipsoid surface. Convenience
/// for building start points in experiments and tests.
pub fn ellipsoid_surface_point(
    semi_axes: &[f64],
    direction: &AmbientVector,
) -> Result<SurfacePoint> {
    if direction.len() != semi_axes.len() {
        return Err(GeoError::Contract(
            "direction dimension does not match the semi-axes".into(),
        ));
    }
    let level: f64 = direction
        .iter()
        .zip(semi_axes.iter())
        .map(|(x, a)| (x / a) * (x / a))
        .sum();
    if level <= 0.0 {
        return Err(GeoError::Contract(
            "direction must be nonzero to project onto the ellipsoid".into(),
        ));
    }
    Ok(SurfacePoint(direction / level.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn vec3(x: f64, y: f64, z: f64) -> AmbientVector {
        AmbientVector::from_vec(vec![x, y, z])
    }

    fn unit_s2() -> SphereModel {
        SphereModel::unit(2)
    }

    fn tangent(m: &SphereModel, p: AmbientVector, v: AmbientVector) -> UnitTangent {
        m.tangent(SurfacePoint::new_unchecked(p), v).unwrap()
    }

    #[test]
    fn quarter_great_circle() {
        let m = unit_s2();
        let s = tangent(&m, vec3(1.0, 0.0, 0.0), vec3(0.0, 1.0, 0.0));
        let out = m.geodesic(&s, FRAC_PI_2);
        assert!((out.at.coords() - vec3(0.0, 1.0, 0.0)).norm() < 1e-14);
        assert!((out.dir.clone() - vec3(-1.0, 0.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn zero_time_is_identity() {
        let m = unit_s2();
        let s = tangent(&m, vec3(0.0, 0.0, 1.0), vec3(1.0, 0.0, 0.0));
        let out = m.geodesic(&s, 0.0);
        assert!((out.at.coords() - s.at.coords()).norm() < 1e-14);
        assert!((out.dir.clone() - s.dir.clone()).norm() < 1e-14);
    }

    #[test]
    fn radius_two_half_circle() {
        // r = 2, t = pi gives t/r = pi/2: quarter turn of the circle.
        let m = SphereModel::new(2.0, 2).unwrap();
        let s = tangent(&m, vec3(2.0, 0.0, 0.0), vec3(0.0, 1.0, 0.0));
        let out = m.geodesic(&s, PI);
        assert!((out.at.coords() - vec3(0.0, 2.0, 0.0)).norm() < 1e-13);
        assert!((out.dir.clone() - vec3(-1.0, 0.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn geodesic_is_additive_in_time() {
        let m = SphereModel::new(1.5, 3).unwrap();
        let mut rng = RngStream::new(5, 0);
        for _ in 0..32 {
            let p = m.sample_uniform(&mut rng);
            let n = m.outward_normal(&p);
            let v = crate::geometry::sample_unit_tangent(&mut rng, &n).unwrap();
            let s = UnitTangent { at: p, dir: v };
            let (t1, t2) = (0.37, 0.81);
            let direct = m.geodesic(&s, t1 + t2);
            let chained = m.geodesic(&m.geodesic(&s, t1), t2);
            assert!(
                (direct.at.coords() - chained.at.coords()).norm() < 1e-9,
                "geodesic additivity violated"
            );
        }
    }

    #[test]
    fn geodesic_has_unit_speed() {
        let m = unit_s2();
        let s = tangent(&m, vec3(1.0, 0.0, 0.0), vec3(0.0, 0.6, 0.8));
        let h = 1e-5;
        for &t in &[0.0, 0.3, 1.0, 1.5] {
            let a = m.geodesic(&s, t);
            let b = m.geodesic(&s, t + h);
            let speed = (b.at.coords() - a.at.coords()).norm() / h;
            assert!(
                (speed - 1.0).abs() <= 1e-4,
                "finite-difference speed {speed} at t = {t}"
            );
        }
    }

    #[test]
    fn distances_on_unit_sphere() {
        let m = unit_s2();
        let x = m.point(vec3(1.0, 0.0, 0.0)).unwrap();
        let y = m.point(vec3(0.0, 1.0, 0.0)).unwrap();
        let anti = m.point(vec3(-1.0, 0.0, 0.0)).unwrap();
        assert_eq!(m.distance(&x, &x), 0.0);
        assert!((m.distance(&x, &y) - FRAC_PI_2).abs() < 1e-15);
        assert!((m.distance(&x, &anti) - PI).abs() < 1e-15);
        // the diameter saturates the curvature bound pi/sqrt(lower)
        assert!(m.distance(&x, &anti) <= m.bounds().diameter_bound() + 1e-12);
        assert!((m.distance(&x, &y) - m.distance(&y, &x)).abs() < 1e-15);
    }

    #[test]
    fn transport_examples() {
        let m = unit_s2();
        let x = m.point(vec3(1.0, 0.0, 0.0)).unwrap();
        let y = m.point(vec3(0.0, 1.0, 0.0)).unwrap();

        // transport at zero distance is the identity
        let u = vec3(0.0, 0.3, 0.4);
        let same = m.parallel_transport(&u, &x, &x).unwrap();
        assert_eq!(same, u);

        // a vector along the connecting geodesic rotates with it
        let v = m.parallel_transport(&vec3(0.0, 1.0, 0.0), &x, &y).unwrap();
        assert!((v - vec3(-1.0, 0.0, 0.0)).norm() < 1e-14);

        // the orthogonal complement of span(x, y) is fixed
        let w = m.parallel_transport(&vec3(0.0, 0.0, 1.0), &x, &y).unwrap();
        assert!((w - vec3(0.0, 0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn transport_rejects_antipodes() {
        let m = unit_s2();
        let x = m.point(vec3(1.0, 0.0, 0.0)).unwrap();
        let y = m.point(vec3(-1.0, 0.0, 0.0)).unwrap();
        assert!(matches!(
            m.parallel_transport(&vec3(0.0, 1.0, 0.0), &x, &y),
            Err(GeoError::NonUniqueGeodesic)
        ));
    }

    #[test]
    fn transport_preserves_inner_products() {
        let m = SphereModel::new(1.0, 3).unwrap();
        let mut rng = RngStream::new(17, 0);
        for _ in 0..64 {
            let x = m.sample_uniform(&mut rng);
            let y = m.sample_uniform(&mut rng);
            let n = m.outward_normal(&x);
            let u = crate::geometry::sample_unit_tangent(&mut rng, &n).unwrap();
            let w = crate::geometry::sample_unit_tangent(&mut rng, &n).unwrap();
            let (tu, tw) = (
                m.parallel_transport(&u, &x, &y).unwrap(),
                m.parallel_transport(&w, &x, &y).unwrap(),
            );
            assert!((tu.dot(&tw) - u.dot(&w)).abs() < 1e-9);
            // transported vectors are tangent at the destination
            let ny = m.outward_normal(&y);
            assert!(tu.dot(&ny).abs() < 1e-9);
        }
    }

    /// Normal curvature of the level set f = const at p along unit tangent
    /// u, computed from finite differences: (u^T Hess f u) / |grad f|.
    /// Independent of the closed-form bound formula under test.
    fn numeric_normal_curvature(
        f: &dyn Fn(&AmbientVector) -> f64,
        p: &AmbientVector,
        u: &AmbientVector,
    ) -> f64 {
        let h = 1e-5;
        let dim = p.len();
        let mut grad = AmbientVector::zeros(dim);
        for i in 0..dim {
            let mut hi = p.clone();
            let mut lo = p.clone();
            hi[i] += h;
            lo[i] -= h;
            grad[i] = (f(&hi) - f(&lo)) / (2.0 * h);
        }
        // second directional derivative along u
        let fp = f(p);
        let plus = f(&(p + u * h));
        let minus = f(&(p - u * h));
        let second = (plus - 2.0 * fp + minus) / (h * h);
        second / grad.norm()
    }

    #[test]
    fn ellipsoid_bounds_match_numeric_principal_curvatures() {
        let axes = [1.0, 1.0, 2.0];
        let body = ellipsoid_model(&axes).unwrap();
        assert!((body.bounds().sqrt_upper() - 2.0).abs() < 1e-12);
        assert!((body.bounds().sqrt_lower() - 0.25).abs() < 1e-12);

        let f = |x: &AmbientVector| -> f64 {
            x.iter()
                .zip(axes.iter())
                .map(|(xi, a)| (xi / a) * (xi / a))
                .sum()
        };
        // extremes are attained at axis endpoints: largest at the tip of the
        // long axis, smallest at the short-axis endpoint along the long axis
        let tip = vec3(0.0, 0.0, 2.0);
        let k_max = numeric_normal_curvature(&f, &tip, &vec3(1.0, 0.0, 0.0));
        assert!(
            (k_max - body.bounds().sqrt_upper()).abs() < 1e-4,
            "numeric max curvature {k_max}"
        );
        let side = vec3(1.0, 0.0, 0.0);
        let k_min = numeric_normal_curvature(&f, &side, &vec3(0.0, 0.0, 1.0));
        assert!(
            (k_min - body.bounds().sqrt_lower()).abs() < 1e-4,
            "numeric min curvature {k_min}"
        );
    }

    #[test]
    fn sphere_special_case_of_ellipsoid() {
        let body = ellipsoid_model(&[1.5, 1.5, 1.5]).unwrap();
        let expected = 1.0 / (1.5 * 1.5);
        assert!((body.bounds().lower() - expected).abs() < 1e-14);
        assert!((body.bounds().upper() - expected).abs() < 1e-14);
    }

    #[test]
    fn ellipsoid_normal_at_axis_endpoint() {
        let body = ellipsoid_model(&[1.0, 1.0, 2.0]).unwrap();
        let p = SurfacePoint::new_unchecked(vec3(1.0, 0.0, 0.0));
        let n = body.inward_normal(&p).unwrap();
        assert!((n - vec3(-1.0, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ellipsoid_normal_points_inward() {
        let axes = [0.8, 1.3, 2.0];
        let body = ellipsoid_model(&axes).unwrap();
        let eps = 1e-6 * 0.8;
        let mut rng = RngStream::new(2, 0);
        for _ in 0..32 {
            let dir = rng.standard_normal_vector(3);
            let p = ellipsoid_surface_point(&axes, &dir).unwrap();
            let n = body.inward_normal(&p).unwrap();
            assert!(
                body.contains(&(p.coords() + &n * eps)),
                "inside step left K"
            );
            assert!(
                !body.contains(&(p.coords() - &n * eps)),
                "outside step stayed in K"
            );
            assert!(body.is_on_boundary(&p, 2.0 * eps).unwrap());
        }
    }

    #[test]
    fn ellipsoid_rejects_bad_axes() {
        assert!(matches!(
            ellipsoid_model(&[1.0, -2.0]),
            Err(GeoError::Contract(_))
        ));
        assert!(matches!(
            ellipsoid_model(&[1.0]),
            Err(GeoError::Contract(_))
        ));
    }

    #[test]
    fn degenerate_bounds_detection() {
        let sphere = SphereModel::unit(2).bounds();
        assert!(sphere.is_degenerate());
        let spread = CurvatureBounds::new(1.0, 4.0).unwrap();
        assert!(!spread.is_degenerate());
        assert!((spread.max_step_time() - FRAC_PI_2 / 2.0).abs() < 1e-15);
        assert!((spread.diameter_bound() - PI).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn geodesic_stays_on_sphere_with_unit_tangent(seed in 0u64..500, t in 0.0f64..3.0) {
            let m = SphereModel::new(1.3, 3).unwrap();
            let mut rng = RngStream::new(seed, 1);
            let p = m.sample_uniform(&mut rng);
            let n = m.outward_normal(&p);
            let v = crate::geometry::sample_unit_tangent(&mut rng, &n).unwrap();
            let out = m.geodesic(&UnitTangent { at: p, dir: v }, t);
            prop_assert!((out.at.coords().norm() - 1.3).abs() < 1e-9 * 1.3);
            prop_assert!((out.dir.norm() - 1.0).abs() < 1e-9);
            prop_assert!(out.dir.dot(&m.outward_normal(&out.at)).abs() < 1e-8);
        }
    }
}
