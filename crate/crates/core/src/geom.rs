//! Euclidean and spherical primitives: arc-distance, spindles, circumballs,
//! membership in intersections of balls and the classification of
//! intersections of sphere families.
//!
//! Points are dynamically sized vectors so that the same routines serve the
//! planar, spatial and higher-dimensional constructions.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point (or vector) of Euclidean n-space.
pub type Point = DVector<f64>;

/// Builds a point from its coordinates.
pub fn point(coords: &[f64]) -> Point {
    DVector::from_column_slice(coords)
}

/// Two-tier tolerance: `eps_geom` for predicates, `eps_opt` for optimizers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps_geom: f64,
    pub eps_opt: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eps_geom: 1e-9,
            eps_opt: 1e-12,
        }
    }
}

impl Tolerance {
    /// Validates `0 < eps_opt <= eps_geom < 1e-3`.
    pub fn new(eps_geom: f64, eps_opt: f64) -> Result<Self> {
        if !(eps_opt > 0.0 && eps_opt <= eps_geom && eps_geom < 1e-3) {
            return Err(Error::InvalidInput(format!(
                "tolerances must satisfy 0 < eps_opt <= eps_geom < 1e-3, got eps_geom={eps_geom}, eps_opt={eps_opt}"
            )));
        }
        Ok(Tolerance { eps_geom, eps_opt })
    }

    /// Replaces the predicate tolerance, lowering `eps_opt` if needed.
    pub fn with_geom(eps_geom: f64) -> Result<Self> {
        Tolerance::new(eps_geom, eps_geom.min(1e-12))
    }
}

/// Checks that two points live in the same ambient space.
pub fn check_same_dim(a: &Point, b: &Point) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

/// Checks that every point of `pts` has dimension `dim` and finite entries.
pub fn check_points(pts: &[Point], dim: usize) -> Result<()> {
    for p in pts {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
    }
    Ok(())
}

/// A closed or open ball; whether the boundary belongs to it is decided by
/// the operation that uses it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    /// A ball of positive radius.
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Ball { center, radius })
    }

    /// The closed unit ball around `center`.
    pub fn unit(center: Point) -> Self {
        Ball {
            center,
            radius: 1.0,
        }
    }

    /// The zero-radius ball reported for singleton inputs.
    pub(crate) fn singleton(center: Point) -> Self {
        Ball {
            center,
            radius: 0.0,
        }
    }

    /// True for the zero-radius ball of a singleton.
    pub fn is_degenerate(&self) -> bool {
        self.radius == 0.0
    }

    /// Membership in the closed (or open) ball with tolerance `eps_geom`.
    pub fn contains(&self, x: &Point, closed: bool, tol: &Tolerance) -> bool {
        let d = (x - &self.center).norm();
        if closed {
            d <= self.radius + tol.eps_geom
        } else {
            d < self.radius - tol.eps_geom
        }
    }
}

/// A sphere of positive radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    pub center: Point,
    pub radius: f64,
}

impl Sphere {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sphere radius must be positive, got {radius}"
            )));
        }
        Ok(Sphere { center, radius })
    }

    /// The unit sphere around `center`.
    pub fn unit(center: Point) -> Self {
        Sphere {
            center,
            radius: 1.0,
        }
    }

    /// Signed distance of `x` from the sphere (positive outside).
    pub fn residual(&self, x: &Point) -> f64 {
        (x - &self.center).norm() - self.radius
    }
}

/// Coarse classification of a [`SubSphere`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubSphereKind {
    Empty,
    Point,
    Sphere,
}

/// Intersection of a sphere family: empty, a single point, or a sphere of
/// intrinsic dimension `k` lying in a `(k+1)`-dimensional affine subspace.
#[derive(Debug, Clone, PartialEq)]
pub enum SubSphere {
    Empty,
    Point(Point),
    Sphere {
        center: Point,
        radius: f64,
        /// Orthonormal basis (as columns) of the directions of the affine
        /// subspace containing the sphere.
        frame: DMatrix<f64>,
        intrinsic_dim: usize,
    },
}

impl SubSphere {
    pub fn kind(&self) -> SubSphereKind {
        match self {
            SubSphere::Empty => SubSphereKind::Empty,
            SubSphere::Point(_) => SubSphereKind::Point,
            SubSphere::Sphere { .. } => SubSphereKind::Sphere,
        }
    }

    /// Intrinsic dimension; a single point is not a sphere and yields `None`.
    pub fn intrinsic_dim(&self) -> Option<usize> {
        match self {
            SubSphere::Sphere { intrinsic_dim, .. } => Some(*intrinsic_dim),
            _ => None,
        }
    }

    pub fn center(&self) -> Option<&Point> {
        match self {
            SubSphere::Empty => None,
            SubSphere::Point(p) => Some(p),
            SubSphere::Sphere { center, .. } => Some(center),
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match self {
            SubSphere::Empty => None,
            SubSphere::Point(_) => Some(0.0),
            SubSphere::Sphere { radius, .. } => Some(*radius),
        }
    }

    /// Distance from `x` to the sub-sphere (infinite when empty).
    pub fn distance(&self, x: &Point) -> f64 {
        match self {
            SubSphere::Empty => f64::INFINITY,
            SubSphere::Point(p) => (x - p).norm(),
            SubSphere::Sphere {
                center,
                radius,
                frame,
                ..
            } => {
                let d = x - center;
                let inside = frame.transpose() * &d;
                let normal = (&d - frame * &inside).norm();
                let radial = inside.norm() - radius;
                (normal * normal + radial * radial).sqrt()
            }
        }
    }
}

/// Arc-distance `2 asin(|a-b|/2)`: the length of the shorter unit arc joining
/// `a` and `b`. Returns `Ok(None)` (undefined) when `|a-b| > 2 + eps_geom`;
/// chords in `(2, 2 + eps_geom]` are clamped to the diameter.
pub fn arc_distance(a: &Point, b: &Point, tol: &Tolerance) -> Result<Option<f64>> {
    check_same_dim(a, b)?;
    let chord = (a - b).norm();
    if chord > 2.0 + tol.eps_geom {
        return Ok(None);
    }
    Ok(Some(2.0 * (chord / 2.0).clamp(-1.0, 1.0).asin()))
}

/// Outcome of comparing `rho(a,b) + rho(b,c)` with `rho(a,c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArcTriangle {
    /// `b` lies outside the closed spindle of `a` and `c`.
    Greater,
    /// `b` lies on the boundary of the spindle.
    Equal,
    /// `b` lies in the open spindle.
    Less,
}

/// Classifies the sign of `rho(a,b) + rho(b,c) - rho(a,c)` with an
/// `eps_geom` band for equality.
pub fn classify_arc_triangle(a: &Point, b: &Point, c: &Point, tol: &Tolerance) -> Result<ArcTriangle> {
    check_same_dim(a, b)?;
    check_same_dim(a, c)?;
    let rho = |p: &Point, q: &Point| -> Result<f64> {
        arc_distance(p, q, tol)?.ok_or(Error::DistanceTooLarge {
            distance: (p - q).norm(),
        })
    };
    let diff = rho(a, b)? + rho(b, c)? - rho(a, c)?;
    Ok(if diff > tol.eps_geom {
        ArcTriangle::Greater
    } else if diff < -tol.eps_geom {
        ArcTriangle::Less
    } else {
        ArcTriangle::Equal
    })
}

/// Membership of `x` in the spindle of `a` and `b` (closed or open).
///
/// The spindle is the whole space when `|a-b| > 2`, the ball on the diameter
/// `[a,b]` when `|a-b| = 2`, and otherwise the solid of revolution bounded by
/// the unit arcs through `a` and `b`. In the half-plane spanned by the axis
/// `a b` and the point `x`, membership reduces to lying in the unit disk whose
/// center sits on the far side of the chord.
///
/// # Panics
/// Panics if the three points do not share a dimension.
pub fn spindle_contains(a: &Point, b: &Point, x: &Point, closed: bool, tol: &Tolerance) -> bool {
    let eps = tol.eps_geom;
    let d = (b - a).norm();
    if d > 2.0 + eps {
        return true;
    }
    let mid = (a + b) * 0.5;
    if (d - 2.0).abs() <= eps {
        let r = (x - &mid).norm();
        return if closed { r <= d / 2.0 + eps } else { r < d / 2.0 - eps };
    }
    if d <= eps {
        return closed && (x - a).norm() <= eps;
    }
    let u = (b - a) / d;
    let rel = x - &mid;
    let s = rel.dot(&u);
    let h = (&rel - &u * s).norm();
    let k = (1.0 - d * d / 4.0).max(0.0).sqrt();
    let dist = (s * s + (h + k) * (h + k)).sqrt();
    if closed {
        dist <= 1.0 + eps
    } else {
        dist < 1.0 - eps
    }
}

/// Membership in the intersection of the balls of a common `radius` around
/// `centers`; the empty family yields the whole space.
pub fn in_ball_intersection(centers: &[Point], radius: f64, x: &Point, closed: bool, tol: &Tolerance) -> bool {
    centers.iter().all(|c| {
        let d = (x - c).norm();
        if closed {
            d <= radius + tol.eps_geom
        } else {
            d < radius - tol.eps_geom
        }
    })
}

/// Minimal enclosing ball with the support set certifying it.
#[derive(Debug, Clone, PartialEq)]
pub struct Circumball {
    pub ball: Ball,
    /// Indices of at most `n+1` boundary points whose convex hull contains
    /// the center.
    pub support: Vec<usize>,
    /// True when the a-posteriori certificate succeeded.
    pub certified: bool,
}

/// Circumcenter of `pts` inside their affine hull, or `None` when the points
/// are affinely dependent.
fn affine_circumcenter(pts: &[&Point]) -> Option<(Point, f64)> {
    let p0 = pts[0];
    let k = pts.len() - 1;
    if k == 0 {
        return Some((p0.clone(), 0.0));
    }
    let n = p0.len();
    if k > n {
        return None;
    }
    let v = DMatrix::from_fn(n, k, |r, c| pts[c + 1][r] - p0[r]);
    let g = v.transpose() * &v;
    let sv = g.clone().svd(false, false).singular_values;
    let smax = sv.max();
    if smax <= 0.0 || sv.min() <= 1e-12 * smax {
        return None;
    }
    let rhs = DVector::from_fn(k, |i, _| 0.5 * g[(i, i)]);
    let lambda = g.lu().solve(&rhs)?;
    let c = p0 + v * lambda;
    let r = pts.iter().map(|p| (*p - &c).norm()).fold(0.0, f64::max);
    Some((c, r))
}

fn ball_of(x: &[Point], support: &[usize]) -> Option<(Point, f64)> {
    if support.is_empty() {
        return None;
    }
    let pts: Vec<&Point> = support.iter().map(|&i| &x[i]).collect();
    affine_circumcenter(&pts)
}

fn inside(x: &Point, ball: &Option<(Point, f64)>, slack: f64) -> bool {
    match ball {
        None => false,
        Some((c, r)) => (x - c).norm() <= r + slack,
    }
}

/// Move-to-front minimal enclosing ball over the prefix `order[..end]` with
/// the points of `support` forced onto the boundary.
fn mtf_ball(x: &[Point], order: &mut Vec<usize>, end: usize, support: &mut Vec<usize>, slack: f64) -> Option<(Point, f64)> {
    let dim = x[0].len();
    let mut ball = ball_of(x, support);
    if support.len() == dim + 1 {
        return ball;
    }
    let mut i = 0;
    while i < end {
        let p = order[i];
        if !inside(&x[p], &ball, slack) {
            support.push(p);
            let candidate = mtf_ball(x, order, i, support, slack);
            support.pop();
            if candidate.is_some() {
                ball = candidate;
            }
            order.remove(i);
            order.insert(0, p);
        }
        i += 1;
    }
    ball
}

/// Minimal enclosing ball of a finite point set.
///
/// Up to 12 points every support set of at most `n+1` points is enumerated
/// and the smallest covering candidate kept; larger inputs use the
/// move-to-front incremental construction. The result is certified a
/// posteriori: all points are inside within `eps_geom` and the center lies in
/// the convex hull of at most `n+1` boundary points.
pub fn circumball(x: &[Point], tol: &Tolerance) -> Result<Circumball> {
    if x.is_empty() {
        return Err(Error::EmptyInput("circumball of an empty set"));
    }
    let dim = x[0].len();
    check_points(x, dim)?;
    let scale = x.iter().map(|p| (p - &x[0]).norm()).fold(1.0, f64::max);
    let slack = tol.eps_geom * scale;
    let (center, radius) = if x.len() <= 12 {
        let mut best: Option<(Point, f64)> = None;
        for size in 1..=(dim + 1).min(x.len()) {
            for subset in (0..x.len()).combinations(size) {
                if let Some((c, r)) = ball_of(x, &subset) {
                    if best.as_ref().is_some_and(|(_, br)| *br <= r) {
                        continue;
                    }
                    if x.iter().all(|p| (p - &c).norm() <= r + slack) {
                        best = Some((c, r));
                    }
                }
            }
        }
        best.expect("a support set always exists")
    } else {
        let mut order: Vec<usize> = (0..x.len()).collect();
        let mut support = Vec::new();
        let end = order.len();
        mtf_ball(x, &mut order, end, &mut support, slack).expect("nonempty input")
    };
    let radius = x.iter().map(|p| (p - &center).norm()).fold(radius, f64::max);
    let boundary: Vec<usize> = (0..x.len())
        .filter(|&i| (radius - (&x[i] - &center).norm()) <= 10.0 * slack)
        .collect();
    let bpts: Vec<Point> = boundary.iter().map(|&i| x[i].clone()).collect();
    let (support, certified) = match convex_hull_contains(&bpts, &center, 10.0 * slack) {
        Some(w) => (w.iter().map(|(i, _)| boundary[*i]).collect(), true),
        None => (boundary, false),
    };
    let ball = if radius <= slack && x.iter().all(|p| (p - &center).norm() <= slack) {
        Ball::singleton(center)
    } else {
        Ball { center, radius }
    };
    Ok(Circumball {
        ball,
        support,
        certified,
    })
}

/// Circumradius of a nonempty finite set.
pub fn circumradius(x: &[Point], tol: &Tolerance) -> Result<f64> {
    Ok(circumball(x, tol)?.ball.radius)
}

/// Decides whether `y` lies in the convex hull of `points` by searching
/// simplices of at most `n+1` vertices in lexicographic order. Returns the
/// barycentric weights (index, weight) of the first simplex found.
pub fn convex_hull_contains(points: &[Point], y: &Point, tol: f64) -> Option<Vec<(usize, f64)>> {
    if points.is_empty() {
        return None;
    }
    let n = y.len();
    for size in 1..=(n + 1).min(points.len()) {
        for subset in (0..points.len()).combinations(size) {
            if let Some(w) = simplex_weights(points, &subset, y, tol) {
                return Some(subset.into_iter().zip(w).collect());
            }
        }
    }
    None
}

/// Barycentric weights of `y` in the simplex `subset`, if `y` lies in it.
fn simplex_weights(points: &[Point], subset: &[usize], y: &Point, tol: f64) -> Option<Vec<f64>> {
    let p0 = &points[subset[0]];
    let k = subset.len() - 1;
    if k == 0 {
        return ((y - p0).norm() <= tol).then(|| vec![1.0]);
    }
    let n = y.len();
    let v = DMatrix::from_fn(n, k, |r, c| points[subset[c + 1]][r] - p0[r]);
    let svd = v.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if smax <= 0.0 || svd.singular_values.min() <= 1e-12 * smax {
        return None;
    }
    let rhs = y - p0;
    let lambda = svd.solve(&rhs, 0.0).ok()?;
    if (&v * &lambda - &rhs).norm() > tol {
        return None;
    }
    let first = 1.0 - lambda.sum();
    let mut w = vec![first];
    w.extend(lambda.iter().copied());
    w.iter().all(|&l| l >= -tol).then_some(w)
}

/// Orthonormal basis of the null space of the rows of `a` with the given
/// singular-value cutoff, returned as columns, plus the numerical rank.
pub(crate) fn null_space(a: &DMatrix<f64>, rel_cutoff: f64) -> (DMatrix<f64>, usize) {
    let n = a.ncols();
    let rows = a.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let smax = svd.singular_values.max();
    let cutoff = rel_cutoff * smax;
    let mut null_cols = Vec::new();
    let mut rank = 0;
    for i in 0..n {
        if smax > 0.0 && svd.singular_values[i] > cutoff {
            rank += 1;
        } else {
            null_cols.push(vt.row(i).transpose());
        }
    }
    let basis = if null_cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&null_cols)
    };
    (basis, rank)
}

/// Exact classification of the intersection of a sphere family.
///
/// Subtracting the equation of the first sphere from the others yields the
/// radical hyperplanes; their common solution set is an affine subspace whose
/// rank is decided by the singular-value cutoff `eps_geom * sigma_max`. The
/// intersection of the first sphere with that subspace is empty, a tangency
/// point, or a sphere. A final residual check against every member rejects
/// inconsistent (e.g. concentric) families.
pub fn intersect_spheres(family: &[Sphere], tol: &Tolerance) -> Result<SubSphere> {
    let first = family.first().ok_or(Error::EmptyInput("sphere family"))?;
    let n = first.center.len();
    for s in family {
        check_same_dim(&first.center, &s.center)?;
    }
    let c0 = &first.center;
    let r0 = first.radius;
    let scale = family
        .iter()
        .map(|s| s.radius.max((&s.center - c0).norm()))
        .fold(1.0, f64::max);
    let eps = tol.eps_geom * scale;
    let m = family.len() - 1;
    let a = DMatrix::from_fn(m, n, |i, j| 2.0 * (c0[j] - family[i + 1].center[j]));
    let beta = DVector::from_fn(m, |i, _| {
        let s = &family[i + 1];
        c0.norm_squared() - r0 * r0 - s.center.norm_squared() + s.radius * s.radius
    });
    let (null, rank) = if m == 0 {
        (DMatrix::identity(n, n), 0)
    } else {
        let amax = a.abs().max();
        if amax <= eps {
            (DMatrix::identity(n, n), 0)
        } else {
            null_space(&a, tol.eps_geom)
        }
    };
    // Closest point of the radical subspace to c0.
    let foot = if rank == 0 {
        c0.clone()
    } else {
        let svd = a.clone().svd(true, true);
        let cutoff = tol.eps_geom * svd.singular_values.max();
        let rhs = &beta - &a * c0;
        match svd.solve(&rhs, cutoff) {
            Ok(delta) => c0 + delta,
            Err(_) => return Ok(SubSphere::Empty),
        }
    };
    let delta = (&foot - c0).norm();
    let k_aff = n - rank;
    let candidate = if k_aff == 0 {
        if (delta - r0).abs() <= eps {
            SubSphere::Point(foot)
        } else {
            SubSphere::Empty
        }
    } else if delta > r0 + eps {
        SubSphere::Empty
    } else if (delta - r0).abs() <= eps {
        SubSphere::Point(foot)
    } else {
        SubSphere::Sphere {
            center: foot,
            radius: (r0 * r0 - delta * delta).sqrt(),
            frame: null,
            intrinsic_dim: k_aff - 1,
        }
    };
    let consistent = match &candidate {
        SubSphere::Empty => true,
        SubSphere::Point(p) => family.iter().all(|s| s.residual(p).abs() <= 10.0 * eps),
        SubSphere::Sphere {
            center,
            radius,
            frame,
            ..
        } => family.iter().all(|s| {
            let d = &s.center - center;
            let along = (frame.transpose() * &d).norm();
            let reach = (d.norm_squared() + radius * radius).sqrt();
            along <= 10.0 * eps && (reach - s.radius).abs() <= 10.0 * eps
        }),
    };
    Ok(if consistent { candidate } else { SubSphere::Empty })
}

/// Vertices of a regular `n`-simplex in `R^n` centered at the origin with
/// the given circumradius.
pub fn regular_simplex(n: usize, circumradius: f64) -> Vec<Point> {
    let ones = DMatrix::from_element(1, n + 1, 1.0);
    let (basis, _) = null_space(&ones, 1e-12);
    (0..=n)
        .map(|i| {
            let mut e = DVector::from_element(n + 1, -1.0 / (n + 1) as f64);
            e[i] += 1.0;
            let p = basis.transpose() * e;
            let norm = p.norm();
            p * (circumradius / norm)
        })
        .collect()
}

/// Planar point with polar coordinates `(r, theta)`.
pub fn polar(r: f64, theta: f64) -> Point {
    point(&[r * theta.cos(), r * theta.sin()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn arc_distance_anchors() {
        let o = point(&[0.0, 0.0]);
        assert_eq!(arc_distance(&o, &o, &tol()).unwrap(), Some(0.0));
        let d2 = arc_distance(&o, &point(&[2.0, 0.0]), &tol()).unwrap().unwrap();
        assert_abs_diff_eq!(d2, PI, epsilon = 1e-15);
        let d1 = arc_distance(&o, &point(&[0.0, 1.0]), &tol()).unwrap().unwrap();
        assert_abs_diff_eq!(d1, PI / 3.0, epsilon = 1e-15);
        assert_eq!(arc_distance(&o, &point(&[2.1, 0.0]), &tol()).unwrap(), None);
        let clamped = arc_distance(&o, &point(&[2.0 + 5e-10, 0.0]), &tol()).unwrap();
        assert_abs_diff_eq!(clamped.unwrap(), PI, epsilon = 1e-12);
        assert!(arc_distance(&o, &point(&[1.0, 0.0, 0.0]), &tol()).is_err());
    }

    #[test]
    fn trichotomy_examples() {
        let a = point(&[0.0, 0.0]);
        let c = point(&[1.0, 0.0]);
        assert_eq!(classify_arc_triangle(&a, &a, &c, &tol()).unwrap(), ArcTriangle::Equal);
        let between = point(&[0.4, 0.0]);
        assert_eq!(classify_arc_triangle(&a, &between, &c, &tol()).unwrap(), ArcTriangle::Less);
        let far = point(&[0.5, 0.8]);
        assert_eq!(classify_arc_triangle(&a, &far, &c, &tol()).unwrap(), ArcTriangle::Greater);
        let too_far = point(&[3.0, 0.0]);
        assert!(classify_arc_triangle(&a, &between, &too_far, &tol()).is_err());
    }

    #[test]
    fn spindle_examples() {
        let t = tol();
        let a = point(&[-1.0, 0.0]);
        let b = point(&[1.0, 0.0]);
        assert!(spindle_contains(&a, &b, &point(&[0.0, 1.0]), true, &t));
        assert!(!spindle_contains(&a, &b, &point(&[0.0, 1.0]), false, &t));
        assert!(spindle_contains(&a, &b, &a, true, &t));
        let a = point(&[0.0, 0.0]);
        let b = point(&[1.0, 0.0]);
        assert!(!spindle_contains(&a, &b, &point(&[0.5, 0.9]), true, &t));
        let peak = 1.0 - 3f64.sqrt() / 2.0;
        assert!(spindle_contains(&a, &b, &point(&[0.5, peak - 1e-6]), false, &t));
        assert!(!spindle_contains(&a, &b, &point(&[0.5, peak + 1e-6]), true, &t));
        // Far apart points span the whole space.
        assert!(spindle_contains(&a, &point(&[3.0, 0.0]), &point(&[0.0, 50.0]), true, &t));
    }

    #[test]
    fn circumball_examples() {
        let t = tol();
        let single = circumball(&[point(&[0.3, 0.4])], &t).unwrap();
        assert!(single.ball.is_degenerate());
        let pair = circumball(&[point(&[-1.0, 0.0]), point(&[1.0, 0.0])], &t).unwrap();
        assert_abs_diff_eq!(pair.ball.radius, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pair.ball.center.norm(), 0.0, epsilon = 1e-12);
        assert!(pair.certified);
        assert!(circumball(&[], &t).is_err());
    }

    #[test]
    fn circumball_large_input_uses_incremental_path() {
        let t = tol();
        let pts: Vec<Point> = (0..40)
            .map(|i| {
                let th = i as f64 * 0.7;
                polar(0.5 + 0.3 * (i as f64 * 1.3).sin().abs(), th)
            })
            .collect();
        let big = circumball(&pts, &t).unwrap();
        let small = circumball(&pts[..12], &t).unwrap();
        assert!(big.certified && small.certified);
        assert!(big.ball.radius >= small.ball.radius - 1e-12);
        for p in &pts {
            assert!((p - &big.ball.center).norm() <= big.ball.radius + 1e-9);
        }
    }

    #[test]
    fn ball_intersection_examples() {
        let t = tol();
        let o = point(&[0.0, 0.0]);
        assert!(in_ball_intersection(std::slice::from_ref(&o), 1.0, &o, true, &t));
        let centers = [point(&[-1.0, 0.0]), point(&[1.0, 0.0])];
        assert!(!in_ball_intersection(&centers, 1.0, &point(&[0.0, 0.9]), true, &t));
        assert!(in_ball_intersection(&[], 1.0, &point(&[7.0, 7.0]), true, &t));
    }

    #[test]
    fn sphere_intersection_examples() {
        let t = tol();
        let s1 = Sphere::unit(point(&[0.0, 0.0, 0.0]));
        let s2 = Sphere::unit(point(&[1.0, 0.0, 0.0]));
        match intersect_spheres(&[s1.clone(), s2], &t).unwrap() {
            SubSphere::Sphere {
                center,
                radius,
                intrinsic_dim,
                ..
            } => {
                assert_eq!(intrinsic_dim, 1);
                assert_abs_diff_eq!(radius, 3f64.sqrt() / 2.0, epsilon = 1e-12);
                assert_abs_diff_eq!((center - point(&[0.5, 0.0, 0.0])).norm(), 0.0, epsilon = 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        let tangent = Sphere::unit(point(&[2.0, 0.0, 0.0]));
        assert_eq!(
            intersect_spheres(&[s1.clone(), tangent], &t).unwrap(),
            SubSphere::Point(point(&[1.0, 0.0, 0.0]))
        );
        let apart = Sphere::unit(point(&[2.5, 0.0, 0.0]));
        assert_eq!(intersect_spheres(&[s1.clone(), apart], &t).unwrap(), SubSphere::Empty);
        let concentric = Sphere::new(point(&[0.0, 0.0, 0.0]), 0.5).unwrap();
        assert_eq!(intersect_spheres(&[s1, concentric], &t).unwrap(), SubSphere::Empty);
    }
}
