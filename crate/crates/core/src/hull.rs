//! Spindle convex hulls: the exact planar arc boundary, membership for
//! dimensions up to three, spherical hulls on sub-spheres, Carathéodory and
//! Steinitz reductions, spindle convex position and the Erdős–Szekeres style
//! subset search.
//!
//! Membership rests on the identity `conv_s X = B[B[X]]`: a point `p` is in
//! the hull iff every point of `B[X]` is within unit distance of `p`. The
//! farthest point of the convex body `B[X]` from `p` lies in the relative
//! interior of a boundary stratum (a piece of one sphere, of the circle shared
//! by two spheres, or a vertex), and on each stratum the farthest point of the
//! carrying sub-sphere is explicit. Enumerating the sub-families of at most
//! `n` spheres therefore yields the exact maximum.

use std::f64::consts::{PI, TAU};

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    circumball, convex_hull_contains, in_ball_intersection, intersect_spheres, Ball, Point, Sphere, SubSphere,
    Tolerance,
};
use crate::qp::{self, QpOutcome, QuadProgram};

/// Largest ambient dimension with exact hull machinery.
pub const MAX_HULL_DIM: usize = 3;

/// Functional optimized over the body `B[X]`.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Objective<'a> {
    /// Minimize `<c, u>` over `c` in `B[X]`.
    MinLinear(&'a Point),
    /// Maximize `|c - p|` over `c` in `B[X]`.
    MaxDistance(&'a Point),
}

impl Objective<'_> {
    /// Value oriented so that larger is better.
    fn score(&self, c: &Point) -> f64 {
        match self {
            Objective::MinLinear(u) => -c.dot(u),
            Objective::MaxDistance(p) => (c - *p).norm(),
        }
    }

    /// Best point of a sub-sphere together with its antipode, the latter
    /// needed for zero-dimensional spheres and for ties.
    fn candidates(&self, center: &Point, radius: f64, frame: &DMatrix<f64>) -> Vec<Point> {
        let dir = match self {
            Objective::MinLinear(u) => -(frame.transpose() * *u),
            Objective::MaxDistance(p) => frame.transpose() * (center - *p),
        };
        let norm = dir.norm();
        let local = if norm > 1e-12 {
            dir / norm
        } else {
            let mut e = DVector::zeros(frame.ncols());
            e[0] = 1.0;
            e
        };
        let offset = frame * local * radius;
        vec![center + &offset, center - offset]
    }
}

/// Boundary strata of `B[X]`: the sub-spheres cut out by every sub-family
/// of at most `n` of the unit spheres around the (deduplicated) centers.
#[derive(Debug, Clone)]
pub(crate) struct Body {
    centers: Vec<Point>,
    shape: BodyShape,
    slack: Tolerance,
}

#[derive(Debug, Clone)]
enum BodyShape {
    Empty,
    Single(Point),
    Strata(Vec<SubSphere>),
}

impl Body {
    pub(crate) fn new(centers: &[Point], tol: &Tolerance) -> Result<Self> {
        let crr = circumball(centers, tol)?;
        let slack = Tolerance {
            eps_geom: 10.0 * tol.eps_geom,
            ..*tol
        };
        if crr.ball.radius > 1.0 + tol.eps_geom {
            return Ok(Body {
                centers: centers.to_vec(),
                shape: BodyShape::Empty,
                slack,
            });
        }
        if (crr.ball.radius - 1.0).abs() <= tol.eps_geom {
            return Ok(Body {
                centers: centers.to_vec(),
                shape: BodyShape::Single(crr.ball.center),
                slack,
            });
        }
        let n = centers[0].len();
        let mut distinct: Vec<Point> = Vec::new();
        for c in centers {
            if distinct.iter().all(|d| (d - c).norm() > tol.eps_geom) {
                distinct.push(c.clone());
            }
        }
        let mut strata = Vec::new();
        for size in 1..=n.min(distinct.len()) {
            for subset in (0..distinct.len()).combinations(size) {
                let family: Vec<Sphere> = subset.iter().map(|&i| Sphere::unit(distinct[i].clone())).collect();
                match intersect_spheres(&family, tol)? {
                    SubSphere::Empty => {}
                    s => strata.push(s),
                }
            }
        }
        Ok(Body {
            centers: distinct,
            shape: BodyShape::Strata(strata),
            slack,
        })
    }

    pub(crate) fn is_empty(&self) -> bool {
        matches!(self.shape, BodyShape::Empty)
    }

    /// Optimum of an [`Objective`] over the body; `None` when it is empty.
    pub(crate) fn optimize(&self, objective: Objective<'_>) -> Option<(f64, Point)> {
        let strata = match &self.shape {
            BodyShape::Empty => return None,
            BodyShape::Single(q) => return Some(unscore(objective, objective.score(q), q.clone())),
            BodyShape::Strata(s) => s,
        };
        let mut best: Option<(f64, Point)> = None;
        for stratum in strata {
            let points = match stratum {
                SubSphere::Empty => continue,
                SubSphere::Point(p) => vec![p.clone()],
                SubSphere::Sphere {
                    center, radius, frame, ..
                } => objective.candidates(center, *radius, frame),
            };
            for cand in points {
                if !in_ball_intersection(&self.centers, 1.0, &cand, true, &self.slack) {
                    continue;
                }
                let s = objective.score(&cand);
                if best.as_ref().is_none_or(|(b, _)| s > *b) {
                    best = Some((s, cand));
                }
            }
        }
        best.map(|(s, p)| unscore(objective, s, p))
    }
}

fn unscore(objective: Objective<'_>, s: f64, p: Point) -> (f64, Point) {
    match objective {
        Objective::MinLinear(_) => (-s, p),
        Objective::MaxDistance(_) => (s, p),
    }
}

/// Optimum of an [`Objective`] over `B[X]`; `None` when the body is empty.
pub(crate) fn optimize_over_body(centers: &[Point], objective: Objective<'_>, tol: &Tolerance) -> Result<Option<(f64, Point)>> {
    Ok(Body::new(centers, tol)?.optimize(objective))
}

fn check_hull_input(x: &[Point]) -> Result<usize> {
    let first = x.first().ok_or(Error::EmptyInput("point set"))?;
    let n = first.len();
    crate::geom::check_points(x, n)?;
    if n > MAX_HULL_DIM {
        return Err(Error::Unsupported { dim: n });
    }
    Ok(n)
}

/// Largest distance from `p` to a point of `B[X]`, or `None` if `B[X]` is
/// empty. `p` lies in `conv_s X` iff the value is at most one.
pub fn farthest_body_distance(x: &[Point], p: &Point, tol: &Tolerance) -> Result<Option<f64>> {
    let n = check_hull_input(x)?;
    crate::geom::check_points(std::slice::from_ref(p), n)?;
    Ok(optimize_over_body(x, Objective::MaxDistance(p), tol)?.map(|(v, _)| v))
}

/// Spindle convex hull of a fixed set, prepared for repeated membership
/// queries.
#[derive(Debug, Clone)]
pub struct HullOracle {
    body: Body,
    dim: usize,
    tol: Tolerance,
}

impl HullOracle {
    pub fn new(x: &[Point], tol: &Tolerance) -> Result<Self> {
        let dim = check_hull_input(x)?;
        Ok(HullOracle {
            body: Body::new(x, tol)?,
            dim,
            tol: *tol,
        })
    }

    /// Largest distance from `p` to `B[X]`, `None` when `B[X]` is empty.
    pub fn depth(&self, p: &Point) -> Result<Option<f64>> {
        crate::geom::check_points(std::slice::from_ref(p), self.dim)?;
        Ok(self.body.optimize(Objective::MaxDistance(p)).map(|(v, _)| v))
    }

    pub fn contains(&self, p: &Point) -> Result<bool> {
        Ok(self.depth(p)?.is_none_or(|d| d <= 1.0 + self.tol.eps_geom))
    }
}

/// Membership in the spindle convex hull `conv_s X = B[B[X]]` (n <= 3).
/// When `B[X]` is empty the hull is the whole space.
pub fn spindle_hull_contains(x: &[Point], p: &Point, tol: &Tolerance) -> Result<bool> {
    Ok(match farthest_body_distance(x, p, tol)? {
        None => true,
        Some(d) => d <= 1.0 + tol.eps_geom,
    })
}

/// One boundary arc of a planar spindle convex hull, traversed
/// counterclockwise from `vertices[from]` to `vertices[to]` on the unit circle
/// around `center`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arc2 {
    pub from: usize,
    pub to: usize,
    pub center: Point,
}

/// Exact boundary of a planar spindle convex hull: vertices in
/// counterclockwise order joined by unit arcs shorter than a semicircle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcBoundary2 {
    pub vertices: Vec<Point>,
    /// Index of every vertex in the input set.
    pub vertex_indices: Vec<usize>,
    pub arcs: Vec<Arc2>,
}

impl ArcBoundary2 {
    /// Angle subtended by each arc at its center.
    pub fn arc_angles(&self) -> Vec<f64> {
        self.arcs
            .iter()
            .map(|a| {
                let u = &self.vertices[a.from] - &a.center;
                let v = &self.vertices[a.to] - &a.center;
                ccw_angle(&u, &v)
            })
            .collect()
    }

    /// Membership in the region bounded by the arcs.
    pub fn contains(&self, p: &Point, tol: &Tolerance) -> bool {
        if self.arcs.is_empty() {
            return (p - &self.vertices[0]).norm() <= tol.eps_geom;
        }
        self.arcs.iter().all(|a| (p - &a.center).norm() <= 1.0 + tol.eps_geom)
    }
}

/// Planar spindle convex hull.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpindleHull2 {
    Boundary(ArcBoundary2),
    /// Circumradius above one: the hull is the whole plane.
    WholePlane,
    /// Circumradius equal to one: the hull is the circumscribed unit disk.
    SingleBall(Ball),
}

impl SpindleHull2 {
    pub fn contains(&self, p: &Point, tol: &Tolerance) -> bool {
        match self {
            SpindleHull2::Boundary(b) => b.contains(p, tol),
            SpindleHull2::WholePlane => true,
            SpindleHull2::SingleBall(ball) => ball.contains(p, true, tol),
        }
    }
}

fn angle_of(v: &Point) -> f64 {
    v[1].atan2(v[0])
}

/// Counterclockwise angle in `[0, 2pi)` from `u` to `v`.
fn ccw_angle(u: &Point, v: &Point) -> f64 {
    (angle_of(v) - angle_of(u)).rem_euclid(TAU)
}

/// Exact boundary of the planar spindle convex hull by gift-wrapping on unit
/// arcs.
///
/// Starting from the point farthest from the circumcenter (a boundary point
/// supported by the internally tangent unit circle), the supporting unit
/// circle is rolled counterclockwise around the current vertex; the next
/// vertex is the point whose circle is reached after the smallest turn, ties
/// going to the farthest point so that points in the relative interior of an
/// arc are skipped.
pub fn spindle_hull_2d(x: &[Point], tol: &Tolerance) -> Result<SpindleHull2> {
    let first = x.first().ok_or(Error::EmptyInput("point set"))?;
    if first.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: first.len(),
        });
    }
    crate::geom::check_points(x, 2)?;
    let cb = circumball(x, tol)?;
    let crr = cb.ball.radius;
    if crr > 1.0 + tol.eps_geom {
        return Ok(SpindleHull2::WholePlane);
    }
    if (crr - 1.0).abs() <= tol.eps_geom {
        return Ok(SpindleHull2::SingleBall(Ball::unit(cb.ball.center)));
    }
    let mut distinct: Vec<usize> = Vec::new();
    for (i, p) in x.iter().enumerate() {
        if distinct.iter().all(|&j| (&x[j] - p).norm() > tol.eps_geom) {
            distinct.push(i);
        }
    }
    if distinct.len() == 1 {
        return Ok(SpindleHull2::Boundary(ArcBoundary2 {
            vertices: vec![x[distinct[0]].clone()],
            vertex_indices: vec![distinct[0]],
            arcs: Vec::new(),
        }));
    }
    let q = &cb.ball.center;
    let start = distinct
        .iter()
        .copied()
        .max_by(|&i, &j| {
            let di = (&x[i] - q).norm();
            let dj = (&x[j] - q).norm();
            di.partial_cmp(&dj).unwrap().then(j.cmp(&i))
        })
        .expect("nonempty");
    let mut theta = angle_of(&(q - &x[start]));
    let mut chain: Vec<(usize, Point)> = Vec::new();
    let mut current = start;
    let angle_tol = 1e3 * tol.eps_geom;
    for _ in 0..=distinct.len() {
        let p = &x[current];
        let mut best: Option<(f64, f64, usize, f64)> = None;
        for &j in &distinct {
            if j == current {
                continue;
            }
            let v = &x[j] - p;
            let d = v.norm();
            let theta_l = angle_of(&v) + (d / 2.0).min(1.0).acos();
            let mut inc = (theta_l - theta).rem_euclid(TAU);
            if inc > TAU - angle_tol {
                inc = 0.0;
            }
            let better = match best {
                None => true,
                Some((bi, bd, _, _)) => inc < bi - angle_tol || (inc <= bi + angle_tol && d > bd),
            };
            if better {
                best = Some((inc, d, j, theta_l));
            }
        }
        let (_, _, next, theta_l) = best.expect("at least two distinct points");
        let center = p + crate::geom::polar(1.0, theta_l);
        chain.push((current, center.clone()));
        theta = angle_of(&(&center - &x[next]));
        if let Some(pos) = chain.iter().position(|(v, _)| *v == next) {
            chain.drain(..pos);
            break;
        }
        current = next;
    }
    // Merge consecutive arcs on the same circle (a vertex inside an arc).
    let merge_tol = 1e3 * tol.eps_geom;
    let mut merged: Vec<(usize, Point)> = Vec::new();
    for (v, c) in chain {
        let same = merged
            .last()
            .is_some_and(|(_, prev): &(usize, Point)| (prev - &c).norm() <= merge_tol);
        if !same {
            merged.push((v, c));
        }
    }
    if merged.len() > 1 && (&merged[0].1 - &merged[merged.len() - 1].1).norm() <= merge_tol {
        merged.remove(0);
    }
    let k = merged.len();
    let vertices: Vec<Point> = merged.iter().map(|(v, _)| x[*v].clone()).collect();
    let vertex_indices: Vec<usize> = merged.iter().map(|(v, _)| *v).collect();
    let arcs = merged
        .iter()
        .enumerate()
        .map(|(i, (_, c))| Arc2 {
            from: i,
            to: (i + 1) % k,
            center: c.clone(),
        })
        .collect();
    Ok(SpindleHull2::Boundary(ArcBoundary2 {
        vertices,
        vertex_indices,
        arcs,
    }))
}

/// Spherically convex region on a sub-sphere, spanned by generator points
/// lying on the carrier.
#[derive(Debug, Clone)]
pub struct SphericalRegion {
    pub carrier: SubSphere,
    pub generators: Vec<Point>,
}

/// Point of `conv(dirs)` closest to the origin, found by the active-set
/// solver on the barycentric weights.
pub(crate) fn min_norm_point(dirs: &[DVector<f64>], tol: &Tolerance) -> Option<DVector<f64>> {
    let m = dirs.len();
    let g = DMatrix::from_columns(dirs);
    let h = g.transpose() * &g * 2.0;
    let mut a = DMatrix::zeros(m + 2, m);
    let mut b = DVector::zeros(m + 2);
    for i in 0..m {
        a[(i, i)] = -1.0;
        a[(m, i)] = 1.0;
        a[(m + 1, i)] = -1.0;
    }
    b[m] = 1.0;
    b[m + 1] = -1.0;
    let prog = QuadProgram {
        h,
        g: DVector::zeros(m),
        a,
        b,
    };
    match qp::solve_from(&prog, DVector::from_element(m, 1.0 / m as f64), tol.eps_opt) {
        QpOutcome::Optimal(s) => Some(g * s.z),
        _ => None,
    }
}

/// Membership of `y` (a point of the carrier) in the spherical convex hull
/// of the generators. The generators and `y` are centrally projected from the
/// carrier center onto the tangent hyperplane at a pole of an open hemisphere
/// containing the generators, where the question becomes ordinary convex-hull
/// membership.
pub fn spherical_hull_contains(region: &SphericalRegion, y: &Point, tol: &Tolerance) -> Result<bool> {
    let (center, radius, frame) = match &region.carrier {
        SubSphere::Sphere {
            center, radius, frame, ..
        } => (center, *radius, frame),
        _ => return Err(Error::InvalidInput("carrier must be a sphere".into())),
    };
    if region.generators.is_empty() {
        return Err(Error::EmptyInput("generators"));
    }
    let local = |p: &Point| -> DVector<f64> { frame.transpose() * (p - center) / radius };
    let dirs: Vec<DVector<f64>> = region.generators.iter().map(local).collect();
    let pole = min_norm_point(&dirs, tol).ok_or(Error::NoHemisphere)?;
    if pole.norm() <= tol.eps_geom {
        return Err(Error::NoHemisphere);
    }
    let pole = pole.normalize();
    if dirs.iter().any(|d| d.dot(&pole) <= tol.eps_geom) {
        return Err(Error::NoHemisphere);
    }
    let yl = local(y);
    let hy = yl.dot(&pole);
    if hy <= tol.eps_geom {
        return Ok(false);
    }
    let projected: Vec<Point> = dirs.iter().map(|d| d / d.dot(&pole)).collect();
    Ok(convex_hull_contains(&projected, &(yl / hy), 1e3 * tol.eps_geom).is_some())
}

/// Result of a Carathéodory–Steinitz reduction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    /// Indices into the input set.
    pub subset: Vec<usize>,
    /// True when `y` is an interior point of `conv_s X`.
    pub interior: bool,
}

/// Smallest (in cardinality, then lexicographically) subset `Q` with
/// `y in conv_s Q`. The search is exhaustive; the size bound `n` for boundary
/// points and `n+1` for interior points is guaranteed and checked.
pub fn caratheodory_steinitz_reduce(x: &[Point], y: &Point, tol: &Tolerance) -> Result<Reduction> {
    let n = check_hull_input(x)?;
    let depth = farthest_body_distance(x, y, tol)?;
    if depth.is_some_and(|d| d > 1.0 + tol.eps_geom) {
        return Err(Error::NotInHull);
    }
    let interior = depth.is_none_or(|d| d < 1.0 - tol.eps_geom);
    let bound = if interior { n + 1 } else { n };
    for size in 1..=bound.min(x.len()) {
        for subset in (0..x.len()).combinations(size) {
            let q: Vec<Point> = subset.iter().map(|&i| x[i].clone()).collect();
            if spindle_hull_contains(&q, y, tol)? {
                return Ok(Reduction { subset, interior });
            }
        }
    }
    Err(Error::TheoremViolation(format!(
        "no subset of size <= {bound} contains the point in its spindle hull"
    )))
}

/// A transversal `T` (one point per class) with `o in conv_s T`, returned as
/// the chosen index within each class. Transversals are searched in
/// lexicographic order.
pub fn colorful_transversal(classes: &[Vec<Point>], o: &Point, tol: &Tolerance) -> Result<Vec<usize>> {
    let n = o.len();
    if n > MAX_HULL_DIM {
        return Err(Error::Unsupported { dim: n });
    }
    if classes.len() != n + 1 {
        return Err(Error::InvalidInput(format!(
            "expected {} classes, got {}",
            n + 1,
            classes.len()
        )));
    }
    for (i, class) in classes.iter().enumerate() {
        if class.is_empty() || !spindle_hull_contains(class, o, tol)? {
            return Err(Error::Precondition(format!(
                "class {i} does not contain the point in its spindle hull"
            )));
        }
    }
    for choice in classes.iter().map(|c| 0..c.len()).multi_cartesian_product() {
        let t: Vec<Point> = choice.iter().enumerate().map(|(k, &i)| classes[k][i].clone()).collect();
        if spindle_hull_contains(&t, o, tol)? {
            return Ok(choice);
        }
    }
    Err(Error::TheoremViolation("no colorful transversal found".into()))
}

/// True iff no point of `a` lies in the spindle convex hull of the others.
pub fn spindle_position(a: &[Point], tol: &Tolerance) -> Result<bool> {
    check_hull_input(a)?;
    let crr = circumball(a, tol)?.ball.radius;
    if crr > 1.0 + tol.eps_geom {
        return Err(Error::OutOfScope { crr });
    }
    for i in 0..a.len() {
        let others: Vec<Point> = a.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
        if others.is_empty() {
            continue;
        }
        if spindle_hull_contains(&others, &a[i], tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest input accepted by [`es_search`].
pub const ES_SEARCH_CAP: usize = 20;

/// First `m`-subset (lexicographic) of a planar set in spindle convex
/// position, or `None`.
pub fn es_search(a: &[Point], m: usize, tol: &Tolerance) -> Result<Option<Vec<usize>>> {
    check_hull_input(a)?;
    if a.len() > ES_SEARCH_CAP {
        return Err(Error::SizeCapExceeded {
            size: a.len(),
            cap: ES_SEARCH_CAP,
        });
    }
    let crr = circumball(a, tol)?.ball.radius;
    if crr > 1.0 + tol.eps_geom {
        return Err(Error::OutOfScope { crr });
    }
    if m == 0 || m > a.len() {
        return Ok(None);
    }
    for subset in (0..a.len()).combinations(m) {
        let pts: Vec<Point> = subset.iter().map(|&i| a[i].clone()).collect();
        if spindle_position(&pts, tol)? {
            return Ok(Some(subset));
        }
    }
    Ok(None)
}

/// Points of an arc of the circle of radius `radius` around the origin, at
/// the given angles.
pub fn arc_points(radius: f64, angles: &[f64]) -> Vec<Point> {
    angles.iter().map(|&t| crate::geom::polar(radius, t)).collect()
}

/// Semicircle length, used by callers to bound arc angles.
pub const HALF_TURN: f64 = PI;
