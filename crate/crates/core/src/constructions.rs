//! Verified constructions around intersecting spheres and contractions:
//! Ţiţeica's four-circle theorem, a Helly-type theorem for sphere families
//! with its sharpness example, the family of `n + 2` unit spheres in `R^n`
//! (`n >= 4`) any `n + 1` of which meet while all of them do not, and
//! monotonicity experiments for functionals of `B[X]` under contractions of
//! the centers.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diskpoly::{build_disk_polygon, DegenerateDisks, DiskPolygonOutcome};
use crate::error::{Error, Result};
use crate::geom::{
    check_points, circumradius, intersect_spheres, null_space, polar, regular_simplex, Point, Sphere, SubSphere,
    Tolerance,
};

/// Ţiţeica configuration: the three second intersection points and their
/// circumcircle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiteicaReport {
    pub x: Point,
    pub y: Point,
    pub z: Point,
    pub center: Point,
    pub radius: f64,
    /// `|radius - 1|`, zero by the theorem.
    pub deviation: f64,
}

/// Second intersection of two unit circles through `p`: the reflection of
/// `p` in the line through their centers.
fn second_intersection(a: &Point, b: &Point, p: &Point, tol: &Tolerance) -> Result<Point> {
    let d = b - a;
    if d.norm() <= tol.eps_geom {
        return Err(Error::Degenerate("two circle centers coincide".into()));
    }
    let e = d.normalize();
    let w = p - a;
    let foot = a + &e * w.dot(&e);
    let q = &foot * 2.0 - p;
    if (&q - p).norm() <= tol.eps_geom.sqrt() {
        return Err(Error::Degenerate("two circles are tangent at the common point".into()));
    }
    Ok(q)
}

fn circumcircle_2d(x: &Point, y: &Point, z: &Point) -> Option<(Point, f64)> {
    let (ax, ay, bx, by, cx, cy) = (x[0], x[1], y[0], y[1], z[0], z[1]);
    let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    let scale = [x, y, z].iter().map(|p| p.norm()).fold(1.0, f64::max);
    if d.abs() <= 1e-14 * scale * scale {
        return None;
    }
    let a2 = ax * ax + ay * ay;
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
    let uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
    let center = DVector::from_vec(vec![ux, uy]);
    let r = (x - &center).norm();
    Some((center, r))
}

/// Checks Ţiţeica's theorem for three unit circles through `p`.
pub fn titeica_check(c1: &Point, c2: &Point, c3: &Point, p: &Point, tol: &Tolerance) -> Result<TiteicaReport> {
    let all = [c1.clone(), c2.clone(), c3.clone(), p.clone()];
    check_points(&all, 2)?;
    for c in [c1, c2, c3] {
        let off = ((c - p).norm() - 1.0).abs();
        if off > tol.eps_geom {
            return Err(Error::Precondition(format!("a circle misses the common point by {off:.3e}")));
        }
    }
    let x = second_intersection(c1, c2, p, tol)?;
    let y = second_intersection(c1, c3, p, tol)?;
    let z = second_intersection(c2, c3, p, tol)?;
    let (center, radius) =
        circumcircle_2d(&x, &y, &z).ok_or_else(|| Error::Degenerate("the three second intersections are collinear".into()))?;
    Ok(TiteicaReport {
        deviation: (radius - 1.0).abs(),
        x,
        y,
        z,
        center,
        radius,
    })
}

/// Summary of random Ţiţeica configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiteicaTrials {
    pub trials: usize,
    pub skipped_degenerate: usize,
    pub max_deviation: f64,
}

/// Runs `trials` random configurations (random common point, random angles
/// on the unit circle around it) with per-trial seeds derived from `seed`.
pub fn titeica_random_trials(trials: usize, seed: u64, tol: &Tolerance) -> TiteicaTrials {
    let outcomes: Vec<Option<f64>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let p = DVector::from_vec(vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]);
            let cs: Vec<Point> = (0..3).map(|_| &p + polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))).collect();
            titeica_check(&cs[0], &cs[1], &cs[2], &p, tol).ok().map(|r| r.deviation)
        })
        .collect();
    TiteicaTrials {
        trials,
        skipped_degenerate: outcomes.iter().filter(|o| o.is_none()).count(),
        max_deviation: outcomes.iter().flatten().copied().fold(0.0, f64::max),
    }
}

pub(crate) fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Intersection of the whole family when any `n - k` members meet in a
/// sphere of dimension at least `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HellyVerdict {
    pub intersection: SubSphere,
    pub subsets_checked: usize,
}

/// Checks the hypothesis on every `(n - k)`-subset and returns the full
/// intersection, which the theorem says is a sphere of dimension `>= k + 1`.
pub fn sphere_family_helly_check(family: &[Sphere], k: usize, tol: &Tolerance) -> Result<HellyVerdict> {
    let first = family.first().ok_or(Error::EmptyInput("sphere family"))?;
    let n = first.center.len();
    let centers: Vec<Point> = family.iter().map(|s| s.center.clone()).collect();
    check_points(&centers, n)?;
    if k >= n {
        return Err(Error::OutOfRange(format!("k = {k} must be below the dimension {n}")));
    }
    let size = n - k;
    if family.len() < size {
        return Err(Error::Precondition(format!("need at least {size} spheres, got {}", family.len())));
    }
    let mut checked = 0;
    for subset in (0..family.len()).combinations(size) {
        checked += 1;
        let sub: Vec<Sphere> = subset.iter().map(|&i| family[i].clone()).collect();
        let meets = intersect_spheres(&sub, tol)?.intrinsic_dim().is_some_and(|d| d > k);
        if !meets {
            return Err(Error::HypothesisNotMet { witness: subset });
        }
    }
    let intersection = intersect_spheres(family, tol)?;
    if !intersection.intrinsic_dim().is_some_and(|d| d > k) {
        return Err(Error::TheoremViolation(format!(
            "hypothesis holds but the full intersection is {:?}",
            intersection.kind()
        )));
    }
    Ok(HellyVerdict {
        intersection,
        subsets_checked: checked,
    })
}

/// Sharpness example: unit spheres around the vertices of a regular
/// `n`-simplex of circumradius one. Returns the family with, for each `k`,
/// the smallest intrinsic dimension over `(n - k)`-subsets (`None` stands
/// for a single point) and the kind of the full intersection.
#[derive(Debug, Clone, PartialEq)]
pub struct HellySharpness {
    pub family: Vec<Sphere>,
    pub subset_dims: Vec<Option<usize>>,
    pub full: SubSphere,
}

pub fn helly_sharpness(n: usize, tol: &Tolerance) -> Result<HellySharpness> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("dimension {n} must be at least 2")));
    }
    let family: Vec<Sphere> = regular_simplex(n, 1.0).into_iter().map(Sphere::unit).collect();
    let mut subset_dims = Vec::new();
    for k in 0..n {
        let mut lowest: Option<Option<usize>> = None;
        for subset in (0..family.len()).combinations(n - k) {
            let sub: Vec<Sphere> = subset.iter().map(|&i| family[i].clone()).collect();
            let dim = intersect_spheres(&sub, tol)?.intrinsic_dim();
            lowest = Some(match lowest {
                None => dim,
                Some(prev) => prev.min(dim),
            });
        }
        subset_dims.push(lowest.flatten());
    }
    let full = intersect_spheres(&family, tol)?;
    Ok(HellySharpness {
        family,
        subset_dims,
        full,
    })
}

/// `r(t)`: radius of the sphere tangent to all facet hyperplanes of the
/// simplex with apex on the unit sphere and base at height `t`.
pub fn maehara_radius(m: usize, t: f64) -> f64 {
    let m2 = (m * m) as f64;
    (1.0 + t).sqrt() / m2 * ((m2 + 1.0 - (m2 - 1.0) * t).sqrt() + (1.0 + t).sqrt())
}

/// `g_m(t) = d(t)² + 2 r(t) - 1` with `d = |r - t|`.
pub fn maehara_g(m: usize, t: f64) -> f64 {
    let r = maehara_radius(m, t);
    let d = (r - t).abs();
    d * d + 2.0 * r - 1.0
}

/// Which of `R² ∓ 2rR = d²` the construction satisfies (`R = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LemmaCase {
    /// `1 - 2r = d²`: the tangent-sphere center is inside the circumsphere.
    Inner,
    /// `1 + 2r = d²`: the center is outside.
    Outer,
}

/// Simplex and tangent sphere at the root of `g_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaeharaParameters {
    pub n: usize,
    pub m: usize,
    pub t_star: f64,
    pub g_at_root: f64,
    pub r: f64,
    pub d: f64,
    pub case: LemmaCase,
    /// Apex `b` on the axis at distance one from the origin.
    pub apex: Point,
    /// Vertices of the regular base simplex in the hyperplane at height `t`.
    pub base: Vec<Point>,
    /// Center of the tangent sphere, on the axis outside the simplex.
    pub center: Point,
    pub iterations: usize,
}

impl MaeharaParameters {
    /// All vertices of the simplex, apex first.
    pub fn simplex(&self) -> Vec<Point> {
        std::iter::once(self.apex.clone()).chain(self.base.iter().cloned()).collect()
    }
}

/// Bisection for the root of `g_m` on `(0, 1)`, `m >= 4`, where
/// `g_m(0) < 0 < g_m(1)`.
fn bisect_g(m: usize) -> Result<(f64, usize)> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if !(maehara_g(m, lo) < 0.0 && maehara_g(m, hi) > 0.0) {
        return Err(Error::TheoremViolation(format!("g_{m} has no sign change on [0, 1]")));
    }
    let mut iterations = 0;
    let mut t = 0.5;
    while iterations < 200 {
        iterations += 1;
        t = 0.5 * (lo + hi);
        let g = maehara_g(m, t);
        if g.abs() <= 1e-13 || hi - lo <= f64::EPSILON {
            break;
        }
        if g < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
    }
    Ok((t, iterations))
}

/// Root of `g_m` on `(0, 1)` and the matching simplex. For `m = 3` the
/// root is `t = 1/2`, a double root; for `m >= 4` it is found by bisection.
pub fn maehara_parameters(n: usize) -> Result<MaeharaParameters> {
    if n < 4 {
        return Err(Error::OutOfRange(format!(
            "the construction needs dimension at least 4, got {n}"
        )));
    }
    let m = n - 1;
    let (t, iterations) = if m == 3 {
        // g_3 touches zero at t = 1/2 without changing sign.
        (0.5, 0)
    } else {
        bisect_g(m)?
    };
    let r = maehara_radius(m, t);
    let d = (r - t).abs();
    let axis = |h: f64| {
        let mut p = DVector::zeros(n);
        p[n - 1] = h;
        p
    };
    let base = regular_simplex(m, (1.0 - t * t).sqrt())
        .into_iter()
        .map(|q| {
            let mut p = DVector::zeros(n);
            p.rows_mut(0, m).copy_from(&q);
            p[n - 1] = t;
            p
        })
        .collect();
    let inner = (1.0 - 2.0 * r - d * d).abs();
    let outer = (1.0 + 2.0 * r - d * d).abs();
    Ok(MaeharaParameters {
        n,
        m,
        t_star: t,
        g_at_root: maehara_g(m, t),
        r,
        d,
        case: if inner <= outer { LemmaCase::Inner } else { LemmaCase::Outer },
        apex: axis(1.0),
        base,
        center: axis(t - r),
        iterations,
    })
}

/// Inversion in the sphere of radius `radius` around `center`.
pub fn invert(x: &Point, center: &Point, radius: f64) -> Point {
    let d = x - center;
    let n2 = d.norm_squared();
    center + d * (radius * radius / n2)
}

/// Facet hyperplane `{x : <nu, x> = offset}` through `pts` (`n` points in
/// `R^n`), with a unit normal.
fn hyperplane(pts: &[Point]) -> Result<(Point, f64)> {
    let n = pts[0].len();
    let rows = DMatrix::from_fn(pts.len() - 1, n, |i, j| pts[i + 1][j] - pts[0][j]);
    let (basis, _) = null_space(&rows, 1e-12);
    if basis.ncols() != 1 {
        return Err(Error::ConstructionError("facet vertices are affinely dependent".into()));
    }
    let nu: Point = basis.column(0).into_owned();
    let offset = nu.dot(&pts[0]);
    Ok((nu, offset))
}

/// Verification data for [`maehara_family`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaeharaReport {
    /// For each left-out sphere `i`, the largest distance defect of the
    /// known common point of the other `n + 1` spheres.
    pub leave_one_out_residuals: Vec<f64>,
    /// For each `i`, how far the common point of the others misses sphere
    /// `i`; the smallest value bounds the full family away from a common
    /// point.
    pub left_out_gaps: Vec<f64>,
    pub min_gap: f64,
    /// Facet tangency defects of the inverting sphere before inversion.
    pub tangency_defect: f64,
}

/// Unit spheres of the counterexample, with the witnesses and report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaeharaFamily {
    pub params: MaeharaParameters,
    pub spheres: Vec<Sphere>,
    /// `witnesses[i]` lies on every sphere except `spheres[i]`.
    pub witnesses: Vec<Point>,
    pub report: MaeharaReport,
}

const LEAVE_ONE_OUT_BOUND: f64 = 1e-8;
const FULL_GAP_BOUND: f64 = 1e-6;

/// Builds `n + 2` unit spheres in `R^n`, any `n + 1` of which have a common
/// point while all of them have none, and verifies both claims.
///
/// The inversion in the tangent sphere `S(c, r)` maps the circumsphere and
/// the `n + 1` facet hyperplanes of the simplex to spheres of radius
/// `r / 2`; scaling by `2 / r` makes them unit spheres.
pub fn maehara_family(n: usize, tol: &Tolerance) -> Result<MaeharaFamily> {
    let params = maehara_parameters(n)?;
    let c = &params.center;
    let r = params.r;
    let verts = params.simplex();
    let scale = 2.0 / r;
    let mut spheres = Vec::new();
    let mut witnesses = Vec::new();
    // Image of the circumsphere S(o, 1): its diameter is the image of the
    // two points of S(o, 1) on the line through c and o.
    let dir = if c.norm() > 1e-12 {
        -c / c.norm()
    } else {
        let mut e = DVector::zeros(n);
        e[n - 1] = 1.0;
        e
    };
    let (q1, q2) = (invert(&dir, c, r), invert(&(-&dir), c, r));
    let mid = (&q1 + &q2) / 2.0;
    let radius = (&q1 - &q2).norm() / 2.0;
    if (radius - r / 2.0).abs() > 1e-9 {
        return Err(Error::ConstructionError(format!(
            "image of the circumsphere has radius {radius}, expected {}",
            r / 2.0
        )));
    }
    spheres.push(Sphere::unit(mid * scale));
    witnesses.push(c * scale);
    let mut tangency_defect: f64 = 0.0;
    for i in 0..verts.len() {
        let facet: Vec<Point> = (0..verts.len()).filter(|&j| j != i).map(|j| verts[j].clone()).collect();
        let (nu, offset) = hyperplane(&facet)?;
        let signed = nu.dot(c) - offset;
        tangency_defect = tangency_defect.max((signed.abs() - r).abs());
        let foot = c - &nu * signed;
        spheres.push(Sphere::unit((c + foot) / 2.0 * scale));
        witnesses.push(invert(&verts[i], c, r) * scale);
    }
    if tangency_defect > 1e-9 {
        return Err(Error::ConstructionError(format!(
            "inverting sphere misses a facet hyperplane by {tangency_defect:.3e}"
        )));
    }
    let mut residuals = Vec::new();
    let mut gaps = Vec::new();
    for (i, w) in witnesses.iter().enumerate() {
        let mut worst: f64 = 0.0;
        for (j, s) in spheres.iter().enumerate() {
            if j != i {
                worst = worst.max(s.residual(w).abs());
            }
        }
        residuals.push(worst);
        gaps.push(spheres[i].residual(w).abs());
        let others: Vec<Sphere> = (0..spheres.len()).filter(|&j| j != i).map(|j| spheres[j].clone()).collect();
        if matches!(intersect_spheres(&others, tol)?, SubSphere::Empty) {
            return Err(Error::ConstructionError(format!(
                "spheres without {i} have no common point (residual {worst:.3e})"
            )));
        }
    }
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    if max_residual >= LEAVE_ONE_OUT_BOUND || min_gap <= FULL_GAP_BOUND {
        return Err(Error::ConstructionError(format!(
            "verification failed: residual {max_residual:.3e}, gap {min_gap:.3e}"
        )));
    }
    if !matches!(intersect_spheres(&spheres, tol)?, SubSphere::Empty) {
        return Err(Error::ConstructionError("the whole family has a common point".into()));
    }
    Ok(MaeharaFamily {
        params,
        spheres,
        witnesses,
        report: MaeharaReport {
            leave_one_out_residuals: residuals,
            left_out_gaps: gaps,
            min_gap,
            tangency_defect,
        },
    })
}

/// Centers `x` and their images `y`, matched by index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionPair {
    pub x: Vec<Point>,
    pub y: Vec<Point>,
}

impl ContractionPair {
    /// Checks `|y_i - y_j| <= |x_i - x_j| + eps_geom` for all pairs.
    pub fn verify(&self, tol: &Tolerance) -> Result<()> {
        if self.x.len() != self.y.len() {
            return Err(Error::InvalidInput(format!(
                "{} centers but {} images",
                self.x.len(),
                self.y.len()
            )));
        }
        if self.x.is_empty() {
            return Err(Error::EmptyInput("center list"));
        }
        for (i, j) in (0..self.x.len()).tuple_combinations() {
            let before = (&self.x[i] - &self.x[j]).norm();
            let after = (&self.y[i] - &self.y[j]).norm();
            if after > before + tol.eps_geom {
                return Err(Error::InvalidPair { i, j, before, after });
            }
        }
        Ok(())
    }
}

/// Inradius, circumradius, diameter and minimal width of a planar `B[X]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyFunctionals {
    pub inradius: f64,
    pub circumradius: f64,
    pub diameter: f64,
    pub width: f64,
}

/// Functionals of `B[X]` in the plane. The inradius is `1 - crr(X)`; the
/// others come from the disk-polygon boundary.
pub fn body_functionals(centers: &[Point], tol: &Tolerance) -> Result<BodyFunctionals> {
    let crr = circumradius(centers, tol)?;
    match build_disk_polygon(centers, tol)? {
        DiskPolygonOutcome::Polygon(poly) => {
            let (width, diameter) = poly.width_and_diameter();
            Ok(BodyFunctionals {
                inradius: 1.0 - crr,
                circumradius: poly.circumradius(tol)?.0,
                diameter,
                width,
            })
        }
        DiskPolygonOutcome::Degenerate(DegenerateDisks::Point(_)) => Ok(BodyFunctionals {
            inradius: 0.0,
            circumradius: 0.0,
            diameter: 0.0,
            width: 0.0,
        }),
        DiskPolygonOutcome::Degenerate(DegenerateDisks::Empty) => Err(Error::OutOfScope { crr }),
        DiskPolygonOutcome::Degenerate(DegenerateDisks::FullDiskFamily) => Err(Error::EmptyInput("center list")),
    }
}

/// Functionals before and after a contraction and their signed changes
/// (after minus before).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpReport {
    pub before: BodyFunctionals,
    pub after: BodyFunctionals,
    pub inradius_ok: bool,
    pub inradius_delta: f64,
    pub circumradius_delta: f64,
    pub diameter_delta: f64,
    pub width_delta: f64,
}

/// Compares `B[X]` with `B[Y]` for a planar contraction `Y` of `X`. The
/// inradius cannot decrease; a decrease is reported as a theorem violation.
pub fn kp_experiments(pair: &ContractionPair, tol: &Tolerance) -> Result<KpReport> {
    check_points(&pair.x, 2)?;
    check_points(&pair.y, 2)?;
    pair.verify(tol)?;
    let crr = circumradius(&pair.x, tol)?;
    if crr > 1.0 + tol.eps_geom {
        return Err(Error::OutOfScope { crr });
    }
    let before = body_functionals(&pair.x, tol)?;
    let after = body_functionals(&pair.y, tol)?;
    let inradius_delta = after.inradius - before.inradius;
    let inradius_ok = inradius_delta >= -tol.eps_geom;
    if !inradius_ok {
        return Err(Error::TheoremViolation(format!(
            "inradius decreased by {:.3e} under a contraction",
            -inradius_delta
        )));
    }
    Ok(KpReport {
        before,
        after,
        inradius_ok,
        inradius_delta,
        circumradius_delta: after.circumradius - before.circumradius,
        diameter_delta: after.diameter - before.diameter,
        width_delta: after.width - before.width,
    })
}

/// The configuration where diameter and circumradius both shrink.
pub fn kp_diameter_example() -> ContractionPair {
    use std::f64::consts::PI;
    let o = DVector::zeros(2);
    ContractionPair {
        x: vec![o.clone(), polar(0.5, PI / 3.0), polar(0.5, -PI / 3.0)],
        y: vec![o, polar(0.5, PI / 4.0), polar(0.5, -PI / 4.0)],
    }
}

/// The configuration where the minimal width shrinks (two centers merge).
pub fn kp_width_example() -> ContractionPair {
    use std::f64::consts::PI;
    let o = DVector::zeros(2);
    ContractionPair {
        x: vec![o.clone(), polar(0.8, PI / 10.0), polar(0.8, -PI / 10.0)],
        y: vec![o, polar(0.8, 0.0), polar(0.8, 0.0)],
    }
}

/// Summary of random contraction trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpTrials {
    pub trials: usize,
    pub inradius_failures: usize,
    pub min_inradius_delta: f64,
    pub diameter_decreases: usize,
    pub circumradius_decreases: usize,
    pub width_decreases: usize,
}

/// Random pair: 3 to 8 centers in the unit disk and their image under a
/// random linear map of spectral norm at most one plus a translation.
pub fn random_contraction(rng: &mut impl Rng) -> ContractionPair {
    let k = rng.random_range(3..=8);
    let x: Vec<Point> = (0..k)
        .map(|_| {
            let r = rng.random::<f64>().sqrt();
            polar(r, rng.random_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    let a = DMatrix::from_fn(2, 2, |_, _| rng.sample::<f64, _>(StandardNormal));
    let norm = a.clone().svd(false, false).singular_values.max();
    let a = a * (rng.random_range(0.2..1.0) / norm);
    let shift = polar(rng.random_range(0.0..1.0), rng.random_range(0.0..std::f64::consts::TAU));
    let y = x.iter().map(|p| &a * p + &shift).collect();
    ContractionPair { x, y }
}

/// Runs `trials` random contraction pairs with per-trial seeds.
pub fn kp_random_trials(trials: usize, seed: u64, tol: &Tolerance) -> Result<KpTrials> {
    let reports: Vec<Result<KpReport>> = (0..trials)
        .into_par_iter()
        .map(|i| kp_experiments(&random_contraction(&mut trial_rng(seed, i)), tol))
        .collect();
    let mut out = KpTrials {
        trials,
        inradius_failures: 0,
        min_inradius_delta: f64::INFINITY,
        diameter_decreases: 0,
        circumradius_decreases: 0,
        width_decreases: 0,
    };
    for r in reports {
        match r {
            Ok(rep) => {
                out.min_inradius_delta = out.min_inradius_delta.min(rep.inradius_delta);
                out.diameter_decreases += usize::from(rep.diameter_delta < -tol.eps_geom);
                out.circumradius_decreases += usize::from(rep.circumradius_delta < -tol.eps_geom);
                out.width_decreases += usize::from(rep.width_delta < -tol.eps_geom);
            }
            Err(Error::TheoremViolation(_)) => out.inradius_failures += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::point;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn titeica_symmetric_configuration() {
        let p = point(&[0.3, -0.2]);
        let cs: Vec<Point> = (0..3).map(|k| &p + polar(1.0, 2.0 * PI * k as f64 / 3.0)).collect();
        let rep = titeica_check(&cs[0], &cs[1], &cs[2], &p, &tol()).unwrap();
        assert!(rep.deviation < 1e-12);
        let sides = [(&rep.x - &rep.y).norm(), (&rep.y - &rep.z).norm(), (&rep.z - &rep.x).norm()];
        assert_abs_diff_eq!(sides[0], sides[1], epsilon = 1e-12);
        assert_abs_diff_eq!(sides[1], sides[2], epsilon = 1e-12);
    }

    #[test]
    fn titeica_degenerate_inputs() {
        let p = point(&[0.0, 0.0]);
        let a = polar(1.0, 0.3);
        let b = polar(1.0, 2.0);
        assert!(matches!(titeica_check(&a, &a, &b, &p, &tol()), Err(Error::Degenerate(_))));
        let tangent = polar(1.0, 0.3 + PI);
        assert!(matches!(titeica_check(&a, &tangent, &b, &p, &tol()), Err(Error::Degenerate(_))));
        assert!(matches!(
            titeica_check(&a, &b, &point(&[0.5, 0.0]), &p, &tol()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn titeica_thousand_random_trials() {
        let t = titeica_random_trials(1000, 7, &tol());
        assert!(t.max_deviation < 1e-9, "{t:?}");
        assert!(t.skipped_degenerate < 10);
    }

    #[test]
    fn helly_common_circle() {
        // Spheres of different radii centered on the z-axis, all through
        // the circle x² + y² = 1, z = 0.
        let family: Vec<Sphere> = [0.0, 0.5, -0.7, 1.2]
            .iter()
            .map(|&h: &f64| Sphere::new(point(&[0.0, 0.0, h]), (1.0 + h * h).sqrt()).unwrap())
            .collect();
        let v = sphere_family_helly_check(&family, 0, &tol()).unwrap();
        assert_eq!(v.subsets_checked, 4);
        assert_eq!(v.intersection.intrinsic_dim(), Some(1));
        assert_abs_diff_eq!(v.intersection.radius().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn helly_hypothesis_fails_for_lens() {
        let family = vec![Sphere::unit(point(&[0.0, 0.0, 0.0])), Sphere::unit(point(&[1.0, 0.0, 0.0]))];
        assert_eq!(
            sphere_family_helly_check(&family, 1, &tol()).unwrap_err(),
            Error::HypothesisNotMet { witness: vec![0, 1] }
        );
    }

    #[test]
    fn helly_sharpness_on_regular_simplex() {
        for n in 2..=4 {
            let s = helly_sharpness(n, &tol()).unwrap();
            for k in 0..n {
                // n - k spheres through the center meet in a k-sphere.
                assert_eq!(s.subset_dims[k], Some(k), "n={n} k={k}");
            }
            match s.full {
                SubSphere::Point(p) => assert!(p.norm() < 1e-12),
                other => panic!("expected a point, got {other:?}"),
            }
        }
    }

    #[test]
    fn g3_vanishes_at_one_half() {
        assert_abs_diff_eq!(maehara_g(3, 0.5), 0.0, epsilon = 1e-15);
        let p = maehara_parameters(4).unwrap();
        assert_eq!(p.t_star, 0.5);
        assert_abs_diff_eq!(p.r, 0.5, epsilon = 1e-15);
        assert_eq!(p.case, LemmaCase::Inner);
    }

    #[test]
    fn endpoint_signs_and_roots() {
        for m in 4..=8 {
            assert!(maehara_g(m, 0.0) < 0.0 && maehara_g(m, 1.0) > 0.0, "m={m}");
        }
        // For m = 3 the root at 1/2 is a minimum of g_3.
        assert!(maehara_g(3, 0.0) > 0.0 && maehara_g(3, 1.0) > 0.0);
        assert!((1..100).all(|k| maehara_g(3, k as f64 / 100.0) >= -1e-15));
        for n in 5..=6 {
            let p = maehara_parameters(n).unwrap();
            assert!(p.t_star > 0.0 && p.t_star < 1.0);
            assert!(p.g_at_root.abs() <= 1e-13);
            assert_abs_diff_eq!(1.0 - 2.0 * p.r, p.d * p.d, epsilon = 1e-12);
        }
        assert!(matches!(maehara_parameters(3), Err(Error::OutOfRange(_))));
    }

    /// Tangent-sphere radius recomputed from the simplex: the distance from
    /// the axis point below the base to every facet hyperplane, found by
    /// solving for the height where it equals the distance to the base.
    fn geometric_radius(p: &MaeharaParameters) -> f64 {
        let verts = p.simplex();
        let n = p.n;
        let side: Vec<Point> = verts.iter().enumerate().filter(|(j, _)| *j != 1).map(|(_, v)| v.clone()).collect();
        let rows = DMatrix::from_fn(n - 1, n, |i, j| side[i + 1][j] - side[0][j]);
        let nu: Point = null_space(&rows, 1e-12).0.column(0).into_owned();
        let off = nu.dot(&side[0]);
        // Point h e_n with |<nu, h e_n> - off| = t - h (below the base).
        let nz = nu[n - 1];
        let cands = [(p.t_star - off) / (1.0 - nz), (p.t_star + off) / (1.0 + nz)];
        cands
            .iter()
            .filter(|&&h| h < p.t_star)
            .map(|&h| p.t_star - h)
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn formula_radius_matches_geometry() {
        for n in 4..=6 {
            let p = maehara_parameters(n).unwrap();
            assert_abs_diff_eq!(geometric_radius(&p), p.r, epsilon = 1e-10);
            let g = p.d * p.d + 2.0 * geometric_radius(&p) - 1.0;
            assert!(g.abs() < 1e-10);
        }
    }

    #[test]
    fn maehara_families_verify() {
        for n in 4..=6 {
            let fam = maehara_family(n, &tol()).unwrap();
            assert_eq!(fam.spheres.len(), n + 2);
            assert!(fam.report.leave_one_out_residuals.iter().all(|&r| r < 1e-8));
            assert!(fam.report.min_gap > 1e-6);
            for s in &fam.spheres {
                assert_eq!(s.radius, 1.0);
            }
        }
        assert!(matches!(maehara_family(3, &tol()), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn inversion_is_an_involution() {
        let c = point(&[0.1, -0.3, 0.2, 0.4]);
        for x in [point(&[1.0, 2.0, 3.0, 4.0]), point(&[-0.5, 0.2, 0.0, 0.1])] {
            let back = invert(&invert(&x, &c, 0.7), &c, 0.7);
            assert!((back - &x).norm() < 1e-12);
        }
    }

    #[test]
    fn diameter_and_circumradius_shrink() {
        let rep = kp_experiments(&kp_diameter_example(), &tol()).unwrap();
        assert!(rep.inradius_ok);
        assert!(rep.diameter_delta < -1e-6, "{rep:?}");
        assert!(rep.circumradius_delta < -1e-6, "{rep:?}");
    }

    #[test]
    fn merging_centers_keeps_the_width() {
        // Both bodies have minimal width 2 - 0.8: the lens exactly, and
        // B[X] in the direction of either outer center.
        let rep = kp_experiments(&kp_width_example(), &tol()).unwrap();
        assert!(rep.inradius_ok);
        assert_abs_diff_eq!(rep.before.width, 1.2, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.after.width, 1.2, epsilon = 1e-12);
        assert!(rep.width_delta.abs() < 1e-12);
    }

    #[test]
    fn identity_contraction_changes_nothing() {
        let x = kp_diameter_example().x;
        let rep = kp_experiments(&ContractionPair { x: x.clone(), y: x }, &tol()).unwrap();
        for d in [rep.inradius_delta, rep.circumradius_delta, rep.diameter_delta, rep.width_delta] {
            assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn expansion_is_rejected() {
        let pair = ContractionPair {
            x: vec![point(&[0.0, 0.0]), point(&[0.5, 0.0])],
            y: vec![point(&[0.0, 0.0]), point(&[0.6, 0.0])],
        };
        assert!(matches!(kp_experiments(&pair, &tol()), Err(Error::InvalidPair { i: 0, j: 1, .. })));
    }

    #[test]
    fn lens_functionals_closed_form() {
        // Two disks at distance d: width 2 - d, diameter (= circumdiameter)
        // is the chord 2 sqrt(1 - d²/4).
        let d: f64 = 0.6;
        let f = body_functionals(&[point(&[0.0, 0.0]), point(&[d, 0.0])], &tol()).unwrap();
        assert_abs_diff_eq!(f.width, 2.0 - d, epsilon = 1e-12);
        assert_abs_diff_eq!(f.diameter, 2.0 * (1.0 - d * d / 4.0).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(f.circumradius, (1.0 - d * d / 4.0).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(f.inradius, 1.0 - d / 2.0, epsilon = 1e-12);
    }

    /// Independent inradius: the largest value of min_i (1 - |z - c_i|)
    /// over candidate centers z, which are the midpoints of all pairs and
    /// circumcenters of all triples (the optimum is one of them).
    fn inradius_oracle(cs: &[Point]) -> f64 {
        let f = |z: &Point| cs.iter().map(|c| 1.0 - (z - c).norm()).fold(f64::INFINITY, f64::min);
        let mut best = f(&cs[0]);
        for (i, j) in (0..cs.len()).tuple_combinations() {
            best = best.max(f(&((&cs[i] + &cs[j]) / 2.0)));
        }
        for (i, j, k) in (0..cs.len()).tuple_combinations() {
            if let Some((z, _)) = circumcircle_2d(&cs[i], &cs[j], &cs[k]) {
                best = best.max(f(&z));
            }
        }
        best
    }

    /// Sampled width and diameter over a fine angular grid.
    fn sampled_width_diameter(cs: &[Point]) -> (f64, f64) {
        let DiskPolygonOutcome::Polygon(poly) = build_disk_polygon(cs, &tol()).unwrap() else {
            panic!("expected a polygon");
        };
        let ws: Vec<f64> = (0..20_000).map(|k| poly.width_at(PI * k as f64 / 20_000.0)).collect();
        (ws.iter().copied().fold(f64::INFINITY, f64::min), ws.iter().copied().fold(0.0, f64::max))
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 1000, rng_seed: proptest::test_runner::RngSeed::Fixed(40), ..ProptestConfig::default() })]

        #[test]
        fn inradius_never_decreases(seed in any::<u64>()) {
            let pair = random_contraction(&mut ChaCha8Rng::seed_from_u64(seed));
            let rep = kp_experiments(&pair, &tol()).unwrap();
            prop_assert!(rep.inradius_ok);
            prop_assert!((rep.before.inradius - inradius_oracle(&pair.x)).abs() < 1e-8);
            prop_assert!((rep.after.inradius - inradius_oracle(&pair.y)).abs() < 1e-8);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 64, rng_seed: proptest::test_runner::RngSeed::Fixed(41), ..ProptestConfig::default() })]

        #[test]
        fn functionals_match_independent_oracles(seed in any::<u64>()) {
            let pair = random_contraction(&mut ChaCha8Rng::seed_from_u64(seed));
            let f = body_functionals(&pair.x, &tol()).unwrap();
            prop_assert!((f.inradius - inradius_oracle(&pair.x)).abs() < 1e-9);
            let (w, d) = sampled_width_diameter(&pair.x);
            prop_assert!(f.width <= w + 1e-12 && f.width > w - 1e-6);
            prop_assert!(f.diameter >= d - 1e-12 && f.diameter < d + 1e-6);
            prop_assert!(f.circumradius >= f.diameter / 2.0 - 1e-12);
            prop_assert!(f.circumradius <= f.diameter / 3f64.sqrt() + 1e-9);
        }
    }

    #[test]
    fn random_trial_summary_is_reproducible() {
        let a = kp_random_trials(200, 3, &tol()).unwrap();
        let b = kp_random_trials(200, 3, &tol()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.inradius_failures, 0);
        assert!(a.min_inradius_delta >= -1e-9);
    }
}
