//! Separation of point sets by spheres: supporting unit balls, unit-sphere
//! separation of spindle convex hulls, the smallest separating sphere as a
//! lifted convex program, Kirchberger-type verdicts and the construction
//! showing that unit spheres admit no Kirchberger theorem.
//!
//! A sphere `S(c, r)` with `A` inside is described by `(c, w)` with
//! `w = |c|^2 - r^2`; the conditions `|a - c| <= r` and `|b - c| >= r` become
//! the linear inequalities `|a|^2 - 2<a,c> + w <= 0` and
//! `|b|^2 - 2<b,c> + w >= 0`, and `r^2 = |c|^2 - w` is convex in `(c, w)`.

use std::f64::consts::{PI, TAU};

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{check_points, circumball, convex_hull_contains, polar, Ball, Point, Tolerance};
use crate::hull::{min_norm_point, spindle_hull_contains, Body, Objective, MAX_HULL_DIM};
use crate::qp::{self, QpOutcome, QuadProgram};

/// Which of the two input sets lies inside the ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    First,
    Second,
}

/// A sphere separating two sets, given by its closed ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationResult {
    pub ball: Ball,
    pub inner_side: Side,
    /// Clearance of at least `eps_geom` on both sides.
    pub strict: bool,
}

/// Unit ball supporting the spindle convex hull of `points` at the boundary
/// point `z` with outward normal `normal`: `B[z - normal]` after normalizing.
pub fn support_unit_ball(points: &[Point], z: &Point, normal: &Point, tol: &Tolerance) -> Result<Ball> {
    let first = points.first().ok_or(Error::EmptyInput("point set"))?;
    let n = first.len();
    check_points(points, n)?;
    check_points(&[z.clone(), normal.clone()], n)?;
    let len = normal.norm();
    if len <= tol.eps_geom {
        return Err(Error::InvalidInput("normal must be nonzero".into()));
    }
    let ball = Ball::unit(z - normal / len);
    let slack = Tolerance {
        eps_geom: 10.0 * tol.eps_geom,
        ..*tol
    };
    if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| !ball.contains(p, true, &slack)) {
        return Err(Error::NotSupporting(format!(
            "point {i} at distance {} from the center",
            (p - &ball.center).norm()
        )));
    }
    if n <= MAX_HULL_DIM && !spindle_hull_contains(points, z, &slack)? {
        return Err(Error::NotSupporting("contact point is outside the hull".into()));
    }
    Ok(ball)
}

/// Support data of a spindle convex hull in a unit direction.
struct HullSupport {
    body: Body,
}

impl HullSupport {
    /// `h(u) = 1 + min_{c in B[X]} <c, u>` together with the minimizer.
    fn eval(&self, u: &Point) -> (f64, Point) {
        let (v, c) = self.body.optimize(Objective::MinLinear(u)).expect("nonempty body");
        (1.0 + v, c)
    }
}

fn unit_from_angles(n: usize, params: &[f64]) -> Point {
    if n == 2 {
        polar(1.0, params[0])
    } else {
        let (t, p) = (params[0], params[1]);
        DVector::from_vec(vec![p.sin() * t.cos(), p.sin() * t.sin(), p.cos()])
    }
}

/// Maximizes `f` over unit directions: a dense scan followed by local
/// refinement (golden section in the plane, a shrinking pattern search on
/// the sphere).
fn maximize_on_sphere(n: usize, f: impl Fn(&Point) -> f64) -> Point {
    if n == 1 {
        let p = DVector::from_vec(vec![1.0]);
        let m = DVector::from_vec(vec![-1.0]);
        return if f(&p) >= f(&m) { p } else { m };
    }
    if n == 2 {
        let samples = 720;
        let step = TAU / samples as f64;
        let best = (0..samples)
            .map(|k| k as f64 * step)
            .max_by(|a, b| f(&polar(1.0, *a)).partial_cmp(&f(&polar(1.0, *b))).unwrap())
            .unwrap();
        let g = |t: f64| f(&polar(1.0, t));
        let (mut lo, mut hi) = (best - step, best + step);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let (mut f1, mut f2) = (g(x1), g(x2));
        for _ in 0..80 {
            if f1 >= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = g(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = g(x2);
            }
        }
        let t = if f1 >= f2 { x1 } else { x2 };
        return if g(t) >= g(best) { polar(1.0, t) } else { polar(1.0, best) };
    }
    let samples = 1500;
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut best = (0..samples)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / samples as f64;
            [(k as f64 * golden).rem_euclid(TAU), z.acos()]
        })
        .max_by(|a, b| {
            f(&unit_from_angles(3, a))
                .partial_cmp(&f(&unit_from_angles(3, b)))
                .unwrap()
        })
        .unwrap();
    let mut value = f(&unit_from_angles(3, &best));
    let mut step = 0.1;
    while step > 1e-11 {
        let mut improved = false;
        for (dt, dp) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
            let cand = [best[0] + dt * step, best[1] + dp * step];
            let v = f(&unit_from_angles(3, &cand));
            if v > value {
                value = v;
                best = cand;
                improved = true;
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    unit_from_angles(3, &best)
}

/// Separates `conv_s X` from `conv_s Y` by a unit sphere with `X` inside.
///
/// The separating hyperplane direction maximizes the gap
/// `min_Y <y,u> - h_X(u)` between the support functions; the unit ball
/// `B[c]` with `c` the minimizer of `<c,u>` over `B[X]` contains `X` and
/// touches the hyperplane. When the gap is positive and the hull of `X` is
/// not a unit ball, the center is translated towards the contact points by
/// half the gap (halved further until the clearance verifies), which gives a
/// strict separation.
pub fn separate_by_unit_sphere(x: &[Point], y: &[Point], tol: &Tolerance) -> Result<SeparationResult> {
    let first = x.first().ok_or(Error::EmptyInput("first set"))?;
    let n = first.len();
    if y.is_empty() {
        return Err(Error::EmptyInput("second set"));
    }
    check_points(x, n)?;
    check_points(y, n)?;
    if n > MAX_HULL_DIM {
        return Err(Error::Unsupported { dim: n });
    }
    let bx = Body::new(x, tol)?;
    let by = Body::new(y, tol)?;
    if bx.is_empty() || by.is_empty() {
        return Err(Error::NotSeparable("a spindle convex hull is the whole space".into()));
    }
    let sx = HullSupport { body: bx };
    let sy = HullSupport { body: by };
    let gap = |u: &Point| -> f64 { -sy.eval(&(-u)).0 - sx.eval(u).0 };
    let u = maximize_on_sphere(n, gap);
    let best_gap = gap(&u);
    if best_gap < -10.0 * tol.eps_geom {
        return Err(Error::NotSeparable(format!("hulls overlap by {}", -best_gap)));
    }
    let c = sx.eval(&u).1;
    let slack = Tolerance {
        eps_geom: 10.0 * tol.eps_geom,
        ..*tol
    };
    let outside = |c: &Point, margin: f64| y.iter().all(|p| (p - c).norm() >= 1.0 + margin);
    let inside = |c: &Point, margin: f64| x.iter().all(|p| (p - c).norm() <= 1.0 - margin);
    let crr = circumball(x, tol)?.ball.radius;
    if best_gap > 2.0 * tol.eps_geom && crr < 1.0 - tol.eps_geom {
        let contacts: Vec<DVector<f64>> = x
            .iter()
            .map(|p| p - &c)
            .filter(|v| v.norm() >= 1.0 - 1e-7)
            .collect();
        if let Some(d) = (!contacts.is_empty()).then(|| min_norm_point(&contacts, tol)).flatten() {
            if d.norm() > tol.eps_geom {
                let dir = d.normalize();
                let mut t = best_gap / 2.0;
                for _ in 0..60 {
                    let shifted = &c + &dir * t;
                    if inside(&shifted, tol.eps_geom) && outside(&shifted, tol.eps_geom) {
                        return Ok(SeparationResult {
                            ball: Ball::unit(shifted),
                            inner_side: Side::First,
                            strict: true,
                        });
                    }
                    t /= 2.0;
                }
            }
        }
    }
    if !(inside(&c, -slack.eps_geom) && outside(&c, -slack.eps_geom)) {
        return Err(Error::NotSeparable("verification of the supporting ball failed".into()));
    }
    Ok(SeparationResult {
        ball: Ball::unit(c),
        inner_side: Side::First,
        strict: false,
    })
}

/// Optimal sphere of [`smallest_separating_sphere`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallestSphere {
    pub result: SeparationResult,
    /// Points of the first set on the optimal sphere with positive multiplier.
    pub active_a: Vec<usize>,
    /// Points of the second set on the optimal sphere with positive multiplier.
    pub active_b: Vec<usize>,
    /// Zero radius: the first set is a single point.
    pub singleton: bool,
}

/// Outcome of [`smallest_separating_sphere`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SmallestSeparation {
    Found(SmallestSphere),
    /// No sphere has `A` in its closed ball and `B` outside its open ball;
    /// the witness is a jointly infeasible subfamily of constraints.
    Infeasible { witness_a: Vec<usize>, witness_b: Vec<usize> },
}

/// Row form of the lifted constraints with an optional margin variable.
fn lifted_rows(a: &[Point], b: &[Point], n: usize, margin: bool) -> (DMatrix<f64>, DVector<f64>) {
    let cols = n + 1 + usize::from(margin);
    let m = a.len() + b.len();
    let mut rows = DMatrix::zeros(m, cols);
    let mut rhs = DVector::zeros(m);
    for (i, p) in a.iter().enumerate() {
        for k in 0..n {
            rows[(i, k)] = -2.0 * p[k];
        }
        rows[(i, n)] = 1.0;
        if margin {
            rows[(i, n + 1)] = 1.0;
        }
        rhs[i] = -p.norm_squared();
    }
    for (j, p) in b.iter().enumerate() {
        let i = a.len() + j;
        for k in 0..n {
            rows[(i, k)] = 2.0 * p[k];
        }
        rows[(i, n)] = -1.0;
        if margin {
            rows[(i, n + 1)] = 1.0;
        }
        rhs[i] = p.norm_squared();
    }
    (rows, rhs)
}

fn radius_objective(n: usize) -> (DMatrix<f64>, DVector<f64>) {
    let mut h = DMatrix::zeros(n + 1, n + 1);
    for k in 0..n {
        h[(k, k)] = 2.0;
    }
    let mut g = DVector::zeros(n + 1);
    g[n] = -1.0;
    (h, g)
}

fn decode(z: &DVector<f64>, n: usize) -> (Point, f64) {
    let c = z.rows(0, n).into_owned();
    let r2 = c.norm_squared() - z[n];
    (c, r2.max(0.0).sqrt())
}

fn input_dim(a: &[Point], b: &[Point]) -> Result<usize> {
    let first = a.first().ok_or(Error::EmptyInput("enclosed set"))?;
    let n = first.len();
    check_points(a, n)?;
    check_points(b, n)?;
    Ok(n)
}

/// Smallest sphere `S(c, r)` with `A` in the closed ball and `B` outside the
/// open ball, by the active-set method on the lifted program.
pub fn smallest_separating_sphere(a: &[Point], b: &[Point], tol: &Tolerance) -> Result<SmallestSeparation> {
    let n = input_dim(a, b)?;
    let (rows, rhs) = lifted_rows(a, b, n, false);
    let (h, g) = radius_objective(n);
    let prog = QuadProgram { h, g, a: rows, b: rhs };
    let split = |idx: &[usize]| -> (Vec<usize>, Vec<usize>) {
        let wa = idx.iter().copied().filter(|&i| i < a.len()).collect();
        let wb = idx.iter().copied().filter(|&i| i >= a.len()).map(|i| i - a.len()).collect();
        (wa, wb)
    };
    match qp::solve(&prog, tol.eps_opt.max(1e-13)) {
        QpOutcome::Optimal(sol) => {
            let (c, r) = decode(&sol.z, n);
            let support: Vec<usize> = sol
                .active
                .iter()
                .zip(&sol.multipliers)
                .filter(|(_, l)| **l > tol.eps_geom)
                .map(|(i, _)| *i)
                .collect();
            let (active_a, active_b) = split(&support);
            let singleton = r <= tol.eps_geom;
            let ball = if singleton { Ball::singleton(c) } else { Ball { center: c, radius: r } };
            Ok(SmallestSeparation::Found(SmallestSphere {
                result: SeparationResult {
                    ball,
                    inner_side: Side::First,
                    strict: false,
                },
                active_a,
                active_b,
                singleton,
            }))
        }
        QpOutcome::Infeasible { witness, .. } => {
            let (witness_a, witness_b) = split(&witness);
            Ok(SmallestSeparation::Infeasible { witness_a, witness_b })
        }
        QpOutcome::Unbounded => Err(Error::TheoremViolation("radius objective unbounded below".into())),
    }
}

/// Largest margin `tau <= 1` in the lifted constraints
/// `|a|^2 - 2<a,c> + w + tau <= 0`, `|b|^2 - 2<b,c> + w >= tau`, together
/// with the maximizing `(c, w)`. `A` and `B` can be strictly separated by a
/// sphere with `A` inside iff the margin is positive.
pub fn strict_separation_margin(a: &[Point], b: &[Point], tol: &Tolerance) -> Result<(f64, DVector<f64>)> {
    let n = input_dim(a, b)?;
    let (rows, rhs) = lifted_rows(a, b, n, true);
    let m = rows.nrows();
    let mut full = DMatrix::zeros(m + 1, n + 2);
    full.view_mut((0, 0), (m, n + 2)).copy_from(&rows);
    full[(m, n + 1)] = 1.0;
    let mut bound = DVector::zeros(m + 1);
    bound.rows_mut(0, m).copy_from(&rhs);
    bound[m] = 1.0;
    let mut g = DVector::zeros(n + 2);
    g[n + 1] = -1.0;
    let prog = QuadProgram {
        h: DMatrix::zeros(n + 2, n + 2),
        g,
        a: full,
        b: bound,
    };
    let mut z0 = DVector::zeros(n + 2);
    z0[n + 1] = -a.iter().map(|p| p.norm_squared()).fold(0.0, f64::max) - 1.0;
    match qp::solve_from(&prog, z0, tol.eps_opt.max(1e-13)) {
        QpOutcome::Optimal(sol) => Ok((sol.z[n + 1], sol.z.rows(0, n + 1).into_owned())),
        _ => Err(Error::TheoremViolation("margin program failed".into())),
    }
}

/// Decides strict separability by a sphere of radius at most one with `A`
/// inside: the smallest separating radius must be below one and a strictly
/// separating sphere must exist.
pub fn strictly_separable_radius_one(a: &[Point], b: &[Point], tol: &Tolerance) -> Result<bool> {
    if a.is_empty() {
        return Ok(true);
    }
    let r = match smallest_separating_sphere(a, b, tol)? {
        SmallestSeparation::Found(s) => s.result.ball.radius,
        SmallestSeparation::Infeasible { .. } => return Ok(false),
    };
    if r >= 1.0 - tol.eps_geom {
        return Ok(false);
    }
    Ok(strict_separation_margin(a, b, tol)?.0 > tol.eps_geom)
}

/// An explicit sphere of radius at most one strictly separating `A` (inside)
/// from `B` with clearance `eps_geom`, or `None`.
pub fn strict_sphere_radius_one(a: &[Point], b: &[Point], tol: &Tolerance) -> Result<Option<Ball>> {
    let n = input_dim(a, b)?;
    if !strictly_separable_radius_one(a, b, tol)? {
        return Ok(None);
    }
    let (tau_max, start) = strict_separation_margin(a, b, tol)?;
    let (h, g) = radius_objective(n);
    let mut tau = tau_max / 2.0;
    let mut found: Option<Ball> = None;
    for _ in 0..80 {
        let (rows, mut rhs) = lifted_rows(a, b, n, false);
        rhs.add_scalar_mut(-tau);
        let prog = QuadProgram {
            h: h.clone(),
            g: g.clone(),
            a: rows,
            b: rhs,
        };
        let sol = match qp::solve_from(&prog, start.clone(), tol.eps_opt.max(1e-13)) {
            QpOutcome::Optimal(s) => s,
            _ => break,
        };
        let (c, r) = decode(&sol.z, n);
        let clear_a = r - a.iter().map(|p| (p - &c).norm()).fold(0.0, f64::max);
        let clear_b = b.iter().map(|p| (p - &c).norm()).fold(f64::INFINITY, f64::min) - r;
        let valid = r <= 1.0 && clear_a >= tol.eps_geom && clear_b >= tol.eps_geom;
        if valid {
            found = Some(Ball { center: c, radius: r });
        } else if found.is_some() {
            break;
        }
        tau /= 2.0;
    }
    match found {
        Some(ball) => Ok(Some(ball)),
        None => Err(Error::TheoremViolation(
            "strictly separable instance without an explicit sphere".into(),
        )),
    }
}

/// Center of a unit circle strictly separating planar `A` (inside the open
/// disk) from `B` (outside the closed disk), or `None`.
///
/// The feasible centers form the open region
/// `int B(a) for a in A` minus `B[b] for b in B`; when nonempty, its boundary
/// contains an arc of one of the unit circles between two consecutive
/// crossings with the others, so probing a point just off the middle of
/// every such arc decides emptiness.
pub fn unit_circle_separation(a: &[Point], b: &[Point], tol: &Tolerance) -> Result<Option<Point>> {
    let n = input_dim(a, b)?;
    if n != 2 {
        return Err(Error::Unsupported { dim: n });
    }
    let probe = 1e-6;
    let feasible = |c: &Point| {
        a.iter().all(|p| (p - c).norm() < 1.0 - tol.eps_geom) && b.iter().all(|p| (p - c).norm() > 1.0 + tol.eps_geom)
    };
    let circles: Vec<(&Point, f64)> = a.iter().map(|p| (p, -1.0)).chain(b.iter().map(|p| (p, 1.0))).collect();
    for (k, (center, side)) in circles.iter().enumerate() {
        let mut angles = Vec::new();
        for (j, (other, _)) in circles.iter().enumerate() {
            let v = *other - *center;
            let d = v.norm();
            if j == k || d <= tol.eps_geom || d >= 2.0 {
                continue;
            }
            let base = v[1].atan2(v[0]);
            let half = (d / 2.0).acos();
            angles.push((base + half).rem_euclid(TAU));
            angles.push((base - half).rem_euclid(TAU));
        }
        angles.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mids: Vec<f64> = if angles.is_empty() {
            vec![0.0]
        } else {
            (0..angles.len())
                .map(|i| {
                    let lo = angles[i];
                    let hi = if i + 1 < angles.len() { angles[i + 1] } else { angles[0] + TAU };
                    0.5 * (lo + hi)
                })
                .collect()
        };
        for t in mids {
            let c = *center + polar(1.0 + side * probe, t);
            if feasible(&c) {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

/// Result of [`kirchberger_verdict`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum KirchbergerVerdict {
    /// Every small subfamily, and hence the whole instance, is strictly
    /// separable by a sphere of radius at most one; `sphere` does it.
    SeparableByCapRadius1 { sphere: Ball },
    /// The first subfamily (by size, then lexicographically) that admits no
    /// such sphere.
    NotSeparable { witness_a: Vec<usize>, witness_b: Vec<usize> },
    /// The instance is separable by a sphere of radius at most one, every
    /// subfamily of at most `subset_size` points is strictly separable by a
    /// unit circle, yet the whole instance is not.
    CounterexampleWitness { sphere: Ball, subset_size: usize },
}

/// Largest total size accepted by [`kirchberger_verdict`].
pub const KIRCHBERGER_CAP: usize = 24;

fn subsets_up_to(total: usize, max: usize) -> impl Iterator<Item = Vec<usize>> {
    (1..=max.min(total)).flat_map(move |k| (0..total).combinations(k))
}

/// Kirchberger-type verdict for strict separation by spheres of radius at
/// most one: all subfamilies `T` with `|T| <= n+2` are tested; if all pass,
/// the whole instance must pass, otherwise an implementation fault is
/// reported. In the plane the unit-circle variant is also examined on the
/// same subfamilies.
pub fn kirchberger_verdict(a: &[Point], b: &[Point], tol: &Tolerance) -> Result<KirchbergerVerdict> {
    let n = input_dim(a, b)?;
    let total = a.len() + b.len();
    if total > KIRCHBERGER_CAP {
        return Err(Error::SizeCapExceeded {
            size: total,
            cap: KIRCHBERGER_CAP,
        });
    }
    let pick = |t: &[usize]| -> (Vec<usize>, Vec<usize>, Vec<Point>, Vec<Point>) {
        let ia: Vec<usize> = t.iter().copied().filter(|&i| i < a.len()).collect();
        let ib: Vec<usize> = t.iter().copied().filter(|&i| i >= a.len()).map(|i| i - a.len()).collect();
        let pa = ia.iter().map(|&i| a[i].clone()).collect();
        let pb = ib.iter().map(|&i| b[i].clone()).collect();
        (ia, ib, pa, pb)
    };
    let subsets: Vec<Vec<usize>> = subsets_up_to(total, n + 2).collect();
    let failing = subsets
        .par_iter()
        .map(|t| {
            let (_, _, pa, pb) = pick(t);
            strictly_separable_radius_one(&pa, &pb, tol).map(|ok| (!ok).then(|| t.clone()))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .next();
    if let Some(t) = failing {
        let (witness_a, witness_b, _, _) = pick(&t);
        return Ok(KirchbergerVerdict::NotSeparable { witness_a, witness_b });
    }
    let sphere = strict_sphere_radius_one(a, b, tol)?.ok_or_else(|| {
        Error::TheoremViolation("all small subfamilies separable but the whole instance is not".into())
    })?;
    if n == 2 && unit_circle_separation(a, b, tol)?.is_none() {
        let all_small = subsets
            .par_iter()
            .map(|t| {
                let (_, _, pa, pb) = pick(t);
                if pa.is_empty() {
                    return Ok(true);
                }
                unit_circle_separation(&pa, &pb, tol).map(|c| c.is_some())
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .all(|ok| ok);
        if all_small {
            return Ok(KirchbergerVerdict::CounterexampleWitness {
                sphere,
                subset_size: n + 2,
            });
        }
    }
    Ok(KirchbergerVerdict::SeparableByCapRadius1 { sphere })
}

/// Planar instance `A = {a}`, `B = {b_0, ..., b_{k-1}}` showing that strict
/// separation by unit circles has no Kirchberger theorem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub a: Vec<Point>,
    pub b: Vec<Point>,
    /// Half-angle of the inner cap `C` on the circle around `b_0`.
    pub cap_half_angle: f64,
    /// Angular spacing of the covering caps.
    pub spacing: f64,
}

/// Number of boundary samples used to verify the covering properties.
pub const COUNTEREXAMPLE_SAMPLES: usize = 10_000;

/// Builds and verifies the counterexample with `a = o`, `b_0 = (delta, 0)`
/// and `k - 1 = ceil(gamma / eps)` covering points, where `gamma` is the
/// half-angle of the cap `C = S(b_0) ∩ B[a]`. Each `b_i` sits at distance
/// `2 cos(eps)` from `b_0`, so `B[b_i]` cuts from `S(b_0)` a cap of angular
/// radius `eps`; the caps are spaced evenly across `C`.
pub fn kirchberger_counterexample(n: usize, delta: f64, eps: f64) -> Result<Counterexample> {
    if n != 2 {
        return Err(Error::Unsupported { dim: n });
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::BadParameters(format!("delta = {delta} must lie in (0, 1)")));
    }
    if !(eps > 0.0 && eps < PI / 2.0) {
        return Err(Error::BadParameters(format!("eps = {eps} must lie in (0, pi/2)")));
    }
    let gamma = (delta / 2.0).acos();
    let count = (gamma / eps).ceil() as usize;
    if count < 3 {
        return Err(Error::BadParameters(format!(
            "cap radius {eps} needs only {count} covering caps, at least 3 required"
        )));
    }
    let spacing = 2.0 * gamma / count as f64;
    let a = DVector::zeros(2);
    let b0 = DVector::from_vec(vec![delta, 0.0]);
    let mut b = vec![b0.clone()];
    for i in 1..=count {
        let theta = PI - gamma + (i as f64 - 0.5) * spacing;
        b.push(&b0 + polar(2.0 * eps.cos(), theta));
    }
    let ce = Counterexample {
        a: vec![a],
        b,
        cap_half_angle: gamma,
        spacing,
    };
    verify_counterexample(&ce)?;
    Ok(ce)
}

/// Checks by dense sampling that the caps cover `C` minimally, that the open
/// disk around `a` is covered by the closed disks around `B` while each
/// proper subfamily leaves part of it uncovered, and that `a ∈ conv B`.
pub fn verify_counterexample(ce: &Counterexample) -> Result<()> {
    let a = &ce.a[0];
    let b0 = &ce.b[0];
    let covered = |p: &Point, skip: Option<usize>, from: usize| {
        ce.b
            .iter()
            .enumerate()
            .skip(from)
            .any(|(j, q)| Some(j) != skip && (p - q).norm() <= 1.0 + 1e-12)
    };
    let m = COUNTEREXAMPLE_SAMPLES;
    let cap: Vec<Point> = (0..m)
        .map(|s| {
            let t = PI - ce.cap_half_angle + 2.0 * ce.cap_half_angle * s as f64 / (m - 1) as f64;
            b0 + polar(1.0, t)
        })
        .collect();
    if let Some(p) = cap.iter().find(|p| !covered(p, None, 1)) {
        return Err(Error::BadParameters(format!("cap point {p:?} is not covered")));
    }
    for i in 1..ce.b.len() {
        if cap.iter().all(|p| covered(p, Some(i), 1)) {
            return Err(Error::BadParameters(format!("covering point {i} is redundant")));
        }
    }
    let radial = 100;
    let angular = m / radial;
    let disk: Vec<Point> = (0..radial)
        .flat_map(|ri| {
            let r = (ri as f64 + 0.5) / radial as f64 * (1.0 - 1e-9);
            (0..angular).map(move |ti| a + polar(r, TAU * ti as f64 / angular as f64))
        })
        .collect();
    if let Some(p) = disk.iter().find(|p| !covered(p, None, 0)) {
        return Err(Error::BadParameters(format!("open disk point {p:?} is not covered")));
    }
    let tol = Tolerance::default();
    for i in 0..ce.b.len() {
        let rest: Vec<Point> = ce.b.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
        if unit_circle_separation(&ce.a, &rest, &tol)?.is_none() {
            return Err(Error::BadParameters(format!("point {i} of B is not needed for the covering")));
        }
    }
    if convex_hull_contains(&ce.b, a, 1e-12).is_none() {
        return Err(Error::BadParameters("a is not in the convex hull of B".into()));
    }
    Ok(())
}

/// Largest `s` such that some `x` has `<x,a> >= 1 + s` for all `a` and
/// `<x,b> <= 1 - s` for all `b` (capped at one). For `A`, `B` on the unit
/// sphere around the origin the half-space family is empty, so the unit
/// sphere is the smallest separating sphere, iff the value is negative.
pub fn inversion_margin(a: &[Point], b: &[Point], tol: &Tolerance) -> Result<f64> {
    let n = input_dim(a, b)?;
    let m = a.len() + b.len();
    let mut rows = DMatrix::zeros(m + 1, n + 1);
    let mut rhs = DVector::zeros(m + 1);
    for (i, p) in a.iter().enumerate() {
        for k in 0..n {
            rows[(i, k)] = -p[k];
        }
        rows[(i, n)] = 1.0;
        rhs[i] = -1.0;
    }
    for (j, p) in b.iter().enumerate() {
        let i = a.len() + j;
        for k in 0..n {
            rows[(i, k)] = p[k];
        }
        rows[(i, n)] = 1.0;
        rhs[i] = 1.0;
    }
    rows[(m, n)] = 1.0;
    rhs[m] = 1.0;
    let mut g = DVector::zeros(n + 1);
    g[n] = -1.0;
    let prog = QuadProgram {
        h: DMatrix::zeros(n + 1, n + 1),
        g,
        a: rows,
        b: rhs,
    };
    let mut z0 = DVector::zeros(n + 1);
    z0[n] = -1.0;
    match qp::solve_from(&prog, z0, tol.eps_opt.max(1e-13)) {
        QpOutcome::Optimal(s) => Ok(s.z[n]),
        _ => Err(Error::TheoremViolation("half-space margin program failed".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::point;
    use crate::hull::{spindle_hull_2d, SpindleHull2};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn found(s: SmallestSeparation) -> SmallestSphere {
        match s {
            SmallestSeparation::Found(s) => s,
            other => panic!("expected a sphere, got {other:?}"),
        }
    }

    /// Independent oracle: minimizes `max |c - a|` over centers on a
    /// shrinking grid, keeping only centers whose ball excludes `B`.
    fn grid_oracle(a: &[Point], b: &[Point], start: &Point, span: f64) -> Option<(Point, f64)> {
        let eval = |c: &Point| {
            let r = a.iter().map(|p| (p - c).norm()).fold(0.0, f64::max);
            let ok = b.iter().all(|p| (p - c).norm() >= r - 1e-12);
            ok.then_some(r)
        };
        let mut best: Option<(Point, f64)> = None;
        let mut center = start.clone();
        let mut h = span;
        for _ in 0..60 {
            let steps = 20;
            for i in -steps..=steps {
                for j in -steps..=steps {
                    let c = &center + point(&[i as f64 * h / steps as f64, j as f64 * h / steps as f64]);
                    if let Some(r) = eval(&c) {
                        if best.as_ref().is_none_or(|(_, br)| r < *br) {
                            best = Some((c, r));
                        }
                    }
                }
            }
            center = best.as_ref()?.0.clone();
            h *= 0.5;
        }
        best
    }

    #[test]
    fn support_ball_examples() {
        let t = tol();
        let pair = vec![point(&[-1.0, 0.0]), point(&[1.0, 0.0])];
        let z = point(&[0.6, 0.8]);
        let ball = support_unit_ball(&pair, &z, &z, &t).unwrap();
        assert_abs_diff_eq!(ball.center.norm(), 0.0, epsilon = 1e-12);

        let spindle = vec![point(&[0.0, 0.0]), point(&[1.0, 0.0])];
        let peak = point(&[0.5, 1.0 - 3f64.sqrt() / 2.0]);
        let ball = support_unit_ball(&spindle, &peak, &point(&[0.0, 1.0]), &t).unwrap();
        assert_abs_diff_eq!((&ball.center - point(&[0.5, -3f64.sqrt() / 2.0])).norm(), 0.0, epsilon = 1e-12);

        let tri = vec![point(&[0.0, 0.0]), point(&[1.0, 0.0]), point(&[0.5, 3f64.sqrt() / 2.0])];
        // Outward normals at the origin vertex point away from the two arc
        // centers (1,0) and (1/2, sqrt(3)/2): angles from 180 to 240 degrees.
        for deg in [180.0f64, 200.0, 225.0, 240.0] {
            let normal = polar(1.0, deg.to_radians());
            let ball = support_unit_ball(&tri, &tri[0], &normal, &t).unwrap();
            assert!(tri.iter().all(|p| ball.contains(p, true, &t)));
        }
        assert!(matches!(
            support_unit_ball(&tri, &tri[0], &point(&[1.0, 0.0]), &t),
            Err(Error::NotSupporting(_))
        ));
    }

    #[test]
    fn unit_separation_of_far_points_is_strict() {
        let t = tol();
        let x = vec![point(&[0.0, 0.0])];
        let y = vec![point(&[3.0, 0.0])];
        let s = separate_by_unit_sphere(&x, &y, &t).unwrap();
        assert!(s.strict);
        assert_eq!(s.inner_side, Side::First);
        assert!(s.ball.contains(&x[0], false, &t));
        assert!((&y[0] - &s.ball.center).norm() > 1.0 + t.eps_geom);
    }

    #[test]
    fn touching_spindles_separate_through_the_contact() {
        let t = tol();
        let bulge = 1.0 - 0.75f64.sqrt();
        let x = vec![point(&[0.0, 0.5]), point(&[0.0, -0.5])];
        let y = vec![point(&[2.0 * bulge, 0.5]), point(&[2.0 * bulge, -0.5])];
        let s = separate_by_unit_sphere(&x, &y, &t).unwrap();
        assert!(!s.strict);
        let contact = point(&[bulge, 0.0]);
        assert_abs_diff_eq!((&contact - &s.ball.center).norm(), 1.0, epsilon = 1e-7);
        let overlapping = vec![point(&[1.5 * bulge, 0.5]), point(&[1.5 * bulge, -0.5])];
        assert!(matches!(separate_by_unit_sphere(&x, &overlapping, &t), Err(Error::NotSeparable(_))));
    }

    #[test]
    fn separation_from_points_beyond_a_disk_boundary() {
        let t = tol();
        let x: Vec<Point> = (0..5).map(|k| polar(0.5, k as f64)).collect();
        let y = vec![point(&[1.3, 0.0]), point(&[1.2, 0.4]), point(&[1.25, -0.3])];
        let s = separate_by_unit_sphere(&x, &y, &t).unwrap();
        assert!(s.strict);
        assert!(x.iter().all(|p| s.ball.contains(p, false, &t)));
        assert!(y.iter().all(|p| (p - &s.ball.center).norm() > 1.0 + t.eps_geom));
    }

    #[test]
    fn unit_separation_in_space() {
        let t = tol();
        let x = vec![point(&[0.0, 0.0, 0.0]), point(&[0.3, 0.1, 0.0]), point(&[0.1, 0.3, 0.2])];
        let y = vec![point(&[1.5, 0.0, 0.0]), point(&[1.4, 0.5, 0.3])];
        let s = separate_by_unit_sphere(&x, &y, &t).unwrap();
        assert!(s.strict);
        assert!(x.iter().all(|p| s.ball.contains(p, true, &t)));
        assert!(y.iter().all(|p| (p - &s.ball.center).norm() >= 1.0));
    }

    #[test]
    fn smallest_sphere_examples() {
        let t = tol();
        let a = vec![point(&[-1.0, 0.0]), point(&[1.0, 0.0])];
        let b = vec![point(&[0.0, 2.0]), point(&[0.0, -2.0])];
        let s = found(smallest_separating_sphere(&a, &b, &t).unwrap());
        assert_abs_diff_eq!(s.result.ball.radius, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.result.ball.center.norm(), 0.0, epsilon = 1e-9);
        let (oc, or) = grid_oracle(&a, &b, &point(&[0.3, 0.2]), 2.0).unwrap();
        assert_abs_diff_eq!(or, 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(oc.norm(), 0.0, epsilon = 1e-6);

        let single = found(smallest_separating_sphere(&[point(&[0.4, 0.1])], &[], &t).unwrap());
        assert!(single.singleton);
        assert_eq!(single.result.ball.radius, 0.0);

        let square: Vec<Point> = (0..4).map(|k| polar(1.0, k as f64 * PI / 2.0)).collect();
        let rotated: Vec<Point> = (0..4).map(|k| polar(1.0, PI / 4.0 + k as f64 * PI / 2.0)).collect();
        let s = found(smallest_separating_sphere(&square, &rotated, &t).unwrap());
        assert_abs_diff_eq!(s.result.ball.radius, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.result.ball.center.norm(), 0.0, epsilon = 1e-9);
        let (_, or) = grid_oracle(&square, &rotated, &point(&[0.1, -0.2]), 1.0).unwrap();
        assert_abs_diff_eq!(or, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn point_inside_the_hull_is_infeasible() {
        let t = tol();
        let a = vec![point(&[-1.0, 0.0]), point(&[1.0, 0.0]), point(&[0.0, 1.0])];
        let b = vec![point(&[0.0, 0.3]), point(&[5.0, 5.0])];
        match smallest_separating_sphere(&a, &b, &t).unwrap() {
            SmallestSeparation::Infeasible { witness_a, witness_b } => {
                assert_eq!(witness_b, vec![0]);
                assert!(witness_a.len() + witness_b.len() <= 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn kirchberger_planted_gap() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut a = Vec::new();
        let mut b = Vec::new();
        while a.len() < 8 || b.len() < 8 {
            let p = point(&[rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)]);
            let r = p.norm();
            if r < 0.75 && a.len() < 8 {
                a.push(p);
            } else if r > 0.85 && b.len() < 8 {
                b.push(p);
            }
        }
        match kirchberger_verdict(&a, &b, &t).unwrap() {
            KirchbergerVerdict::SeparableByCapRadius1 { sphere } => {
                assert!(sphere.radius <= 0.8 + 1e-6);
                assert!(a.iter().all(|p| sphere.contains(p, false, &t)));
                assert!(b.iter().all(|p| (p - &sphere.center).norm() > sphere.radius + t.eps_geom));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn kirchberger_small_cap() {
        let t = tol();
        let a = vec![point(&[0.1, 0.0]), point(&[-0.1, 0.2]), point(&[0.0, -0.2])];
        let b: Vec<Point> = (0..6).map(|k| polar(0.9, k as f64)).collect();
        assert!(matches!(
            kirchberger_verdict(&a, &b, &t).unwrap(),
            KirchbergerVerdict::SeparableByCapRadius1 { .. }
        ));
        let a = vec![point(&[-0.9, 0.0]), point(&[0.9, 0.0])];
        let b = vec![point(&[0.0, 0.0]), point(&[3.0, 3.0])];
        match kirchberger_verdict(&a, &b, &t).unwrap() {
            KirchbergerVerdict::NotSeparable { witness_a, witness_b } => {
                assert!(witness_a.len() + witness_b.len() <= 4);
                assert!(!witness_b.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
        let wide = vec![point(&[-1.1, 0.0]), point(&[1.1, 0.0])];
        assert!(matches!(
            kirchberger_verdict(&wide, &[], &t).unwrap(),
            KirchbergerVerdict::NotSeparable { .. }
        ));
    }

    fn six_cap_instance() -> Counterexample {
        let gamma = (0.25f64).acos();
        kirchberger_counterexample(2, 0.5, 1.1 * gamma / 6.0).unwrap()
    }

    #[test]
    fn counterexample_with_six_caps() {
        let t = tol();
        let ce = six_cap_instance();
        assert_eq!(ce.b.len(), 7);
        assert!(unit_circle_separation(&ce.a, &ce.b, &t).unwrap().is_none());
        let pts: Vec<(bool, Point)> = ce.a.iter().map(|p| (true, p.clone())).chain(ce.b.iter().map(|p| (false, p.clone()))).collect();
        for size in 1..pts.len() {
            for subset in (0..pts.len()).combinations(size) {
                let sa: Vec<Point> = subset.iter().filter(|&&i| pts[i].0).map(|&i| pts[i].1.clone()).collect();
                let sb: Vec<Point> = subset.iter().filter(|&&i| !pts[i].0).map(|&i| pts[i].1.clone()).collect();
                if sa.is_empty() {
                    continue;
                }
                assert!(unit_circle_separation(&sa, &sb, &t).unwrap().is_some(), "{subset:?}");
            }
        }
        match kirchberger_verdict(&ce.a, &ce.b, &t).unwrap() {
            KirchbergerVerdict::CounterexampleWitness { sphere, subset_size } => {
                assert_eq!(subset_size, 4);
                assert!(sphere.radius <= 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn counterexample_close_to_the_boundary() {
        let ce = kirchberger_counterexample(2, 0.9, 0.15).unwrap();
        let t = tol();
        assert!(ce.b.len() >= 5);
        assert!(unit_circle_separation(&ce.a, &ce.b, &t).unwrap().is_none());
    }

    #[test]
    fn removing_a_covering_point_allows_separation() {
        let t = tol();
        let ce = six_cap_instance();
        let mut b = ce.b.clone();
        b.remove(3);
        let c = unit_circle_separation(&ce.a, &b, &t).unwrap().unwrap();
        assert!((&ce.a[0] - &c).norm() < 1.0);
        assert!(b.iter().all(|p| (p - &c).norm() > 1.0));
    }

    #[test]
    fn counterexample_parameters_are_checked() {
        assert!(matches!(kirchberger_counterexample(2, 0.5, 1.0), Err(Error::BadParameters(_))));
        assert!(matches!(kirchberger_counterexample(2, 1.5, 0.1), Err(Error::BadParameters(_))));
        assert!(matches!(kirchberger_counterexample(3, 0.5, 0.1), Err(Error::Unsupported { dim: 3 })));
    }

    #[test]
    fn inversion_criterion_agrees_with_the_solver() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        for _ in 0..400 {
            let na = rng.random_range(1..4);
            let nb = rng.random_range(1..4);
            let a: Vec<Point> = (0..na).map(|_| polar(1.0, rng.random_range(0.0..TAU))).collect();
            let b: Vec<Point> = (0..nb).map(|_| polar(1.0, rng.random_range(0.0..TAU))).collect();
            let margin = inversion_margin(&a, &b, &t).unwrap();
            if margin.abs() < 1e-6 {
                continue;
            }
            let s = found(smallest_separating_sphere(&a, &b, &t).unwrap());
            let minimal = (s.result.ball.radius - 1.0).abs() <= 1e-7;
            assert_eq!(minimal, margin < 0.0, "a={a:?} b={b:?} r={}", s.result.ball.radius);
            checked += 1;
        }
        assert!(checked > 200);
    }

    fn planar(max: usize) -> impl Strategy<Value = Vec<Point>> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..max)
            .prop_map(|v| v.into_iter().map(|(x, y)| point(&[x, y])).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]

        #[test]
        fn smallest_sphere_is_valid_and_certified(a in planar(6), b in planar(6)) {
            let t = tol();
            if let SmallestSeparation::Found(s) = smallest_separating_sphere(&a, &b, &t).unwrap() {
                let ball = &s.result.ball;
                for p in &a {
                    prop_assert!((p - &ball.center).norm() <= ball.radius + 1e-7);
                }
                for p in &b {
                    prop_assert!((p - &ball.center).norm() >= ball.radius - 1e-7);
                }
                prop_assert!(s.active_a.len() + s.active_b.len() <= 4);
            }
        }

        #[test]
        fn smallest_sphere_is_scale_covariant(a in planar(5), b in planar(5), scale in 0.2f64..5.0) {
            let t = tol();
            let sa: Vec<Point> = a.iter().map(|p| p * scale).collect();
            let sb: Vec<Point> = b.iter().map(|p| p * scale).collect();
            match (smallest_separating_sphere(&a, &b, &t).unwrap(), smallest_separating_sphere(&sa, &sb, &t).unwrap()) {
                (SmallestSeparation::Found(x), SmallestSeparation::Found(y)) => {
                    prop_assert!((x.result.ball.radius * scale - y.result.ball.radius).abs() <= 1e-6 * scale.max(1.0));
                }
                (SmallestSeparation::Infeasible { .. }, SmallestSeparation::Infeasible { .. }) => {}
                (x, y) => prop_assert!(false, "outcomes differ: {x:?} vs {y:?}"),
            }
        }

        #[test]
        fn smallest_sphere_matches_grid_oracle(a in planar(4), b in planar(4)) {
            let t = tol();
            if let SmallestSeparation::Found(s) = smallest_separating_sphere(&a, &b, &t).unwrap() {
                let span = 4.0 * (1.0 + s.result.ball.center.norm());
                if s.result.ball.radius < 5.0 {
                    let start = &s.result.ball.center + point(&[0.013, -0.021]);
                    if let Some((_, r)) = grid_oracle(&a, &b, &start, span) {
                        prop_assert!(r >= s.result.ball.radius - 1e-6);
                    }
                }
            }
        }

        #[test]
        fn unit_separation_verifies(x in prop::collection::vec((-0.4f64..0.4, -0.4f64..0.4), 1..5),
                                    y in prop::collection::vec((1.2f64..2.0, -0.7f64..0.7), 1..5)) {
            let t = tol();
            let x: Vec<Point> = x.into_iter().map(|(a, b)| point(&[a, b])).collect();
            let y: Vec<Point> = y.into_iter().map(|(a, b)| point(&[a, b])).collect();
            let s = separate_by_unit_sphere(&x, &y, &t).unwrap();
            let slack = Tolerance { eps_geom: 1e-8, ..t };
            prop_assert!(crate::geom::in_ball_intersection(&x, 1.0, &s.ball.center, true, &slack));
            prop_assert!(y.iter().all(|p| (p - &s.ball.center).norm() >= 1.0 - 1e-8));
            if let SpindleHull2::Boundary(bd) = spindle_hull_2d(&x, &t).unwrap() {
                prop_assert!(bd.vertices.iter().all(|p| s.ball.contains(p, true, &slack)));
            }
        }
    }
}
