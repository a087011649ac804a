//! Illumination of bodies `B[X]` in 3-space by the six directions `±u, ±v, ±w`
//! of an orthogonal frame.
//!
//! At a boundary point `z` the Gauss image is the spherical convex hull of
//! the unit vectors `x - z` for the centers `x` at distance one from `z`. The
//! pair `±a` illuminates `z` exactly when that image misses the great circle
//! `C(a) = a^⊥`, i.e. when every generator has strictly the same sign against
//! `a`. The checks run stratum by stratum on the boundary structure from
//! [`crate::bp3`]: vertices directly, edges and seams through the finitely
//! many parameters where a generator changes sign, and face points through
//! the fact that a single unit vector is never orthogonal to a whole frame.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, TAU};

use itertools::Itertools;
use nalgebra::Matrix3;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bp3::{boundary_structure, BallPolyhedron3, Circle3};
use crate::constructions::trial_rng;
use crate::error::{Error, Result};
use crate::geom::{check_points, point, Point, Tolerance};

/// Number of rotation angles tried by [`find_frame`] before it raises an alarm.
pub const FRAME_SWEEP_LIMIT: usize = 64;

/// Boundary stratum of a point of `bd B[X]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StratumTag {
    Vertex,
    EdgePoint,
    FacePoint,
}

/// Generators `x - z` of the Gauss image at a boundary point `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussImage {
    pub point: Point,
    pub generators: Vec<Point>,
    pub tag: StratumTag,
    /// Largest angle between two generators.
    pub diameter: f64,
}

fn angle(a: &Point, b: &Point) -> f64 {
    (a.dot(b) / (a.norm() * b.norm())).clamp(-1.0, 1.0).acos()
}

fn max_angle(gens: &[Point]) -> f64 {
    gens.iter()
        .tuple_combinations()
        .map(|(a, b)| angle(a, b))
        .fold(0.0, f64::max)
}

fn check_diameter(x: &[Point], tol: &Tolerance) -> Result<()> {
    check_points(x, 3)?;
    for (i, j) in (0..x.len()).tuple_combinations() {
        let d = (&x[i] - &x[j]).norm();
        if d > 1.0 + tol.eps_geom {
            return Err(Error::Precondition(format!(
                "diam(X) <= 1 required, points {i} and {j} are {d} apart"
            )));
        }
    }
    Ok(())
}

/// Gauss image of `B[X]` at the boundary point `z`.
///
/// Fails with [`Error::NotOnBoundary`] when `z` is not within `eps_geom` of
/// the boundary and with [`Error::TheoremViolation`] if the image is wider
/// than `pi/3`.
pub fn gauss_image(x: &[Point], z: &Point, tol: &Tolerance) -> Result<GaussImage> {
    check_diameter(x, tol)?;
    if z.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: z.len(),
        });
    }
    let far = x.iter().map(|c| (c - z).norm()).fold(0.0, f64::max);
    if (far - 1.0).abs() > tol.eps_geom {
        return Err(Error::NotOnBoundary { defect: far - 1.0 });
    }
    let mut generators: Vec<Point> = Vec::new();
    for c in x {
        let g = c - z;
        if (g.norm() - 1.0).abs() <= tol.eps_geom && generators.iter().all(|h| (h - &g).norm() > tol.eps_geom) {
            generators.push(g);
        }
    }
    let tag = match generators.len() {
        1 => StratumTag::FacePoint,
        2 => StratumTag::EdgePoint,
        _ => StratumTag::Vertex,
    };
    let diameter = max_angle(&generators);
    if diameter > FRAC_PI_3 + tol.eps_geom {
        return Err(Error::TheoremViolation(format!(
            "Gauss image of diameter {diameter} exceeds pi/3"
        )));
    }
    Ok(GaussImage {
        point: z.clone(),
        generators,
        tag,
        diameter,
    })
}

/// Three pairwise orthogonal unit vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub u: Point,
    pub v: Point,
    pub w: Point,
}

impl Frame {
    /// Validates unit norms and pairwise orthogonality within `eps_geom`.
    pub fn new(u: Point, v: Point, w: Point, tol: &Tolerance) -> Result<Self> {
        let f = Frame { u, v, w };
        let axes = f.axes();
        for a in &axes {
            if a.len() != 3 {
                return Err(Error::DimensionMismatch {
                    expected: 3,
                    found: a.len(),
                });
            }
            if (a.norm() - 1.0).abs() > tol.eps_geom {
                return Err(Error::InvalidInput(format!("frame vector of norm {}", a.norm())));
            }
        }
        for (a, b) in axes.iter().tuple_combinations() {
            if a.dot(b).abs() > tol.eps_geom {
                return Err(Error::InvalidInput(format!(
                    "frame vectors with inner product {}",
                    a.dot(b)
                )));
            }
        }
        Ok(f)
    }

    pub fn standard() -> Self {
        Frame {
            u: point(&[1.0, 0.0, 0.0]),
            v: point(&[0.0, 1.0, 0.0]),
            w: point(&[0.0, 0.0, 1.0]),
        }
    }

    pub fn axes(&self) -> [&Point; 3] {
        [&self.u, &self.v, &self.w]
    }

    /// Uniformly distributed frame: Gram-Schmidt applied to a Gaussian
    /// triple, which is the QR factor with positive diagonal.
    pub fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut gaussian = || point(&[0, 1, 2].map(|_| rng.sample::<f64, _>(StandardNormal)));
        let u = gaussian().normalize();
        let a = gaussian();
        let v = (&a - &u * u.dot(&a)).normalize();
        let w = cross(&u, &v);
        Frame { u, v, w }
    }

    /// Image of the frame under the linear map `q`.
    pub fn transformed(&self, q: &Matrix3<f64>) -> Self {
        let apply = |p: &Point| point((q * nalgebra::Vector3::new(p[0], p[1], p[2])).as_slice());
        Frame {
            u: apply(&self.u),
            v: apply(&self.v),
            w: apply(&self.w),
        }
    }

    /// Frame `(u, v cos t + w sin t, w cos t - v sin t)`.
    pub fn rotated_about_u(&self, t: f64) -> Self {
        let (s, c) = t.sin_cos();
        Frame {
            u: self.u.clone(),
            v: &self.v * c + &self.w * s,
            w: &self.w * c - &self.v * s,
        }
    }
}

fn cross(a: &Point, b: &Point) -> Point {
    point(&[
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

/// Location of a blocked boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Stratum {
    Vertex { vertex: usize },
    /// Point of an edge at arc fraction `s` in `(0, 1)`.
    Edge { edge: usize, s: f64 },
    /// Point of a seam at circle parameter `t`.
    Seam { seam: usize, t: f64 },
}

/// A boundary point whose Gauss image meets all three great circles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockingWitness {
    pub stratum: Stratum,
    pub point: Point,
    pub generators: Vec<Point>,
}

/// Outcome of [`illuminates_frame`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IlluminationVerdict {
    pub illuminated: bool,
    pub witnesses: Vec<BlockingWitness>,
    /// Boundary points at which the Gauss image was tested.
    pub points_checked: usize,
}

/// `true` when every generator has strictly the same sign against `a`.
fn misses(gens: &[Point], a: &Point, eps: f64) -> bool {
    let vals: Vec<f64> = gens.iter().map(|g| g.dot(a)).collect();
    vals.iter().all(|&t| t > eps) || vals.iter().all(|&t| t < -eps)
}

fn frame_misses(gens: &[Point], frame: &Frame, eps: f64) -> bool {
    frame.axes().iter().any(|a| misses(gens, a, eps))
}

/// `B[X]` with its boundary structure, ready for repeated frame tests.
#[derive(Debug, Clone)]
pub struct Illuminator {
    pub points: Vec<Point>,
    pub body: BallPolyhedron3,
    /// Generators at each vertex, including every point of `X` at distance one.
    vertex_generators: Vec<Vec<Point>>,
    tol: Tolerance,
}

impl Illuminator {
    pub fn new(x: &[Point], tol: &Tolerance) -> Result<Self> {
        check_diameter(x, tol)?;
        if x.is_empty() {
            return Err(Error::EmptyInput("illumination of B[X] needs a point"));
        }
        let body = boundary_structure(x, tol)?;
        let vertex_generators = body
            .vertices
            .iter()
            .map(|v| gauss_image(x, &v.point, tol).map(|g| g.generators))
            .collect::<Result<Vec<_>>>()?;
        Ok(Illuminator {
            points: x.to_vec(),
            body,
            vertex_generators,
            tol: *tol,
        })
    }

    /// Decides whether `±u, ±v, ±w` illuminate `B[X]`, collecting every
    /// blocked boundary point found.
    pub fn check(&self, frame: &Frame) -> IlluminationVerdict {
        let eps = self.tol.eps_geom;
        let mut witnesses = Vec::new();
        let mut points_checked = 0;
        for (i, gens) in self.vertex_generators.iter().enumerate() {
            points_checked += 1;
            if !frame_misses(gens, frame, eps) {
                witnesses.push(BlockingWitness {
                    stratum: Stratum::Vertex { vertex: i },
                    point: self.body.vertices[i].point.clone(),
                    generators: gens.clone(),
                });
            }
        }
        let arcs: Vec<(Stratum, [usize; 2], &Circle3, f64, f64)> = self
            .body
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| (Stratum::Edge { edge: i, s: 0.0 }, e.spheres, &e.circle, e.start, e.sweep))
            .chain(
                self.body
                    .seams
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (Stratum::Seam { seam: i, t: 0.0 }, s.spheres, &s.circle, 0.0, TAU)),
            )
            .collect();
        let per_arc: Vec<(usize, Vec<BlockingWitness>)> = arcs
            .par_iter()
            .map(|&(stratum, spheres, circle, start, sweep)| {
                let centers = [&self.body.centers[spheres[0]], &self.body.centers[spheres[1]]];
                let closed = matches!(stratum, Stratum::Seam { .. });
                let params = arc_candidates(centers, circle, start, sweep, frame, closed);
                let mut found = Vec::new();
                for &s in &params {
                    let z = circle.at(start + s * sweep);
                    let gens = vec![centers[0] - &z, centers[1] - &z];
                    if !frame_misses(&gens, frame, eps) {
                        let stratum = match stratum {
                            Stratum::Edge { edge, .. } => Stratum::Edge { edge, s },
                            Stratum::Seam { seam, .. } => Stratum::Seam { seam, t: s * sweep },
                            v => v,
                        };
                        found.push(BlockingWitness {
                            stratum,
                            point: z,
                            generators: gens,
                        });
                    }
                }
                (params.len(), found)
            })
            .collect();
        for (n, found) in per_arc {
            points_checked += n;
            witnesses.extend(found);
        }
        IlluminationVerdict {
            illuminated: witnesses.is_empty(),
            witnesses,
            points_checked,
        }
    }
}

/// Arc fractions at which the sign pattern of both generators against the
/// frame is tested: every sign change in the open arc plus one point inside
/// each interval between consecutive changes.
///
/// Along the circle `z(t) = c + rho (cos t f0 + sin t f1)` the value
/// `<x - z(t), a> = <x - c, a> - rho <f0, a> cos t - rho <f1, a> sin t`
/// vanishes for at most two `t`, so the pattern is constant between the
/// collected roots.
fn arc_candidates(centers: [&Point; 2], circle: &Circle3, start: f64, sweep: f64, frame: &Frame, closed: bool) -> Vec<f64> {
    let mut roots = Vec::new();
    for a in frame.axes() {
        let q = circle.radius * circle.frame[0].dot(a);
        let r = circle.radius * circle.frame[1].dot(a);
        let amp = q.hypot(r);
        if amp == 0.0 {
            continue;
        }
        let phi = r.atan2(q);
        for x in centers {
            let p = (x - &circle.center).dot(a);
            if p.abs() > amp {
                continue;
            }
            let delta = (p / amp).acos();
            for t in [phi + delta, phi - delta] {
                let s = (t - start).rem_euclid(TAU) / sweep;
                if s > 0.0 && s < 1.0 {
                    roots.push(s);
                }
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    let mut out = Vec::with_capacity(2 * roots.len() + 1);
    let mut prev = 0.0;
    for &s in &roots {
        out.push((prev + s) / 2.0);
        out.push(s);
        prev = s;
    }
    if closed && !roots.is_empty() {
        out.push((prev + 1.0 + roots[0]) / 2.0 % 1.0);
    } else {
        out.push((prev + 1.0) / 2.0);
    }
    out
}

/// Decides whether the six directions `±u, ±v, ±w` illuminate `B[X]`.
///
/// Face points always pass: a unit generator `g` has
/// `max(|<g,u>|, |<g,v>|, |<g,w>|) >= 1/sqrt(3)`, so no single generator lies
/// on all three great circles. Vertices and edge points are tested exactly.
pub fn illuminates_frame(x: &[Point], frame: &Frame, tol: &Tolerance) -> Result<IlluminationVerdict> {
    let frame = Frame::new(frame.u.clone(), frame.v.clone(), frame.w.clone(), tol)?;
    Ok(Illuminator::new(x, tol)?.check(&frame))
}

/// Result of [`find_frame`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSearch {
    pub frame: Frame,
    /// Rotation angle about `u` of the accepted frame.
    pub angle: f64,
    /// Angles tried and rejected, in order.
    pub blocked_angles: Vec<f64>,
}

/// A unit vector orthogonal to `u`.
fn orthogonal_unit(u: &Point) -> Point {
    let k = (0..3).min_by(|&i, &j| u[i].abs().total_cmp(&u[j].abs())).unwrap_or(0);
    let mut e = point(&[0.0, 0.0, 0.0]);
    e[k] = 1.0;
    (&e - u * u.dot(&e)).normalize()
}

/// Largest gap midpoint of the circle `[0, pi/2)` with respect to `blocked`.
fn farthest_angle(blocked: &[f64]) -> f64 {
    let mut sorted = blocked.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best = (0.0, 0.0);
    for (k, &a) in sorted.iter().enumerate() {
        let b = if k + 1 == sorted.len() {
            sorted[0] + FRAC_PI_2
        } else {
            sorted[k + 1]
        };
        if b - a > best.0 {
            best = (b - a, (a + (b - a) / 2.0) % FRAC_PI_2);
        }
    }
    best.1
}

/// Completes the unit vector `u` to an orthogonal frame whose six directions
/// illuminate `B[X]`, rotating `(v, w)` about `u`.
///
/// Rotations are taken modulo `pi/2`, which swaps the roles of `±v` and
/// `±w`. Each rejected angle is recorded and the next one is the midpoint
/// of the largest gap between rejected angles.
pub fn find_frame(x: &[Point], u: &Point, tol: &Tolerance) -> Result<FrameSearch> {
    if u.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: u.len(),
        });
    }
    if (u.norm() - 1.0).abs() > tol.eps_geom {
        return Err(Error::InvalidInput(format!("u has norm {}", u.norm())));
    }
    let ill = Illuminator::new(x, tol)?;
    let v = orthogonal_unit(u);
    let base = Frame {
        u: u.clone(),
        w: cross(u, &v),
        v,
    };
    let mut blocked = Vec::new();
    let mut angle = 0.0;
    for _ in 0..FRAME_SWEEP_LIMIT {
        let frame = base.rotated_about_u(angle);
        if ill.check(&frame).illuminated {
            return Ok(FrameSearch {
                frame,
                angle,
                blocked_angles: blocked,
            });
        }
        blocked.push(angle);
        angle = farthest_angle(&blocked);
    }
    Err(Error::TheoremViolation(format!(
        "no illuminating frame about u after {FRAME_SWEEP_LIMIT} angles"
    )))
}

/// A frame that failed to illuminate, with the point set and the blocked points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub points: Vec<Point>,
    pub frame: Frame,
    pub witnesses: Vec<BlockingWitness>,
}

/// Result of [`random_frame_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameExperiment {
    pub trials: usize,
    pub successes: usize,
    pub ratio: f64,
    pub counterexamples: Vec<Counterexample>,
}

/// Tests `trials` uniformly random frames; trial `i` draws its frame from
/// stream `i` of the seeded generator.
pub fn random_frame_experiment(x: &[Point], trials: usize, seed: u64, tol: &Tolerance) -> Result<FrameExperiment> {
    if trials == 0 {
        return Err(Error::OutOfRange("at least one trial is required".into()));
    }
    let ill = Illuminator::new(x, tol)?;
    let outcomes: Vec<Option<Counterexample>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let frame = Frame::haar(&mut trial_rng(seed, i));
            let verdict = ill.check(&frame);
            (!verdict.illuminated).then(|| Counterexample {
                points: x.to_vec(),
                frame,
                witnesses: verdict.witnesses,
            })
        })
        .collect();
    let counterexamples: Vec<Counterexample> = outcomes.into_iter().flatten().collect();
    let successes = trials - counterexamples.len();
    Ok(FrameExperiment {
        trials,
        successes,
        ratio: successes as f64 / trials as f64,
        counterexamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::in_ball_intersection;
    use nalgebra::Vector3;
    use proptest::prelude::*;
    use proptest::test_runner::{Config, RngSeed};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn pair() -> Vec<Point> {
        vec![point(&[0.0, 0.0, 0.0]), point(&[1.0, 0.0, 0.0])]
    }

    fn reuleaux() -> Vec<Point> {
        let h = 3f64.sqrt() / 2.0;
        vec![point(&[0.0, 0.0, 0.0]), point(&[1.0, 0.0, 0.0]), point(&[0.5, h, 0.0])]
    }

    /// Three unit vectors at the midpoints of the quarter arcs between the
    /// coordinate axes; pairwise they are `pi/3` apart.
    fn quarter_midpoints() -> Vec<Point> {
        let s = FRAC_1_SQRT_2;
        vec![point(&[s, s, 0.0]), point(&[0.0, s, s]), point(&[s, 0.0, s])]
    }

    fn random_set(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
        (0..n)
            .map(|_| loop {
                let p = point(&[0, 1, 2].map(|_| rng.random_range(-0.5..0.5)));
                if p.norm() <= 0.5 {
                    break p;
                }
            })
            .collect()
    }

    fn rotation(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
        let f = Frame::haar(rng);
        Matrix3::from_columns(&[
            Vector3::new(f.u[0], f.u[1], f.u[2]),
            Vector3::new(f.v[0], f.v[1], f.v[2]),
            Vector3::new(f.w[0], f.w[1], f.w[2]),
        ])
    }

    fn rotate(q: &Matrix3<f64>, x: &[Point]) -> Vec<Point> {
        x.iter()
            .map(|p| point((q * Vector3::new(p[0], p[1], p[2])).as_slice()))
            .collect()
    }

    #[test]
    fn gauss_image_of_a_ball_is_one_point() {
        let z = point(&[0.6, 0.0, 0.8]);
        let g = gauss_image(&[point(&[0.0, 0.0, 0.0])], &z, &tol()).unwrap();
        assert_eq!(g.tag, StratumTag::FacePoint);
        assert_eq!(g.generators, vec![-z]);
        assert_eq!(g.diameter, 0.0);
    }

    #[test]
    fn gauss_image_at_a_seam_point_spans_pi_over_three() {
        let h = 3f64.sqrt() / 2.0;
        let z = point(&[0.5, h, 0.0]);
        let g = gauss_image(&pair(), &z, &tol()).unwrap();
        assert_eq!(g.tag, StratumTag::EdgePoint);
        assert!((g.diameter - FRAC_PI_3).abs() < 1e-12);
    }

    #[test]
    fn gauss_images_of_the_reuleaux_triple() {
        let x = reuleaux();
        let body = boundary_structure(&x, &tol()).unwrap();
        assert_eq!(body.vertices.len(), 2);
        let height = (1.0 - 1.0 / 3.0f64).sqrt();
        for v in &body.vertices {
            assert!((v.point[2].abs() - height).abs() < 1e-12);
            let g = gauss_image(&x, &v.point, &tol()).unwrap();
            assert_eq!(g.tag, StratumTag::Vertex);
            assert_eq!(g.generators.len(), 3);
            let expected = (1.0 - 0.5f64).acos();
            assert!((g.diameter - expected).abs() < 1e-9 && g.diameter <= FRAC_PI_3 + 1e-9);
        }
    }

    #[test]
    fn gauss_image_preconditions() {
        let t = tol();
        let interior = gauss_image(&pair(), &point(&[0.5, 0.0, 0.0]), &t);
        assert!(matches!(interior, Err(Error::NotOnBoundary { .. })));
        let wide = gauss_image(&[point(&[0.0, 0.0, 0.0]), point(&[1.5, 0.0, 0.0])], &point(&[0.75, 0.0, 0.0]), &t);
        assert!(matches!(wide, Err(Error::Precondition(_))));
    }

    #[test]
    fn frames_validate_and_haar_frames_are_orthonormal() {
        let t = tol();
        assert!(Frame::new(point(&[1.0, 0.0, 0.0]), point(&[1.0, 0.0, 0.0]), point(&[0.0, 0.0, 1.0]), &t).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let f = Frame::haar(&mut rng);
            assert!(Frame::new(f.u.clone(), f.v.clone(), f.w.clone(), &t).is_ok());
            assert!((cross(&f.u, &f.v).dot(&f.w) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn a_ball_is_illuminated_by_every_frame() {
        let x = vec![point(&[0.0, 0.0, 0.0])];
        let v = illuminates_frame(&x, &Frame::standard(), &tol()).unwrap();
        assert!(v.illuminated);
        let search = find_frame(&x, &point(&[0.0, 0.0, 1.0]), &tol()).unwrap();
        assert!(search.blocked_angles.is_empty());
        let exp = random_frame_experiment(&x, 100, 1, &tol()).unwrap();
        assert_eq!(exp.ratio, 1.0);
    }

    #[test]
    fn quarter_arc_triangle_blocks_the_standard_frame() {
        let x = quarter_midpoints();
        for (a, b) in x.iter().tuple_combinations() {
            assert!(((a - b).norm() - 1.0).abs() < 1e-15);
        }
        let v = illuminates_frame(&x, &Frame::standard(), &tol()).unwrap();
        assert!(!v.illuminated);
        let at_origin = v
            .witnesses
            .iter()
            .find(|w| matches!(w.stratum, Stratum::Vertex { .. }) && w.point.norm() < 1e-12)
            .expect("the origin is a blocked vertex");
        assert_eq!(at_origin.generators.len(), 3);
        assert!((max_angle(&at_origin.generators) - FRAC_PI_3).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            assert!(illuminates_frame(&x, &Frame::haar(&mut rng), &tol()).unwrap().illuminated);
        }
    }

    #[test]
    fn two_points_resist_aligned_frames() {
        let x = pair();
        let t = tol();
        let ill = Illuminator::new(&x, &t).unwrap();
        assert_eq!(ill.body.seams.len(), 1);
        let base = Frame::standard();
        for k in 0..360 {
            let a = k as f64 * TAU / 360.0;
            let tilt = Frame {
                u: base.u.clone(),
                v: base.v.clone(),
                w: base.w.clone(),
            }
            .rotated_about_u(a);
            assert!(ill.check(&tilt).illuminated, "angle {a}");
        }
        let exp = random_frame_experiment(&x, 500, 7, &t).unwrap();
        assert_eq!(exp.ratio, 1.0);
    }

    #[test]
    fn reuleaux_frame_about_the_plane_normal() {
        let x = reuleaux();
        let t = tol();
        let search = find_frame(&x, &point(&[0.0, 0.0, 1.0]), &t).unwrap();
        assert!(illuminates_frame(&x, &search.frame, &t).unwrap().illuminated);
    }

    #[test]
    fn random_twenty_point_sets_admit_frames_quickly() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let t = tol();
        for _ in 0..4 {
            let x = random_set(&mut rng, 20);
            let u = Frame::haar(&mut rng).u;
            let search = find_frame(&x, &u, &t).unwrap();
            assert!(search.blocked_angles.len() < FRAME_SWEEP_LIMIT);
            assert!(illuminates_frame(&x, &search.frame, &t).unwrap().illuminated);
        }
    }

    #[test]
    fn random_ten_point_set_probability_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let x = random_set(&mut rng, 10);
        let exp = random_frame_experiment(&x, 500, 99, &tol()).unwrap();
        assert_eq!(exp.ratio, 1.0, "{:?}", exp.counterexamples.first());
        assert!(exp.counterexamples.is_empty());
    }

    #[test]
    fn arc_candidates_isolate_every_sign_change() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_set(&mut rng, 8);
        let ill = Illuminator::new(&x, &tol()).unwrap();
        let frame = Frame::haar(&mut rng);
        for e in &ill.body.edges {
            let centers = [&ill.body.centers[e.spheres[0]], &ill.body.centers[e.spheres[1]]];
            let params = arc_candidates(centers, &e.circle, e.start, e.sweep, &frame, false);
            let roots: Vec<f64> = params.iter().skip(1).step_by(2).copied().collect();
            let sign = |s: f64| -> Vec<bool> {
                let z = &e.point_at(s);
                frame
                    .axes()
                    .iter()
                    .flat_map(|a| centers.iter().map(move |c| (*c - z).dot(a) > 0.0))
                    .collect::<Vec<_>>()
            };
            let mut changes = 0;
            let n = 4000;
            for k in 0..n {
                let (s0, s1) = (k as f64 / n as f64, (k + 1) as f64 / n as f64);
                let (a, b) = (sign(s0.max(1e-9)), sign(s1.min(1.0 - 1e-9)));
                changes += a.iter().zip(&b).filter(|(p, q)| p != q).count();
            }
            assert!(roots.len() >= changes, "{} roots, {changes} sampled sign changes", roots.len());
        }
    }

    #[test]
    fn ray_definition_agrees_at_face_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let t = tol();
        let x = random_set(&mut rng, 6);
        let frame = Frame::haar(&mut rng);
        let m = x.iter().fold(point(&[0.0, 0.0, 0.0]), |acc, p| acc + p) / x.len() as f64;
        let mut checked = 0;
        while checked < 100 {
            let dir = point(&[0, 1, 2].map(|_| rng.sample::<f64, _>(StandardNormal))).normalize();
            let exit = x
                .iter()
                .map(|c| {
                    let b = (&m - c).dot(&dir);
                    let cc = (&m - c).norm_squared() - 1.0;
                    -b + (b * b - cc).sqrt()
                })
                .fold(f64::INFINITY, f64::min);
            let z = &m + &dir * exit;
            let g = gauss_image(&x, &z, &t).unwrap();
            if g.tag != StratumTag::FacePoint {
                continue;
            }
            checked += 1;
            for a in frame.axes() {
                let d = g.generators[0].dot(a);
                let step = 1e-3 * d.abs();
                let enters = |s: f64| in_ball_intersection(&x, 1.0, &(&z + a * s), false, &t);
                let illuminated = enters(step) || enters(-step);
                assert_eq!(illuminated, misses(&g.generators, a, t.eps_geom), "d = {d}");
            }
            assert!(frame_misses(&g.generators, &frame, t.eps_geom));
        }
    }

    #[test]
    fn farthest_angle_splits_the_largest_gap() {
        assert!((farthest_angle(&[0.0]) - FRAC_PI_2 / 2.0).abs() < 1e-15);
        assert!((farthest_angle(&[0.0, FRAC_PI_2 / 2.0]) - FRAC_PI_2 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn counterexamples_serialize() {
        let x = quarter_midpoints();
        let v = illuminates_frame(&x, &Frame::standard(), &tol()).unwrap();
        let c = Counterexample {
            points: x,
            frame: Frame::standard(),
            witnesses: v.witnesses,
        };
        let s = serde_json::to_string(&c).unwrap();
        let back: Counterexample = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }

    proptest! {
        #![proptest_config(Config {
            cases: 24,
            rng_seed: RngSeed::Fixed(41),
            ..Config::default()
        })]

        #[test]
        fn gauss_images_stay_within_pi_over_three(seed in any::<u64>(), n in 3usize..9) {
            let t = tol();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_set(&mut rng, n);
            let ill = Illuminator::new(&x, &t).unwrap();
            for v in &ill.body.vertices {
                let g = gauss_image(&x, &v.point, &t).unwrap();
                prop_assert!(g.diameter <= FRAC_PI_3 + 1e-9);
            }
            for e in &ill.body.edges {
                let g = gauss_image(&x, &e.midpoint(), &t).unwrap();
                prop_assert_eq!(g.tag, StratumTag::EdgePoint);
                prop_assert!(g.diameter <= FRAC_PI_3 + 1e-9);
            }
        }

        #[test]
        fn verdicts_are_rotation_covariant(seed in any::<u64>(), n in 1usize..8) {
            let t = tol();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_set(&mut rng, n);
            let frame = Frame::haar(&mut rng);
            let q = rotation(&mut rng);
            let before = illuminates_frame(&x, &frame, &t).unwrap();
            let after = illuminates_frame(&rotate(&q, &x), &frame.transformed(&q), &t).unwrap();
            prop_assert_eq!(before.illuminated, after.illuminated);
            prop_assert!(before.illuminated);
        }

        #[test]
        fn found_frames_certify_themselves(seed in any::<u64>(), n in 1usize..10) {
            let t = tol();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_set(&mut rng, n);
            let u = Frame::haar(&mut rng).u;
            let search = find_frame(&x, &u, &t).unwrap();
            prop_assert!((search.frame.u.clone() - u).norm() < 1e-15);
            prop_assert!(illuminates_frame(&x, &search.frame, &t).unwrap().illuminated);
        }
    }
}
