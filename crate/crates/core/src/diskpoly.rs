//! Disk-polygons (intersections of finitely many unit disks): construction
//! with reduced generating families, perimeter and area, regular inscribed
//! and circumscribed families with closed-form measures, numerical extremal
//! searches and Dowker-type inequality tables.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{check_points, circumball, in_ball_intersection, polar, Point, Tolerance};

/// A nondegenerate disk-polygon `B[X]` in the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskPolygon {
    /// Reduced generating family.
    pub centers: Vec<Point>,
    /// Index of each reduced center in the input.
    pub center_indices: Vec<usize>,
    /// Vertices in counterclockwise order; empty for a single disk.
    pub vertices: Vec<Point>,
    /// For the edge from `vertices[k]` to `vertices[k+1]`, the index into
    /// `centers` of the circle carrying it.
    pub edges: Vec<usize>,
}

/// Degenerate intersections of unit disks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DegenerateDisks {
    /// Circumradius above one.
    Empty,
    /// Circumradius equal to one: the intersection is the circumcenter.
    Point(Point),
    /// No disks at all: the intersection is the whole plane.
    FullDiskFamily,
}

/// Result of [`build_disk_polygon`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DiskPolygonOutcome {
    Polygon(DiskPolygon),
    Degenerate(DegenerateDisks),
}

/// Perimeter and area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measures {
    pub perimeter: f64,
    pub area: f64,
}

fn angle_of(v: &Point) -> f64 {
    v[1].atan2(v[0])
}

fn ccw_angle(u: &Point, v: &Point) -> f64 {
    (angle_of(v) - angle_of(u)).rem_euclid(TAU)
}

/// Area of the unit-circle segment cut off by a chord of length `c <= 2`.
pub fn segment_area(c: f64) -> f64 {
    let c = c.clamp(0.0, 2.0);
    (c / 2.0).asin() - c / 4.0 * (4.0 - c * c).sqrt()
}

/// The two intersection points of the unit circles around `p` and `q`
/// (`|p - q| < 2`), the first on the left of `p -> q`.
fn unit_circle_crossings(p: &Point, q: &Point) -> Option<[Point; 2]> {
    let v = q - p;
    let d = v.norm();
    if d <= 0.0 || d >= 2.0 {
        return None;
    }
    let mid = p + &v * 0.5;
    let h = (1.0 - d * d / 4.0).sqrt();
    let perp = Point::from_vec(vec![-v[1], v[0]]) / d;
    Some([&mid + &perp * h, mid - perp * h])
}

impl DiskPolygon {
    /// Counterclockwise arc angle of every edge (a full turn for one disk).
    pub fn arc_angles(&self) -> Vec<f64> {
        if self.vertices.is_empty() {
            return vec![TAU];
        }
        let k = self.vertices.len();
        (0..k)
            .map(|i| {
                let c = &self.centers[self.edges[i]];
                ccw_angle(&(&self.vertices[i] - c), &(&self.vertices[(i + 1) % k] - c))
            })
            .collect()
    }

    /// Perimeter as the sum of arc lengths; area as the area of the
    /// underlying polygon plus the circular segments over its sides.
    pub fn measure(&self) -> Measures {
        if self.vertices.is_empty() {
            return Measures { perimeter: TAU, area: PI };
        }
        let k = self.vertices.len();
        let perimeter = self.arc_angles().iter().sum();
        let mut area = 0.0;
        for i in 0..k {
            let p = &self.vertices[i];
            let q = &self.vertices[(i + 1) % k];
            area += 0.5 * (p[0] * q[1] - q[0] * p[1]);
            area += segment_area((q - p).norm());
        }
        Measures { perimeter, area }
    }

    /// Membership in the disk-polygon.
    pub fn contains(&self, p: &Point, tol: &Tolerance) -> bool {
        in_ball_intersection(&self.centers, 1.0, p, true, tol)
    }

    /// Sum of the arc angles and the exterior angles at the vertices, which
    /// equals a full turn for a consistent boundary.
    pub fn total_turning(&self) -> f64 {
        if self.vertices.is_empty() {
            return TAU;
        }
        let k = self.vertices.len();
        let mut total: f64 = self.arc_angles().iter().sum();
        for i in 0..k {
            let v = &self.vertices[i];
            let incoming = &self.centers[self.edges[(i + k - 1) % k]];
            let outgoing = &self.centers[self.edges[i]];
            // Tangent directions are the radius directions turned by +90 degrees.
            let tin = v - incoming;
            let tout = v - outgoing;
            let turn = ccw_angle(&tin, &tout);
            total += if turn > PI { turn - TAU } else { turn };
        }
        total
    }

    /// Support function `h(u) = max <x, u>` over the disk-polygon. An arc
    /// contributes `<c, u> + 1` when `u` lies in its range of outward
    /// normals; otherwise the maximum sits at a vertex.
    pub fn support(&self, u: &Point) -> f64 {
        if self.vertices.is_empty() {
            return self.centers[0].dot(u) + u.norm();
        }
        let k = self.vertices.len();
        let mut best = self.vertices.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max);
        for i in 0..k {
            let c = &self.centers[self.edges[i]];
            let from = &self.vertices[i] - c;
            let to = &self.vertices[(i + 1) % k] - c;
            if ccw_angle(&from, u) <= ccw_angle(&from, &to) {
                best = best.max(c.dot(u) + u.norm());
            }
        }
        best
    }

    /// Width `h(u) + h(-u)` in the direction of angle `theta`.
    pub fn width_at(&self, theta: f64) -> f64 {
        let u = polar(1.0, theta);
        self.support(&u) + self.support(&(-&u))
    }

    /// Minimal width and diameter (the extremes of the width function).
    ///
    /// Between consecutive breakpoints (arc normal-range ends and their
    /// antipodes) the width is `<a - b, u>` plus a constant for two fixed
    /// pieces `a`, `b` among the vertices and arc centers, so its extremes
    /// lie at breakpoints or at `u = ±(a - b)/|a - b|`. Evaluating the width
    /// at all such angles is exact.
    pub fn width_and_diameter(&self) -> (f64, f64) {
        if self.vertices.is_empty() {
            return (2.0, 2.0);
        }
        let k = self.vertices.len();
        let mut angles = Vec::new();
        for i in 0..k {
            let c = &self.centers[self.edges[i]];
            angles.push(angle_of(&(&self.vertices[i] - c)));
        }
        let pieces: Vec<&Point> = self.vertices.iter().chain(self.centers.iter()).collect();
        for (a, b) in pieces.iter().enumerate().flat_map(|(i, a)| pieces[i + 1..].iter().map(move |b| (*a, *b))) {
            let d = a - b;
            if d.norm() > 1e-15 {
                angles.push(angle_of(&d));
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        // w(theta + pi) = w(theta), so antipodal candidates are covered.
        for t in angles {
            let w = self.width_at(t);
            lo = lo.min(w);
            hi = hi.max(w);
        }
        (lo, hi)
    }

    /// Farthest point of the disk-polygon from `z` and its distance.
    pub fn farthest_from(&self, z: &Point) -> (f64, Point) {
        if self.vertices.is_empty() {
            let c = &self.centers[0];
            let d = c - z;
            let dir = if d.norm() > 0.0 { d.normalize() } else { polar(1.0, 0.0) };
            return (d.norm() + 1.0, c + dir);
        }
        let k = self.vertices.len();
        let mut best = (f64::NEG_INFINITY, z.clone());
        for v in &self.vertices {
            let dist = (v - z).norm();
            if dist > best.0 {
                best = (dist, v.clone());
            }
        }
        for i in 0..k {
            let c = &self.centers[self.edges[i]];
            let d = c - z;
            if d.norm() == 0.0 {
                continue;
            }
            let dir = d.normalize();
            let from = &self.vertices[i] - c;
            let to = &self.vertices[(i + 1) % k] - c;
            if ccw_angle(&from, &dir) <= ccw_angle(&from, &to) && d.norm() + 1.0 > best.0 {
                best = (d.norm() + 1.0, c + dir);
            }
        }
        best
    }

    /// Radius and center of the smallest disk containing the disk-polygon.
    ///
    /// Starts from the smallest disk around the vertices and adds the
    /// farthest boundary point until every arc is covered.
    pub fn circumradius(&self, tol: &Tolerance) -> Result<(f64, Point)> {
        if self.vertices.is_empty() {
            return Ok((1.0, self.centers[0].clone()));
        }
        let mut pts = self.vertices.clone();
        for _ in 0..200 {
            let ball = circumball(&pts, tol)?.ball;
            let (far, p) = self.farthest_from(&ball.center);
            if far <= ball.radius + 1e-14 {
                return Ok((ball.radius, ball.center));
            }
            pts.push(p);
        }
        let ball = circumball(&pts, tol)?.ball;
        Ok((self.farthest_from(&ball.center).0, ball.center))
    }

    /// Standard disk-polygons have at least three disks in the reduced family.
    pub fn is_standard(&self) -> bool {
        self.centers.len() >= 3
    }
}

/// Intersection of the unit disks around `centers`.
///
/// Vertices are the pairwise crossings of the unit circles that lie in every
/// disk, merged when they coincide and sorted by angle about their mean. Each
/// edge is carried by the first circle through both endpoints whose
/// counterclockwise arc midpoint lies in every disk; the centers carrying
/// edges form the reduced family.
pub fn build_disk_polygon(centers: &[Point], tol: &Tolerance) -> Result<DiskPolygonOutcome> {
    if centers.is_empty() {
        return Ok(DiskPolygonOutcome::Degenerate(DegenerateDisks::FullDiskFamily));
    }
    if centers[0].len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: centers[0].len(),
        });
    }
    check_points(centers, 2)?;
    let cb = circumball(centers, tol)?;
    if cb.ball.radius > 1.0 + tol.eps_geom {
        return Ok(DiskPolygonOutcome::Degenerate(DegenerateDisks::Empty));
    }
    if (cb.ball.radius - 1.0).abs() <= tol.eps_geom {
        return Ok(DiskPolygonOutcome::Degenerate(DegenerateDisks::Point(cb.ball.center)));
    }
    let mut distinct: Vec<usize> = Vec::new();
    for (i, c) in centers.iter().enumerate() {
        if distinct.iter().all(|&j| (&centers[j] - c).norm() > tol.eps_geom) {
            distinct.push(i);
        }
    }
    if distinct.len() == 1 {
        return Ok(DiskPolygonOutcome::Polygon(DiskPolygon {
            centers: vec![centers[distinct[0]].clone()],
            center_indices: distinct,
            vertices: Vec::new(),
            edges: vec![0],
        }));
    }
    let pts: Vec<Point> = distinct.iter().map(|&i| centers[i].clone()).collect();
    let slack = Tolerance {
        eps_geom: 10.0 * tol.eps_geom,
        ..*tol
    };
    let merge = 1e-7;
    let mut vertices: Vec<Point> = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if let Some(cands) = unit_circle_crossings(&pts[i], &pts[j]) {
                for v in cands {
                    if in_ball_intersection(&pts, 1.0, &v, true, &slack) && vertices.iter().all(|w| (w - &v).norm() > merge) {
                        vertices.push(v);
                    }
                }
            }
        }
    }
    if vertices.len() < 2 {
        return Err(Error::Degenerate(format!(
            "{} boundary vertices found for {} disks",
            vertices.len(),
            pts.len()
        )));
    }
    let mean = vertices.iter().fold(Point::zeros(2), |acc, v| acc + v) / vertices.len() as f64;
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by(|&a, &b| {
        angle_of(&(&vertices[a] - &mean))
            .partial_cmp(&angle_of(&(&vertices[b] - &mean)))
            .unwrap()
            .then(a.cmp(&b))
    });
    let vertices: Vec<Point> = order.into_iter().map(|i| vertices[i].clone()).collect();
    let k = vertices.len();
    let on_circle = |c: &Point, v: &Point| ((v - c).norm() - 1.0).abs() <= 1e3 * tol.eps_geom.max(1e-12);
    let mut used: Vec<usize> = Vec::new();
    let mut edge_src: Vec<usize> = Vec::with_capacity(k);
    for i in 0..k {
        let (p, q) = (&vertices[i], &vertices[(i + 1) % k]);
        let carrier = (0..pts.len()).find(|&c| {
            let cc = &pts[c];
            if !on_circle(cc, p) || !on_circle(cc, q) {
                return false;
            }
            let a = angle_of(&(p - cc));
            let sweep = ccw_angle(&(p - cc), &(q - cc));
            let mid = cc + polar(1.0, a + sweep / 2.0);
            sweep < PI && in_ball_intersection(&pts, 1.0, &mid, true, &slack)
        });
        let c = carrier.ok_or_else(|| Error::Degenerate(format!("no circle carries edge {i}")))?;
        if !used.contains(&c) {
            used.push(c);
        }
        edge_src.push(c);
    }
    used.sort_unstable();
    let edges = edge_src
        .iter()
        .map(|c| used.iter().position(|u| u == c).expect("recorded"))
        .collect();
    Ok(DiskPolygonOutcome::Polygon(DiskPolygon {
        centers: used.iter().map(|&c| pts[c].clone()).collect(),
        center_indices: used.iter().map(|&c| distinct[c]).collect(),
        vertices,
        edges,
    }))
}

/// Closed polygonal chain of unit-circle arcs of length at most `pi`; may
/// self-intersect, so only the perimeter is measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirclePolygon {
    /// Vertices `x_0 .. x_{n-1}`; the chain closes back to `x_0`.
    pub vertices: Vec<Point>,
    /// For each edge, whether the arc center lies to the left of `x_i -> x_{i+1}`.
    pub center_left: Vec<bool>,
}

impl CirclePolygon {
    pub fn new(vertices: Vec<Point>, center_left: Vec<bool>) -> Result<Self> {
        let n = vertices.len();
        if n < 2 || center_left.len() != n {
            return Err(Error::InvalidInput("need at least two vertices and one arc choice per edge".into()));
        }
        check_points(&vertices, 2)?;
        for i in 0..n {
            let d = (&vertices[(i + 1) % n] - &vertices[i]).norm();
            if d > 2.0 {
                return Err(Error::DistanceTooLarge { distance: d });
            }
        }
        Ok(CirclePolygon { vertices, center_left })
    }

    /// Center of the unit circle carrying edge `i`.
    pub fn edge_center(&self, i: usize) -> Point {
        let n = self.vertices.len();
        let [left, right] = unit_circle_crossings(&self.vertices[i], &self.vertices[(i + 1) % n])
            .expect("consecutive vertices are distinct and within distance 2");
        if self.center_left[i] {
            left
        } else {
            right
        }
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| 2.0 * ((&self.vertices[(i + 1) % n] - &self.vertices[i]).norm() / 2.0).min(1.0).asin())
            .sum()
    }
}

/// Whether the polygon is inscribed in or circumscribed about the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    Inscribed,
    Circumscribed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    Perimeter,
    Area,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Max,
    Min,
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("circle radius {r} must lie in (0, 1)")))
    }
}

/// Perimeter and area contributed by one gap `theta` between consecutive
/// vertices of a disk-polygon inscribed in the circle of radius `r` around
/// the origin: the arc over the chord `2 r sin(theta/2)` and the triangle
/// with the origin plus the segment.
pub fn inscribed_gap(r: f64, theta: f64) -> Measures {
    let chord = 2.0 * r * (theta / 2.0).sin();
    Measures {
        perimeter: 2.0 * (chord / 2.0).asin(),
        area: 0.5 * r * r * theta.sin() + segment_area(chord),
    }
}

/// Perimeter and area contributed by one gap `gamma` between consecutive
/// tangency directions of a disk-polygon circumscribed about the circle of
/// radius `r`. With `rho = 1 - r`, the generating centers sit at distance
/// `rho` opposite their tangency points; the vertex over a half-gap `g` is at
/// distance `D = sqrt(1 - rho^2 sin^2 g) - rho cos g` from the origin and is
/// seen from the center at angle `beta = atan2(D sin g, D cos g + rho)` from
/// the tangency point. The area swept from the origin along that arc is
/// `(beta - rho sin beta) / 2`.
pub fn circumscribed_gap(r: f64, gamma: f64) -> Measures {
    let rho = 1.0 - r;
    let g = gamma / 2.0;
    let d = circumscribed_vertex_distance(r, g);
    let beta = (d * g.sin()).atan2(d * g.cos() + rho);
    Measures {
        perimeter: 2.0 * beta,
        area: beta - rho * beta.sin(),
    }
}

/// Distance from the origin to the vertex over the half-gap `g`.
pub fn circumscribed_vertex_distance(r: f64, g: f64) -> f64 {
    let rho = 1.0 - r;
    (1.0 - rho * rho * g.sin().powi(2)).sqrt() - rho * g.cos()
}

/// Closed-form measures of a family member described by its gaps.
pub fn family_measures(kind: FamilyKind, r: f64, gaps: &[f64]) -> Measures {
    let f = match kind {
        FamilyKind::Inscribed => inscribed_gap,
        FamilyKind::Circumscribed => circumscribed_gap,
    };
    gaps.iter().fold(Measures { perimeter: 0.0, area: 0.0 }, |acc, &g| {
        let m = f(r, g);
        Measures {
            perimeter: acc.perimeter + m.perimeter,
            area: acc.area + m.area,
        }
    })
}

/// Generating centers of a family member: for inscribed polygons the vertex
/// angles are the partial sums of the gaps and each edge circle is centered
/// on the bisector of its gap; for circumscribed polygons the tangency
/// directions are the partial sums and each center sits at distance `1 - r`
/// opposite its tangency point.
pub fn family_centers(kind: FamilyKind, r: f64, gaps: &[f64]) -> Vec<Point> {
    let mut start = 0.0;
    let mut out = Vec::with_capacity(gaps.len());
    for &g in gaps {
        match kind {
            FamilyKind::Inscribed => {
                let s = r * (g / 2.0).cos() - (1.0 - (r * (g / 2.0).sin()).powi(2)).sqrt();
                out.push(polar(s, start + g / 2.0));
            }
            FamilyKind::Circumscribed => out.push(polar(-(1.0 - r), start)),
        }
        start += g;
    }
    out
}

/// A family member with its closed-form measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub polygon: DiskPolygon,
    pub measures: Measures,
}

/// Builds the family member with the given gaps and checks that it has one
/// side per gap.
pub fn family_member(kind: FamilyKind, r: f64, gaps: &[f64], tol: &Tolerance) -> Result<FamilyMember> {
    check_radius(r)?;
    let n = gaps.len();
    if n < 3 {
        return Err(Error::OutOfRange(format!("need at least 3 sides, got {n}")));
    }
    let centers = family_centers(kind, r, gaps);
    let polygon = match build_disk_polygon(&centers, tol)? {
        DiskPolygonOutcome::Polygon(p) if p.vertices.len() == n && p.centers.len() == n => p,
        DiskPolygonOutcome::Polygon(p) => {
            return Err(Error::Degenerate(format!(
                "{} vertices and {} reduced disks instead of {n}",
                p.vertices.len(),
                p.centers.len()
            )))
        }
        DiskPolygonOutcome::Degenerate(d) => return Err(Error::Degenerate(format!("{d:?}"))),
    };
    Ok(FamilyMember {
        polygon,
        measures: family_measures(kind, r, gaps),
    })
}

/// The regular `n`-sided member.
pub fn regular_family(n: usize, r: f64, kind: FamilyKind, tol: &Tolerance) -> Result<FamilyMember> {
    family_member(kind, r, &vec![TAU / n as f64; n], tol)
}

/// Closed-form value of the regular `n`-sided member.
pub fn regular_value(kind: FamilyKind, quantity: Quantity, r: f64, n: usize) -> f64 {
    let m = family_measures(kind, r, &vec![TAU / n as f64; n]);
    match quantity {
        Quantity::Perimeter => m.perimeter,
        Quantity::Area => m.area,
    }
}

/// Best configuration found by [`extremal_search`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalResult {
    pub gaps: Vec<f64>,
    pub value: f64,
    /// `max_i |gap_i - 2 pi / n|`.
    pub deviation: f64,
    /// Closed-form value of the regular member.
    pub regular_value: f64,
}

/// Projection onto `{lo <= x_i <= hi, sum x = total}` by bisection on the
/// common shift.
fn project_capped_simplex(x: &[f64], lo: f64, hi: f64, total: f64) -> Vec<f64> {
    let sum_at = |shift: f64| x.iter().map(|v| (v - shift).clamp(lo, hi)).sum::<f64>();
    let (mut a, mut b) = (
        x.iter().cloned().fold(f64::INFINITY, f64::min) - hi,
        x.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - lo,
    );
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if sum_at(m) > total {
            a = m;
        } else {
            b = m;
        }
    }
    let shift = 0.5 * (a + b);
    x.iter().map(|v| (v - shift).clamp(lo, hi)).collect()
}

/// Number of random restarts of [`extremal_search`].
pub const EXTREMAL_RESTARTS: usize = 32;

/// Multi-start projected gradient search over the gap vectors
/// `{gap_i >= delta, gap_i <= pi - delta, sum = 2 pi}` for the extremal
/// member of a family. The objective is a sum of per-gap closed forms, so
/// the gradient is taken gap by gap with central differences.
pub fn extremal_search(
    n: usize,
    r: f64,
    kind: FamilyKind,
    quantity: Quantity,
    sense: Sense,
    seed: u64,
) -> Result<ExtremalResult> {
    check_radius(r)?;
    if n < 3 {
        return Err(Error::OutOfRange(format!("need at least 3 sides, got {n}")));
    }
    let gap_value = move |g: f64| -> f64 {
        let m = match kind {
            FamilyKind::Inscribed => inscribed_gap(r, g),
            FamilyKind::Circumscribed => circumscribed_gap(r, g),
        };
        let v = match quantity {
            Quantity::Perimeter => m.perimeter,
            Quantity::Area => m.area,
        };
        match sense {
            Sense::Max => v,
            Sense::Min => -v,
        }
    };
    let objective = |gaps: &[f64]| gaps.iter().map(|&g| gap_value(g)).sum::<f64>();
    let (lo, hi) = (1e-3, PI - 1e-3);
    let starts: Vec<Vec<f64>> = {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..EXTREMAL_RESTARTS)
            .map(|_| {
                let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.0)).collect();
                let s: f64 = raw.iter().sum();
                project_capped_simplex(&raw.iter().map(|v| v / s * TAU).collect::<Vec<_>>(), lo, hi, TAU)
            })
            .collect()
    };
    let runs: Vec<(f64, Vec<f64>)> = starts
        .into_par_iter()
        .map(|mut x| {
            let mut fx = objective(&x);
            let mut step = 0.5;
            for _ in 0..20_000 {
                let h = 1e-6;
                let grad: Vec<f64> = x.iter().map(|&g| (gap_value(g + h) - gap_value(g - h)) / (2.0 * h)).collect();
                let cand: Vec<f64> = x.iter().zip(&grad).map(|(v, d)| v + step * d).collect();
                let cand = project_capped_simplex(&cand, lo, hi, TAU);
                let fc = objective(&cand);
                if fc > fx {
                    let moved: f64 = cand.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    x = cand;
                    fx = fc;
                    step *= 1.2;
                    if moved < 1e-14 {
                        break;
                    }
                } else {
                    step *= 0.5;
                    if step < 1e-16 {
                        break;
                    }
                }
            }
            (fx, x)
        })
        .collect();
    let (best, gaps) = runs
        .into_iter()
        .reduce(|a, b| {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        })
        .expect("at least one restart");
    let value = match sense {
        Sense::Max => best,
        Sense::Min => -best,
    };
    let regular = TAU / n as f64;
    let deviation = gaps.iter().map(|g| (g - regular).abs()).fold(0.0, f64::max);
    Ok(ExtremalResult {
        gaps,
        value,
        deviation,
        regular_value: regular_value(kind, quantity, r, n),
    })
}

/// Standing of an inequality in a Dowker table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Theorem,
    Lemma,
    Conjecture,
}

/// One inequality `f(n-1) + f(n+1) <op> 2 f(n)` evaluated on regular
/// extremal values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DowkerRow {
    pub kind: FamilyKind,
    pub quantity: Quantity,
    pub n: usize,
    /// `f(n-1) + f(n+1)`.
    pub outer_sum: f64,
    /// `2 f(n)`.
    pub twice_middle: f64,
    /// True for `<` (concavity), false for `>` (convexity).
    pub concave: bool,
    pub holds: bool,
    pub status: Status,
}

/// Largest `n` accepted by [`dowker_table`].
pub const DOWKER_MAX_N: usize = 12;

/// Dowker-type inequalities for `n_min <= n <= n_max` on the regular
/// extremal values: inscribed perimeter (concave), inscribed area (concave;
/// proved for odd `n`, conjectured for even `n`), circumscribed area and
/// perimeter (convex).
pub fn dowker_table(r: f64, n_min: usize, n_max: usize) -> Result<Vec<DowkerRow>> {
    check_radius(r)?;
    if n_min < 4 {
        return Err(Error::OutOfRange(format!("n_min = {n_min} must be at least 4")));
    }
    if n_max > DOWKER_MAX_N || n_max < n_min {
        return Err(Error::OutOfRange(format!(
            "n_max = {n_max} must lie in [{n_min}, {DOWKER_MAX_N}]"
        )));
    }
    let families = [
        (FamilyKind::Inscribed, Quantity::Perimeter, true),
        (FamilyKind::Inscribed, Quantity::Area, true),
        (FamilyKind::Circumscribed, Quantity::Area, false),
        (FamilyKind::Circumscribed, Quantity::Perimeter, false),
    ];
    let mut rows = Vec::new();
    for (kind, quantity, concave) in families {
        for n in n_min..=n_max {
            let f = |m: usize| regular_value(kind, quantity, r, m);
            let outer_sum = f(n - 1) + f(n + 1);
            let twice_middle = 2.0 * f(n);
            let holds = if concave { outer_sum < twice_middle } else { outer_sum > twice_middle };
            let status = match (kind, quantity) {
                (FamilyKind::Inscribed, Quantity::Area) if n % 2 == 0 => Status::Conjecture,
                (FamilyKind::Inscribed, _) => Status::Lemma,
                _ => Status::Theorem,
            };
            rows.push(DowkerRow {
                kind,
                quantity,
                n,
                outer_sum,
                twice_middle,
                concave,
                holds,
                status,
            });
        }
    }
    Ok(rows)
}
