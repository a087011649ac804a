//! Three-dimensional ball-polyhedra: the boundary arrangement of an
//! intersection of unit balls, reduced generating families, standardness and
//! the face lattice, edge-graph checks, and the approximation of convex
//! polytopes with cyclic faces by intersections of large balls.
//!
//! Vertices are triple-sphere intersection points lying in every ball. A
//! point where more than three spheres meet to within
//! `CONCURRENCY_RATIO * eps_geom` is a single vertex of higher degree; a
//! fourth sphere passing farther than that but within `eps_geom` is a
//! near-tangency and is rejected with the offending spheres.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::f64::consts::{PI, TAU};

use itertools::Itertools;
use nalgebra::{DMatrix, DVector, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{check_points, circumball, in_ball_intersection, intersect_spheres, Point, Sphere, SubSphere, Tolerance};
use crate::hull::{Body, Objective};
use crate::qp::{solve_from, QpOutcome, QuadProgram};

/// Residual (relative to `eps_geom`) below which a sphere counts as passing
/// exactly through a vertex.
pub const CONCURRENCY_RATIO: f64 = 1e-3;

/// Largest number of vertices for which the brute-force connectivity checks
/// are run.
pub const MAX_GRAPH_VERTICES: usize = 400;

/// A circle in 3-space: `center + radius (cos t f0 + sin t f1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circle3 {
    pub center: Point,
    pub radius: f64,
    pub frame: [Point; 2],
}

impl Circle3 {
    pub fn at(&self, t: f64) -> Point {
        &self.center + (&self.frame[0] * t.cos() + &self.frame[1] * t.sin()) * self.radius
    }

    /// Unit tangent in the direction of increasing parameter.
    pub fn tangent(&self, t: f64) -> Point {
        &self.frame[1] * t.cos() - &self.frame[0] * t.sin()
    }

    /// Parameter of the point of the circle nearest to `p`, in `[0, 2pi)`.
    pub fn angle_of(&self, p: &Point) -> f64 {
        let d = p - &self.center;
        d.dot(&self.frame[1]).atan2(d.dot(&self.frame[0])).rem_euclid(TAU)
    }
}

/// A vertex with the generating spheres passing through it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex3 {
    pub point: Point,
    pub spheres: Vec<usize>,
}

/// A boundary arc on the circle shared by two generating spheres, running
/// from `ends[0]` at parameter `start` to `ends[1]` at `start + sweep`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge3 {
    pub spheres: [usize; 2],
    pub ends: [usize; 2],
    pub circle: Circle3,
    pub start: f64,
    pub sweep: f64,
}

impl Edge3 {
    pub fn point_at(&self, s: f64) -> Point {
        self.circle.at(self.start + s * self.sweep)
    }

    pub fn midpoint(&self) -> Point {
        self.point_at(0.5)
    }

    /// Unit tangent leaving the endpoint `end` along the arc.
    fn leaving_tangent(&self, end: usize) -> Point {
        if end == 0 {
            self.circle.tangent(self.start)
        } else {
            -self.circle.tangent(self.start + self.sweep)
        }
    }

    pub fn other_end(&self, v: usize) -> usize {
        if self.ends[0] == v {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }
}

/// A full circle of the boundary without vertices, shared by two spheres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seam {
    pub spheres: [usize; 2],
    pub circle: Circle3,
}

/// One connected piece of `sphere ∩ boundary`. Its boundary is either an
/// edge cycle (counter-clockwise seen from outside), a seam, or nothing
/// (the body is a single ball).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face3 {
    pub sphere: usize,
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
    pub seam: Option<usize>,
}

/// Boundary structure of `P = ⋂ B[c_i]` in 3-space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPolyhedron3 {
    /// Reduced generating centers.
    pub centers: Vec<Point>,
    /// Index of each reduced center in the input list.
    pub generators: Vec<usize>,
    pub vertices: Vec<Vertex3>,
    pub edges: Vec<Edge3>,
    pub seams: Vec<Seam>,
    pub faces: Vec<Face3>,
}

impl BallPolyhedron3 {
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.vertices.len(), self.edges.len(), self.faces.len())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn contains(&self, x: &Point, tol: &Tolerance) -> bool {
        in_ball_intersection(&self.centers, 1.0, x, true, tol)
    }

    /// Faces containing edge `e`.
    pub fn faces_of_edge(&self, e: usize) -> Vec<usize> {
        (0..self.faces.len()).filter(|&f| self.faces[f].edges.contains(&e)).collect()
    }

    /// The abstract edge graph with its geometric rotation system.
    pub fn edge_graph(&self) -> EdgeGraph {
        let mut rotation: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
        for (v, vert) in self.vertices.iter().enumerate() {
            let p = &vert.point;
            let mut normal = Vector3::zeros();
            for &s in &vert.spheres {
                normal += to3(&(p - &self.centers[s])).normalize();
            }
            let normal = normal.normalize();
            let seed = if normal.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
            let a = (seed - normal * normal.dot(&seed)).normalize();
            let b = normal.cross(&a);
            let mut around: Vec<(f64, usize)> = Vec::new();
            for (e, edge) in self.edges.iter().enumerate() {
                for end in 0..2 {
                    if edge.ends[end] == v {
                        let t = to3(&edge.leaving_tangent(end));
                        around.push((t.dot(&b).atan2(t.dot(&a)), e));
                    }
                }
            }
            around.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            rotation[v] = around.into_iter().map(|(_, e)| e).collect();
        }
        EdgeGraph {
            vertex_count: self.vertices.len(),
            edges: self.edges.iter().map(|e| (e.ends[0], e.ends[1])).collect(),
            rotation,
        }
    }
}

/// Abstract edge graph plus the cyclic order of edges around each vertex
/// (counter-clockwise seen from outside the body).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeGraph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub rotation: Vec<Vec<usize>>,
}

impl EdgeGraph {
    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(|(a, b)| a == b)
    }

    pub fn has_parallel_edges(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges
            .iter()
            .any(|&(a, b)| !seen.insert((a.min(b), a.max(b))))
    }

    pub fn is_simple(&self) -> bool {
        !self.has_loops() && !self.has_parallel_edges()
    }

    /// Connectivity of the graph after deleting the vertices in `removed`.
    fn connected_without(&self, removed: &[usize]) -> bool {
        let alive: Vec<usize> = (0..self.vertex_count).filter(|v| !removed.contains(v)).collect();
        let Some(&start) = alive.first() else {
            return true;
        };
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.vertex_count];
        for &(a, b) in &self.edges {
            if !removed.contains(&a) && !removed.contains(&b) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut seen = vec![false; self.vertex_count];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        reached == alive.len()
    }

    pub fn is_connected(&self) -> bool {
        self.connected_without(&[])
    }

    /// `k`-vertex-connectivity for `k <= 3` by brute-force deletion of every
    /// set of `k - 1` vertices.
    pub fn is_k_connected(&self, k: usize) -> bool {
        if self.vertex_count <= k {
            return false;
        }
        (0..self.vertex_count)
            .combinations(k - 1)
            .all(|removed| self.connected_without(&removed))
    }

    /// Faces of the embedding given by the rotation system, as edge lists.
    pub fn trace_faces(&self) -> Vec<Vec<usize>> {
        let darts = 2 * self.edges.len();
        let mut used = vec![false; darts];
        let mut faces = Vec::new();
        // Dart 2e runs from edges[e].0 to edges[e].1, dart 2e+1 backwards.
        let head = |d: usize| {
            let (a, b) = self.edges[d / 2];
            if d.is_multiple_of(2) {
                b
            } else {
                a
            }
        };
        for d0 in 0..darts {
            if used[d0] {
                continue;
            }
            let mut face = Vec::new();
            let mut d = d0;
            while !used[d] {
                used[d] = true;
                face.push(d / 2);
                let w = head(d);
                let rot = &self.rotation[w];
                let Some(pos) = rot.iter().position(|&e| e == d / 2) else {
                    break;
                };
                let next_edge = rot[(pos + 1) % rot.len()];
                let (a, _) = self.edges[next_edge];
                d = if a == w { 2 * next_edge } else { 2 * next_edge + 1 };
            }
            faces.push(face);
        }
        faces
    }
}

fn to3(p: &Point) -> Vector3<f64> {
    Vector3::new(p[0], p[1], p[2])
}

fn from3(v: &Vector3<f64>) -> Point {
    DVector::from_column_slice(v.as_slice())
}

fn check_family(centers: &[Point], tol: &Tolerance) -> Result<()> {
    if centers.is_empty() {
        return Err(Error::EmptyInput("ball centers"));
    }
    check_points(centers, 3)?;
    let crr = circumball(centers, tol)?.ball.radius;
    if crr > 1.0 + tol.eps_geom {
        return Err(Error::OutOfScope { crr });
    }
    Ok(())
}

/// Indices of a reduced sub-family with the same intersection.
///
/// Duplicates are dropped first. A ball is then removed when the
/// intersection of the remaining balls lies in it, which holds iff the
/// farthest point of that intersection from its center is at distance at
/// most one. Sequential removal keeps the intersection unchanged, and a
/// ball that survives against a larger family also survives against the
/// final one.
pub fn reduce_family_3d(centers: &[Point], tol: &Tolerance) -> Result<Vec<usize>> {
    check_family(centers, tol)?;
    let mut keep: Vec<usize> = Vec::new();
    for (i, c) in centers.iter().enumerate() {
        if keep.iter().all(|&j| (&centers[j] - c).norm() > tol.eps_geom) {
            keep.push(i);
        }
    }
    for i in keep.clone() {
        let others: Vec<Point> = keep.iter().filter(|&&j| j != i).map(|&j| centers[j].clone()).collect();
        if others.is_empty() {
            continue;
        }
        let body = Body::new(&others, tol)?;
        if let Some((d, _)) = body.optimize(Objective::MaxDistance(&centers[i])) {
            if d <= 1.0 + 10.0 * tol.eps_geom {
                keep.retain(|&j| j != i);
            }
        }
    }
    Ok(keep)
}

fn circle_of(center: Point, radius: f64, frame: &DMatrix<f64>) -> Circle3 {
    Circle3 {
        center,
        radius,
        frame: [frame.column(0).into_owned(), frame.column(1).into_owned()],
    }
}

fn others(centers: &[Point], skip: &[usize]) -> Vec<Point> {
    (0..centers.len()).filter(|i| !skip.contains(i)).map(|i| centers[i].clone()).collect()
}

/// Vertices of the boundary: merged triple points with their incident
/// spheres.
fn find_vertices(centers: &[Point], tol: &Tolerance) -> Result<Vec<Vertex3>> {
    type TriplePoints = Vec<(Point, Vec<usize>)>;
    let triples: Vec<Vec<usize>> = (0..centers.len()).combinations(3).collect();
    let raw: Vec<Result<TriplePoints>> = triples
        .par_iter()
        .map(|t| {
            let family: Vec<Sphere> = t.iter().map(|&i| Sphere::unit(centers[i].clone())).collect();
            let pts = match intersect_spheres(&family, tol)? {
                SubSphere::Empty => Vec::new(),
                SubSphere::Point(p) => vec![p],
                SubSphere::Sphere {
                    center,
                    radius,
                    frame,
                    intrinsic_dim: 0,
                } => {
                    let off = frame.column(0) * radius;
                    vec![&center + &off, center - off]
                }
                SubSphere::Sphere { .. } => {
                    return Err(Error::DegenerateConfiguration {
                        reason: "three spheres share a circle".into(),
                        spheres: t.clone(),
                    })
                }
            };
            let rest = others(centers, t);
            Ok(pts
                .into_iter()
                .filter(|p| in_ball_intersection(&rest, 1.0, p, true, tol))
                .map(|p| (p, t.clone()))
                .collect())
        })
        .collect();
    let mut clusters: Vec<(Point, Vec<usize>)> = Vec::new();
    for batch in raw {
        for (p, t) in batch? {
            match clusters.iter_mut().find(|(q, _)| (q - &p).norm() <= tol.eps_geom) {
                Some((_, seed)) => seed.extend(t),
                None => clusters.push((p, t)),
            }
        }
    }
    let exact = CONCURRENCY_RATIO * tol.eps_geom;
    let mut vertices = Vec::new();
    for (p, seed) in clusters {
        let mut spheres = Vec::new();
        for (l, c) in centers.iter().enumerate() {
            let residual = ((&p - c).norm() - 1.0).abs();
            if residual <= exact {
                spheres.push(l);
            } else if residual <= tol.eps_geom {
                let mut quad: Vec<usize> = seed.iter().copied().unique().take(3).collect();
                quad.push(l);
                return Err(Error::DegenerateConfiguration {
                    reason: format!("a fourth sphere passes within {residual:.3e} of a triple point"),
                    spheres: quad,
                });
            }
        }
        if spheres.len() < 3 {
            return Err(Error::DegenerateConfiguration {
                reason: "triple point is not resolved to the concurrency tolerance".into(),
                spheres: seed.into_iter().unique().collect(),
            });
        }
        vertices.push(Vertex3 { point: p, spheres });
    }
    Ok(vertices)
}

enum PairBoundary {
    None,
    Seam(Seam),
    Arcs(Vec<Edge3>),
}

fn pair_boundary(centers: &[Point], vertices: &[Vertex3], i: usize, j: usize, tol: &Tolerance) -> Result<PairBoundary> {
    let family = [Sphere::unit(centers[i].clone()), Sphere::unit(centers[j].clone())];
    let (center, radius, frame) = match intersect_spheres(&family, tol)? {
        SubSphere::Sphere {
            center, radius, frame, ..
        } => (center, radius, frame),
        SubSphere::Point(_) => {
            return Err(Error::DegenerateConfiguration {
                reason: "two generating spheres are tangent".into(),
                spheres: vec![i, j],
            })
        }
        SubSphere::Empty => return Ok(PairBoundary::None),
    };
    let circle = circle_of(center, radius, &frame);
    let rest = others(centers, &[i, j]);
    let on_circle: Vec<usize> = (0..vertices.len())
        .filter(|&v| vertices[v].spheres.contains(&i) && vertices[v].spheres.contains(&j))
        .collect();
    let inside = |p: &Point| in_ball_intersection(&rest, 1.0, p, true, tol);
    match on_circle.len() {
        0 => Ok(if inside(&circle.at(0.0)) {
            PairBoundary::Seam(Seam { spheres: [i, j], circle })
        } else {
            PairBoundary::None
        }),
        1 => {
            let t = circle.angle_of(&vertices[on_circle[0]].point);
            if inside(&circle.at(t + PI)) {
                Err(Error::DegenerateConfiguration {
                    reason: "boundary circle touches the rest of the body in a single vertex".into(),
                    spheres: vec![i, j],
                })
            } else {
                Ok(PairBoundary::None)
            }
        }
        _ => {
            let mut ordered: Vec<(f64, usize)> = on_circle
                .iter()
                .map(|&v| (circle.angle_of(&vertices[v].point), v))
                .collect();
            ordered.sort_by(|a, b| a.0.total_cmp(&b.0));
            let m = ordered.len();
            let mut arcs = Vec::new();
            for k in 0..m {
                let (t0, v0) = ordered[k];
                let (t1, v1) = ordered[(k + 1) % m];
                let sweep = if k + 1 == m { t1 + TAU - t0 } else { t1 - t0 };
                if inside(&circle.at(t0 + sweep / 2.0)) {
                    arcs.push(Edge3 {
                        spheres: [i, j],
                        ends: [v0, v1],
                        circle: circle.clone(),
                        start: t0,
                        sweep,
                    });
                }
            }
            Ok(PairBoundary::Arcs(arcs))
        }
    }
}

/// Splits the edges on sphere `s` into cycles and orients each one
/// counter-clockwise seen from outside.
fn face_cycles(centers: &[Point], vertices: &[Vertex3], edges: &[Edge3], s: usize) -> Result<Vec<Face3>> {
    let on: Vec<usize> = (0..edges.len()).filter(|&e| edges[e].spheres.contains(&s)).collect();
    let mut at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &e in &on {
        for v in edges[e].ends {
            at.entry(v).or_default().push(e);
        }
    }
    if let Some((v, _)) = at.iter().find(|(_, es)| es.len() != 2) {
        return Err(Error::TheoremViolation(format!(
            "vertex {v} does not meet exactly two edges of sphere {s}"
        )));
    }
    let mut used = BTreeSet::new();
    let mut faces = Vec::new();
    for &e0 in &on {
        if used.contains(&e0) {
            continue;
        }
        let mut cycle_edges = Vec::new();
        let mut cycle_vertices = Vec::new();
        let mut e = e0;
        let mut v = edges[e0].ends[0];
        while used.insert(e) {
            cycle_edges.push(e);
            cycle_vertices.push(v);
            v = edges[e].other_end(v);
            let pair = &at[&v];
            e = if pair[0] == e { pair[1] } else { pair[0] };
        }
        // Orientation from the polygon through vertices and arc midpoints.
        let c = to3(&centers[s]);
        let mut ring = Vec::new();
        for (k, &ed) in cycle_edges.iter().enumerate() {
            ring.push(to3(&vertices[cycle_vertices[k]].point) - c);
            ring.push(to3(&edges[ed].midpoint()) - c);
        }
        let axis: Vector3<f64> = ring.iter().sum();
        let mut turn = Vector3::zeros();
        for k in 0..ring.len() {
            turn += ring[k].cross(&ring[(k + 1) % ring.len()]);
        }
        if turn.dot(&axis) < 0.0 {
            cycle_edges.reverse();
            cycle_vertices.reverse();
            cycle_vertices.rotate_right(1);
        }
        faces.push(Face3 {
            sphere: s,
            edges: cycle_edges,
            vertices: cycle_vertices,
            seam: None,
        });
    }
    Ok(faces)
}

/// Vertices, edges, seams and faces of `⋂ B[c_i]`.
///
/// The family is reduced first; `generators` maps the stored centers back
/// to the input.
pub fn boundary_structure(centers: &[Point], tol: &Tolerance) -> Result<BallPolyhedron3> {
    let generators = reduce_family_3d(centers, tol)?;
    let reduced: Vec<Point> = generators.iter().map(|&i| centers[i].clone()).collect();
    if (circumball(&reduced, tol)?.ball.radius - 1.0).abs() <= tol.eps_geom {
        return Err(Error::DegenerateConfiguration {
            reason: "the intersection is a single point".into(),
            spheres: (0..reduced.len()).collect(),
        });
    }
    let vertices = find_vertices(&reduced, tol)?;
    let pairs: Vec<(usize, usize)> = (0..reduced.len()).tuple_combinations().collect();
    let results: Vec<Result<PairBoundary>> = pairs
        .par_iter()
        .map(|&(i, j)| pair_boundary(&reduced, &vertices, i, j, tol))
        .collect();
    let mut edges = Vec::new();
    let mut seams = Vec::new();
    for r in results {
        match r? {
            PairBoundary::None => {}
            PairBoundary::Seam(s) => seams.push(s),
            PairBoundary::Arcs(a) => edges.extend(a),
        }
    }
    let mut faces = Vec::new();
    for s in 0..reduced.len() {
        let mut own = face_cycles(&reduced, &vertices, &edges, s)?;
        for (k, seam) in seams.iter().enumerate() {
            if seam.spheres.contains(&s) {
                own.push(Face3 {
                    sphere: s,
                    edges: Vec::new(),
                    vertices: Vec::new(),
                    seam: Some(k),
                });
            }
        }
        if own.is_empty() {
            own.push(Face3 {
                sphere: s,
                edges: Vec::new(),
                vertices: Vec::new(),
                seam: None,
            });
        }
        faces.extend(own);
    }
    Ok(BallPolyhedron3 {
        centers: reduced,
        generators,
        vertices,
        edges,
        seams,
        faces,
    })
}

/// Element of the face lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeElement {
    Empty,
    Vertex(usize),
    Edge(usize),
    Face(usize),
    Body,
}

/// Faces of a ball-polyhedron ordered by inclusion, with `∅` and `P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceLattice {
    pub elements: Vec<LatticeElement>,
    /// `order[a][b]` iff element `a` is contained in element `b`.
    pub order: Vec<Vec<bool>>,
}

impl FaceLattice {
    pub fn new(p: &BallPolyhedron3) -> Self {
        let mut elements = vec![LatticeElement::Empty];
        elements.extend((0..p.vertices.len()).map(LatticeElement::Vertex));
        elements.extend((0..p.edges.len()).map(LatticeElement::Edge));
        elements.extend((0..p.faces.len()).map(LatticeElement::Face));
        elements.push(LatticeElement::Body);
        let vertex_in_face = |v: usize, f: usize| p.faces[f].vertices.contains(&v);
        let leq = |a: LatticeElement, b: LatticeElement| -> bool {
            use LatticeElement::*;
            match (a, b) {
                (Empty, _) | (_, Body) => true,
                (Vertex(v), Vertex(w)) => v == w,
                (Vertex(v), Edge(e)) => p.edges[e].ends.contains(&v),
                (Vertex(v), Face(f)) => vertex_in_face(v, f),
                (Edge(e), Edge(g)) => e == g,
                (Edge(e), Face(f)) => p.faces[f].edges.contains(&e),
                (Face(f), Face(g)) => f == g,
                _ => false,
            }
        };
        let order = elements
            .iter()
            .map(|&a| elements.iter().map(|&b| leq(a, b)).collect())
            .collect();
        FaceLattice { elements, order }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Greatest lower bound, if it exists.
    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        let lower: Vec<usize> = (0..self.len()).filter(|&x| self.order[x][a] && self.order[x][b]).collect();
        lower.iter().copied().find(|&x| lower.iter().all(|&y| self.order[y][x]))
    }

    /// Least upper bound, if it exists.
    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        let upper: Vec<usize> = (0..self.len()).filter(|&x| self.order[a][x] && self.order[b][x]).collect();
        upper.iter().copied().find(|&x| upper.iter().all(|&y| self.order[x][y]))
    }

    pub fn is_lattice(&self) -> bool {
        (0..self.len()).tuple_combinations().all(|(a, b)| self.meet(a, b).is_some() && self.join(a, b).is_some())
    }

    /// Minimal elements above `∅`.
    pub fn atoms(&self) -> Vec<usize> {
        (1..self.len())
            .filter(|&a| (1..self.len()).all(|x| x == a || !self.order[x][a]))
            .collect()
    }

    /// Every element other than `∅` is the join of the atoms below it.
    pub fn is_atomic(&self) -> bool {
        let atoms = self.atoms();
        (1..self.len()).all(|a| {
            let below: Vec<usize> = atoms.iter().copied().filter(|&x| self.order[x][a]).collect();
            let Some((&first, rest)) = below.split_first() else {
                return false;
            };
            let mut j = Some(first);
            for &x in rest {
                j = j.and_then(|y| self.join(y, x));
            }
            j == Some(a)
        })
    }
}

/// Why a body is not standard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NonStandardWitness {
    /// One ball: its sphere meets the body in the whole sphere.
    SingleBall,
    /// Two faces meet along a full circle without vertices.
    Seam { spheres: [usize; 2] },
    /// Two faces meet in more than one vertex or one edge.
    FacePair {
        faces: [usize; 2],
        edges: Vec<usize>,
        vertices: Vec<usize>,
    },
    /// Three spheres meet the body in two points.
    SphereTriple { spheres: [usize; 3], vertices: Vec<usize> },
    /// Fewer than four generating balls.
    TooFewBalls { count: usize },
}

/// Outcome of [`standardness_and_lattice`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Standardness {
    Standard(FaceLattice),
    NonStandard(NonStandardWitness),
}

impl Standardness {
    pub fn is_standard(&self) -> bool {
        matches!(self, Standardness::Standard(_))
    }
}

/// Decides standardness: every generating sphere meets the body in a
/// disk, two faces meet in nothing, one vertex or one edge, and three
/// spheres share at most one vertex. Standard bodies get their face lattice.
pub fn standardness_and_lattice(p: &BallPolyhedron3) -> Standardness {
    if p.centers.len() == 1 {
        return Standardness::NonStandard(NonStandardWitness::SingleBall);
    }
    if let Some(seam) = p.seams.first() {
        return Standardness::NonStandard(NonStandardWitness::Seam { spheres: seam.spheres });
    }
    for (f, g) in (0..p.faces.len()).tuple_combinations() {
        let edges: Vec<usize> = p.faces[f]
            .edges
            .iter()
            .copied()
            .filter(|e| p.faces[g].edges.contains(e))
            .collect();
        let vertices: Vec<usize> = p.faces[f]
            .vertices
            .iter()
            .copied()
            .filter(|v| p.faces[g].vertices.contains(v))
            .collect();
        let ok = match edges.as_slice() {
            [] => vertices.len() <= 1,
            [e] => vertices.iter().all(|v| p.edges[*e].ends.contains(v)),
            _ => false,
        };
        if !ok {
            return Standardness::NonStandard(NonStandardWitness::FacePair {
                faces: [f, g],
                edges,
                vertices,
            });
        }
    }
    for t in (0..p.centers.len()).combinations(3) {
        let shared: Vec<usize> = (0..p.vertices.len())
            .filter(|&v| t.iter().all(|s| p.vertices[v].spheres.contains(s)))
            .collect();
        if shared.len() >= 2 {
            return Standardness::NonStandard(NonStandardWitness::SphereTriple {
                spheres: [t[0], t[1], t[2]],
                vertices: shared,
            });
        }
    }
    if p.centers.len() < 4 {
        return Standardness::NonStandard(NonStandardWitness::TooFewBalls { count: p.centers.len() });
    }
    Standardness::Standard(FaceLattice::new(p))
}

/// Counts and edge-graph properties of a body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub chi: i64,
    pub simple: bool,
    pub connected: bool,
    /// Rotation-system faces satisfy Euler's relation on a connected graph.
    pub planar: bool,
    pub two_connected: bool,
    pub three_connected: bool,
    /// Number of faces traced from the rotation system.
    pub embedding_faces: usize,
    /// The traced faces coincide with the stored faces as edge sets.
    pub faces_match: bool,
    pub standard: bool,
}

impl GraphReport {
    fn all_hold(&self) -> bool {
        self.chi == 2 && self.simple && self.connected && self.planar && self.three_connected && self.faces_match
    }
}

/// Computes the report without judging it.
pub fn graph_report(p: &BallPolyhedron3) -> GraphReport {
    let g = p.edge_graph();
    let traced = g.trace_faces();
    let mut traced_sets: Vec<Vec<usize>> = traced.iter().map(|f| f.iter().copied().sorted().collect()).collect();
    let mut stored_sets: Vec<Vec<usize>> = p.faces.iter().map(|f| f.edges.iter().copied().sorted().collect()).collect();
    traced_sets.sort();
    stored_sets.sort();
    let connected = g.is_connected();
    let small = g.vertex_count <= MAX_GRAPH_VERTICES;
    let (v, e) = (p.vertices.len() as i64, p.edges.len() as i64);
    GraphReport {
        vertices: p.vertices.len(),
        edges: p.edges.len(),
        faces: p.faces.len(),
        chi: p.euler_characteristic(),
        simple: g.is_simple(),
        connected,
        planar: connected && v > 0 && v - e + traced.len() as i64 == 2,
        two_connected: small && g.is_k_connected(2),
        three_connected: small && g.is_simple() && g.is_k_connected(3),
        embedding_faces: traced.len(),
        faces_match: traced_sets == stored_sets,
        standard: standardness_and_lattice(p).is_standard(),
    }
}

/// Euler relation and edge-graph checks. On a standard body every check
/// must pass; a failure there is reported as [`Error::TheoremViolation`].
pub fn euler_and_graph_checks(p: &BallPolyhedron3) -> Result<GraphReport> {
    let report = graph_report(p);
    if report.standard && !report.all_hold() {
        return Err(Error::TheoremViolation(format!(
            "standard ball-polyhedron fails the edge-graph checks: {report:?}"
        )));
    }
    Ok(report)
}

/// A convex polytope given by vertices and face cycles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolytope {
    pub vertices: Vec<Point>,
    pub faces: Vec<Vec<usize>>,
}

impl ConvexPolytope {
    /// Axis-parallel cube `[-a, a]^3`.
    pub fn cube(a: f64) -> Self {
        let vertices = (0..8)
            .map(|m| {
                let s = |bit: usize| if m >> bit & 1 == 1 { a } else { -a };
                DVector::from_vec(vec![s(0), s(1), s(2)])
            })
            .collect();
        let faces = vec![
            vec![0, 2, 6, 4],
            vec![1, 5, 7, 3],
            vec![0, 4, 5, 1],
            vec![2, 3, 7, 6],
            vec![0, 1, 3, 2],
            vec![4, 6, 7, 5],
        ];
        ConvexPolytope { vertices, faces }
    }

    /// Regular octahedron with vertices `±a e_i`.
    pub fn octahedron(a: f64) -> Self {
        let mut vertices = Vec::new();
        for i in 0..3 {
            for s in [a, -a] {
                let mut v = DVector::zeros(3);
                v[i] = s;
                vertices.push(v);
            }
        }
        let mut faces = Vec::new();
        for (x, y, z) in itertools::iproduct!([0, 1], [2, 3], [4, 5]) {
            faces.push(vec![x, y, z]);
        }
        ConvexPolytope { vertices, faces }
    }

    /// Regular tetrahedron inscribed in the cube `[-a, a]^3`.
    pub fn tetrahedron(a: f64) -> Self {
        let v = |x: f64, y: f64, z: f64| DVector::from_vec(vec![a * x, a * y, a * z]);
        ConvexPolytope {
            vertices: vec![v(1.0, 1.0, 1.0), v(1.0, -1.0, -1.0), v(-1.0, 1.0, -1.0), v(-1.0, -1.0, 1.0)],
            faces: vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        }
    }

    pub fn centroid(&self) -> Point {
        self.vertices.iter().sum::<Point>() / self.vertices.len() as f64
    }

    /// Unordered vertex pairs that bound faces.
    pub fn edge_pairs(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for f in &self.faces {
            for k in 0..f.len() {
                let (a, b) = (f[k], f[(k + 1) % f.len()]);
                out.insert((a.min(b), a.max(b)));
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        if self.vertices.len() < 4 || self.faces.len() < 4 {
            return Err(Error::InvalidInput("a 3-polytope needs at least four vertices and faces".into()));
        }
        check_points(&self.vertices, 3)?;
        for f in &self.faces {
            if f.len() < 3 || f.iter().any(|&v| v >= self.vertices.len()) {
                return Err(Error::InvalidInput(format!("malformed face {f:?}")));
            }
        }
        Ok(())
    }
}

/// Circumcircle of a polytope face and its unit inner normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceCircle {
    pub center: Point,
    pub radius: f64,
    pub inner_normal: Point,
}

/// Circumcircles of all faces; fails with [`Error::NotCoCircular`] on a
/// face whose vertices are not on a common circle.
pub fn face_circles(poly: &ConvexPolytope, tol: &Tolerance) -> Result<Vec<FaceCircle>> {
    poly.validate()?;
    let inside = to3(&poly.centroid());
    let mut out = Vec::new();
    for (fi, f) in poly.faces.iter().enumerate() {
        let pts: Vec<Vector3<f64>> = f.iter().map(|&v| to3(&poly.vertices[v])).collect();
        let mut normal = Vector3::zeros();
        for k in 0..pts.len() {
            normal += pts[k].cross(&pts[(k + 1) % pts.len()]);
        }
        if normal.norm() == 0.0 {
            return Err(Error::NotCoCircular { face: fi });
        }
        let mut normal = normal.normalize();
        if normal.dot(&(inside - pts[0])) < 0.0 {
            normal = -normal;
        }
        let rows = pts.len();
        let a = DMatrix::from_fn(rows, 3, |r, c| if r + 1 < rows { 2.0 * (pts[r + 1][c] - pts[0][c]) } else { normal[c] });
        let b = DVector::from_fn(rows, |r, _| {
            if r + 1 < rows {
                pts[r + 1].norm_squared() - pts[0].norm_squared()
            } else {
                normal.dot(&pts[0])
            }
        });
        let q = a
            .svd(true, true)
            .solve(&b, 1e-14)
            .map_err(|_| Error::NotCoCircular { face: fi })?;
        let q = Vector3::new(q[0], q[1], q[2]);
        let radius = (pts[0] - q).norm();
        let scale = radius.max(1.0);
        let cocircular = pts
            .iter()
            .all(|p| ((p - q).norm() - radius).abs() <= tol.eps_geom * scale && normal.dot(&(p - q)).abs() <= tol.eps_geom * scale);
        if !cocircular {
            return Err(Error::NotCoCircular { face: fi });
        }
        out.push(FaceCircle {
            center: from3(&q),
            radius,
            inner_normal: from3(&normal),
        });
    }
    Ok(out)
}

/// Result of [`approximate_polyhedron`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Approximation {
    pub k: f64,
    /// `P_k`: the ball-polyhedron of radius `k` scaled down by `1/k`.
    pub body: BallPolyhedron3,
    /// Sampled Hausdorff distance between `k P_k` and the polytope.
    pub hausdorff: f64,
    pub standard: bool,
    pub lattice_isomorphic: bool,
}

/// Distance from `p` to the polytope `{x : <n_F, x> >= <n_F, q_F>}`.
fn polytope_distance(circles: &[FaceCircle], interior: &Point, p: &Point, tol: &Tolerance) -> Result<f64> {
    let m = circles.len();
    let a = DMatrix::from_fn(m, 3, |r, c| -circles[r].inner_normal[c]);
    let b = DVector::from_fn(m, |r, _| -circles[r].inner_normal.dot(&circles[r].center));
    let qp = QuadProgram {
        h: DMatrix::identity(3, 3) * 2.0,
        g: -2.0 * p,
        a,
        b,
    };
    match solve_from(&qp, interior.clone(), tol.eps_opt) {
        QpOutcome::Optimal(s) => Ok((&s.z - p).norm()),
        other => Err(Error::TheoremViolation(format!("projection onto a polytope failed: {other:?}"))),
    }
}

/// Boundary samples of a scaled body: vertices, points along every edge, and
/// a polar grid around the outward pole of every face.
fn boundary_samples(p: &BallPolyhedron3, pole_dirs: &[Point], cap: &[f64], tol: &Tolerance) -> Vec<Point> {
    let mut out: Vec<Point> = p.vertices.iter().map(|v| v.point.clone()).collect();
    for e in &p.edges {
        out.extend((1..8).map(|k| e.point_at(k as f64 / 8.0)));
    }
    for (s, c) in p.centers.iter().enumerate() {
        let pole = to3(&pole_dirs[s]);
        let seed = if pole.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let a = (seed - pole * pole.dot(&seed)).normalize();
        let b = pole.cross(&a);
        for ring in 0..=12 {
            let theta = cap[s] * ring as f64 / 12.0;
            let spokes = if ring == 0 { 1 } else { 24 };
            for k in 0..spokes {
                let phi = TAU * k as f64 / spokes as f64;
                let u = pole * theta.cos() + (a * phi.cos() + b * phi.sin()) * theta.sin();
                let x = c + from3(&u);
                if p.contains(&x, tol) {
                    out.push(x);
                }
            }
        }
    }
    out
}

/// Isomorphism of the body's face lattice with the polytope's, certified by
/// matching body vertices to scaled polytope vertices, faces to the
/// generating faces, and edges to vertex pairs.
fn lattice_matches(body: &BallPolyhedron3, poly: &ConvexPolytope, k: f64) -> bool {
    if body.vertices.len() != poly.vertices.len() || body.faces.len() != poly.faces.len() {
        return false;
    }
    let mut to_poly = Vec::new();
    for v in &body.vertices {
        let near = poly
            .vertices
            .iter()
            .position(|w| (w / k - &v.point).norm() <= 1e-7);
        match near {
            Some(i) if !to_poly.contains(&i) => to_poly.push(i),
            _ => return false,
        }
    }
    let body_pairs: BTreeSet<(usize, usize)> = body
        .edges
        .iter()
        .map(|e| {
            let (a, b) = (to_poly[e.ends[0]], to_poly[e.ends[1]]);
            (a.min(b), a.max(b))
        })
        .collect();
    if body_pairs.len() != body.edges.len() || body_pairs != poly.edge_pairs() {
        return false;
    }
    body.faces.iter().all(|f| {
        let face = body.generators[f.sphere];
        let mine: BTreeSet<usize> = f.vertices.iter().map(|&v| to_poly[v]).collect();
        let theirs: BTreeSet<usize> = poly.faces[face].iter().copied().collect();
        mine == theirs
    })
}

/// Builds `P_k' = ⋂_F B[c_F + sqrt(k² - r_F²) n_F, k]` for a polytope with
/// cyclic faces, rescales it to unit balls, and compares it with the
/// polytope.
pub fn approximate_polyhedron(poly: &ConvexPolytope, k: f64, tol: &Tolerance) -> Result<Approximation> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::OutOfRange(format!("scale k must be positive, got {k}")));
    }
    let circles = face_circles(poly, tol)?;
    let mut centers = Vec::new();
    for (fi, c) in circles.iter().enumerate() {
        if k <= c.radius {
            return Err(Error::OutOfRange(format!(
                "k = {k} does not exceed the circumradius {} of face {fi}",
                c.radius
            )));
        }
        let lift = (k * k - c.radius * c.radius).sqrt();
        centers.push((&c.center + &c.inner_normal * lift) / k);
    }
    let body = boundary_structure(&centers, tol)?;
    let standard = standardness_and_lattice(&body).is_standard();
    let lattice_isomorphic = standard && lattice_matches(&body, poly, k);
    let poles: Vec<Point> = body.generators.iter().map(|&f| -&circles[f].inner_normal).collect();
    let caps: Vec<f64> = body
        .generators
        .iter()
        .map(|&f| (1.2 * circles[f].radius / k).min(1.0).asin())
        .collect();
    let interior = poly.centroid();
    let mut hausdorff: f64 = 0.0;
    for x in boundary_samples(&body, &poles, &caps, tol) {
        hausdorff = hausdorff.max(polytope_distance(&circles, &interior, &(x * k), tol)?);
    }
    for v in &poly.vertices {
        let excess = body
            .centers
            .iter()
            .map(|c| (v / k - c).norm() - 1.0)
            .fold(0.0, f64::max);
        hausdorff = hausdorff.max(excess * k);
    }
    Ok(Approximation {
        k,
        body,
        hausdorff,
        standard,
        lattice_isomorphic,
    })
}

/// Centers of a regular tetrahedron of edge length `edge`, centered at the
/// origin.
pub fn regular_tetrahedron(edge: f64) -> Vec<Point> {
    let a = edge / 8f64.sqrt();
    ConvexPolytope::tetrahedron(a).vertices
}
