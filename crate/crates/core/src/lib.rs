//! Spindle convexity and ball-polyhedra.
//!
//! The crate covers arc-distance and spindles ([`geom`]), spindle convex
//! hulls ([`hull`]), separation of point sets by spheres ([`separation`]),
//! disk-polygons and their extremal problems ([`diskpoly`]), the face
//! structure of three-dimensional ball-polyhedra ([`bp3`]), verified
//! constructions around intersecting sphere families and contractions
//! ([`constructions`]), and illumination of bodies `B[X]` ([`illumination`]).
//! Scene files shared with the command-line tool live in [`scene`].

pub mod bp3;
pub mod constructions;
pub mod diskpoly;
pub mod error;
pub mod geom;
pub mod hull;
pub mod illumination;
pub mod qp;
pub mod scene;
pub mod separation;

pub use error::{Error, Result};
pub use geom::{
    arc_distance, circumball, circumradius, classify_arc_triangle, in_ball_intersection, intersect_spheres, point,
    spindle_contains, ArcTriangle, Ball, Circumball, Point, Sphere, SubSphere, SubSphereKind, Tolerance,
};
