//! Deterministic inputs for the criterion benchmarks in `benches/`.

use spindle_core::{point, Point};

/// `n` points on a golden-angle spiral inside the disk of radius `radius`.
pub fn spiral_2d(n: usize, radius: f64) -> Vec<Point> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let r = radius * ((i as f64 + 0.5) / n as f64).sqrt();
            let t = golden * i as f64;
            point(&[r * t.cos(), r * t.sin()])
        })
        .collect()
}

/// `n` points on a Fibonacci sphere of radius `radius`.
pub fn fibonacci_3d(n: usize, radius: f64) -> Vec<Point> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            point(&[radius * r * t.cos(), radius * r * t.sin(), radius * z])
        })
        .collect()
}

/// Splits a planar set into the points within `split` of the origin and the rest.
pub fn split_by_radius(points: &[Point], split: f64) -> (Vec<Point>, Vec<Point>) {
    points.iter().cloned().partition(|p| p.norm() < split)
}
