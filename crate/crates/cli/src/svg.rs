//! SVG 1.1 figures of planar scenes.
//!
//! Drawing happens inside a group flipped by `scale(1,-1)`, so path
//! coordinates are the mathematical ones and a counterclockwise arc has
//! sweep flag 1.

use std::fmt::Write;

use spindle_core::Point;

#[derive(Debug, Clone, Default)]
pub struct Figure {
    elements: Vec<String>,
    min: [f64; 2],
    max: [f64; 2],
    empty: bool,
}

impl Figure {
    pub fn new() -> Self {
        Figure {
            elements: Vec::new(),
            min: [f64::INFINITY; 2],
            max: [f64::NEG_INFINITY; 2],
            empty: true,
        }
    }

    fn cover(&mut self, p: &Point, pad: f64) {
        for k in 0..2 {
            self.min[k] = self.min[k].min(p[k] - pad);
            self.max[k] = self.max[k].max(p[k] + pad);
        }
        self.empty = false;
    }

    /// Counterclockwise arc of radius `radius` around `center` from `from` to `to`.
    pub fn arc(&mut self, from: &Point, to: &Point, center: &Point, radius: f64, class: &str) {
        let a0 = (from[1] - center[1]).atan2(from[0] - center[0]);
        let a1 = (to[1] - center[1]).atan2(to[0] - center[0]);
        let sweep = (a1 - a0).rem_euclid(std::f64::consts::TAU);
        let large = u8::from(sweep > std::f64::consts::PI);
        self.cover(from, 0.0);
        self.cover(to, 0.0);
        for k in 0..64 {
            let t = a0 + sweep * k as f64 / 63.0;
            self.cover(&spindle_core::point(&[center[0] + radius * t.cos(), center[1] + radius * t.sin()]), 0.0);
        }
        self.elements.push(format!(
            r#"<path class="{class}" d="M {} {} A {radius} {radius} 0 {large} 1 {} {}"/>"#,
            from[0], from[1], to[0], to[1]
        ));
    }

    pub fn circle(&mut self, center: &Point, radius: f64, class: &str) {
        self.cover(center, radius);
        self.elements.push(format!(
            r#"<circle class="{class}" cx="{}" cy="{}" r="{radius}"/>"#,
            center[0], center[1]
        ));
    }

    pub fn dot(&mut self, p: &Point, class: &str) {
        self.cover(p, 0.02);
        self.elements.push(format!(
            r#"<circle class="{class} dot" cx="{}" cy="{}" r="0.012"/>"#,
            p[0], p[1]
        ));
    }

    pub fn render(&self) -> String {
        let (min, max) = if self.empty { ([-1.0, -1.0], [1.0, 1.0]) } else { (self.min, self.max) };
        let pad = 0.05 * (max[0] - min[0]).max(max[1] - min[1]).max(1e-3);
        let (x, y) = (min[0] - pad, -(max[1] + pad));
        let (w, h) = (max[0] - min[0] + 2.0 * pad, max[1] - min[1] + 2.0 * pad);
        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{x} {y} {w} {h}" width="600" height="{}">"#,
            (600.0 * h / w).round()
        );
        let _ = writeln!(
            out,
            "<style>path, circle {{ fill: none; stroke: black; stroke-width: {} }} .dot {{ fill: black; stroke: none }} .a {{ stroke: steelblue }} .b {{ stroke: firebrick }}</style>",
            w / 400.0
        );
        let _ = writeln!(out, r#"<g transform="scale(1,-1)">"#);
        for e in &self.elements {
            let _ = writeln!(out, "{e}");
        }
        let _ = writeln!(out, "</g>\n</svg>");
        out
    }
}
