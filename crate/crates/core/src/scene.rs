//! JSON scene files: a dimension, a point list, an optional center list, a
//! ball radius and free-form string metadata.
//!
//! ```json
//! {"dim": 2, "points": [[0.0, 0.0], [1.0, 0.0]], "centers": [], "radius": 1.0, "metadata": {}}
//! ```
//!
//! Numbers are written in shortest round-trip form, so parsing a written
//! scene reproduces every coordinate bit for bit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{point, Point};

/// Schema and syntax problems, with the location of the offending text.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn default_radius() -> f64 {
    1.0
}

/// A validated scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    #[serde(default)]
    pub centers: Vec<Vec<f64>>,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl Scene {
    /// A scene with unit radius, no centers and no metadata.
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Self {
        Scene {
            dim,
            points,
            centers: Vec::new(),
            radius: 1.0,
            metadata: BTreeMap::new(),
        }
    }

    pub fn from_points(dim: usize, points: &[Point]) -> Self {
        Scene::new(dim, points.iter().map(|p| p.as_slice().to_vec()).collect())
    }

    /// Parses and validates a scene.
    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        let scene: Scene = serde_json::from_str(text).map_err(|e| SceneError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenes contain only finite numbers and strings")
    }

    /// Checks `dim >= 1`, coordinate lengths, finiteness and `radius > 0`.
    pub fn validate(&self) -> Result<(), SceneError> {
        let field = |name: String, message: String| SceneError::Field { field: name, message };
        if self.dim == 0 {
            return Err(field("dim".into(), "must be at least 1".into()));
        }
        for (name, list) in [("points", &self.points), ("centers", &self.centers)] {
            for (i, coords) in list.iter().enumerate() {
                if coords.len() != self.dim {
                    return Err(field(
                        format!("{name}[{i}]"),
                        format!("has {} coordinates, expected {}", coords.len(), self.dim),
                    ));
                }
                if let Some(k) = coords.iter().position(|c| !c.is_finite()) {
                    return Err(field(format!("{name}[{i}][{k}]"), "is not finite".into()));
                }
            }
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(field("radius".into(), format!("must be positive, got {}", self.radius)));
        }
        Ok(())
    }

    pub fn point_list(&self) -> Vec<Point> {
        self.points.iter().map(|c| point(c)).collect()
    }

    pub fn center_list(&self) -> Vec<Point> {
        self.centers.iter().map(|c| point(c)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_apply() {
        let s = Scene::from_json(r#"{"dim": 2, "points": [[0, 0], [1, 0.5]]}"#).unwrap();
        assert_eq!(s.radius, 1.0);
        assert!(s.centers.is_empty() && s.metadata.is_empty());
        assert_eq!(s.point_list()[1], point(&[1.0, 0.5]));
    }

    #[test]
    fn schema_errors_name_the_field() {
        let e = Scene::from_json(r#"{"dim": 2, "points": [[0, 0], [1]]}"#).unwrap_err();
        assert_eq!(
            e,
            SceneError::Field {
                field: "points[1]".into(),
                message: "has 1 coordinates, expected 2".into()
            }
        );
        let e = Scene::from_json(r#"{"dim": 2, "points": [], "radius": -1}"#).unwrap_err();
        assert!(matches!(e, SceneError::Field { ref field, .. } if field == "radius"));
        let e = Scene::from_json(r#"{"dim": 0, "points": []}"#).unwrap_err();
        assert!(matches!(e, SceneError::Field { ref field, .. } if field == "dim"));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = Scene::from_json("{\n  \"dim\": 2,\n  \"points\": [[0, 0],]\n}").unwrap_err();
        assert!(matches!(e, SceneError::Syntax { line: 3, .. }), "{e}");
        let e = Scene::from_json(r#"{"dim": 2, "points": [], "colour": 1}"#).unwrap_err();
        assert!(matches!(e, SceneError::Syntax { .. }));
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(
            dim in 1usize..5,
            raw in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 4), 0..8),
            radius in 1e-6f64..10.0,
            meta in prop::collection::btree_map("[a-z]{1,6}", "[ -~]{0,12}", 0..4),
        ) {
            let mut s = Scene::new(dim, raw.iter().map(|c| c[..dim].to_vec()).collect());
            s.centers = s.points.iter().rev().cloned().collect();
            s.radius = radius;
            s.metadata = meta;
            let once = Scene::from_json(&s.to_json()).unwrap();
            prop_assert_eq!(&once, &s);
            let twice = Scene::from_json(&once.to_json()).unwrap();
            prop_assert_eq!(twice, s);
        }
    }
}
