//! JSON polygon schema.
//!
//! ```json
//! { "vertices": [[0,0],[1,0],[1,1],[0,1]], "closed": true,
//!   "infinite_vertex": false, "ray_directions": [[dx,dy],[dx,dy]],
//!   "angle_overrides": [{"index": 0, "alpha": 0.5}] }
//! ```
//!
//! Optional extensions used by the invariants front end: `tail` declares the
//! angle pattern of a countable vertex set beyond the listed vertices, and
//! `visible_vertices` / `infinite_direction` name vertices that should see
//! infinity along a ray.

use serde::{Deserialize, Serialize};

use super::{GeometryError, Point, PolygonalLine};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleOverride {
    pub index: usize,
    pub alpha: f64,
}

/// Declared angle behaviour of the vertices beyond a finite truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailSpec {
    /// Angle factors repeating forever.
    Periodic { alphas: Vec<f64> },
    /// Supremum of `|1 - alpha_n|` over the tail.
    Sup { deviation: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonFile {
    pub vertices: Vec<Point>,
    #[serde(default)]
    pub closed: bool,
    #[serde(default)]
    pub infinite_vertex: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray_directions: Option<[Point; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub angle_overrides: Vec<AngleOverride>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub visible_vertices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infinite_direction: Option<Point>,
}

/// Schema-level problem with a named field.
#[derive(Debug, thiserror::Error)]
pub enum SchemaError {
    #[error("field `{field}`: {message}")]
    Field { field: &'static str, message: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl PolygonFile {
    pub fn to_line(&self) -> Result<PolygonalLine, SchemaError> {
        let field = |field, message: &str| SchemaError::Field { field, message: message.to_string() };
        if self.closed && self.infinite_vertex {
            return Err(field("closed", "a closed polygon cannot have an infinite vertex"));
        }
        let mut line = if self.infinite_vertex {
            let [a, b] = self
                .ray_directions
                .ok_or_else(|| field("ray_directions", "required when infinite_vertex is true"))?;
            PolygonalLine::unbounded(self.vertices.clone(), a, b)?
        } else {
            if self.ray_directions.is_some() {
                return Err(field("ray_directions", "only allowed when infinite_vertex is true"));
            }
            if self.closed {
                PolygonalLine::closed(self.vertices.clone())?
            } else {
                PolygonalLine::open(self.vertices.clone())?
            }
        };
        for o in &self.angle_overrides {
            if !o.alpha.is_finite() {
                return Err(field("angle_overrides", "alpha must be finite"));
            }
            line = line.with_angle_override(o.index, o.alpha)?;
        }
        Ok(line)
    }

    pub fn from_line(line: &PolygonalLine) -> Self {
        Self {
            vertices: line.vertices().to_vec(),
            closed: line.is_closed(),
            infinite_vertex: line.has_infinite_vertex(),
            ray_directions: line.rays(),
            angle_overrides: line
                .angle_overrides()
                .iter()
                .map(|&(index, alpha)| AngleOverride { index, alpha })
                .collect(),
            tail: None,
            visible_vertices: Vec::new(),
            infinite_direction: None,
        }
    }
}
