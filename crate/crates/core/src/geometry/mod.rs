//! Plane geometry of polygonal lines: angle factors, simplicity, shape class
//! and the rhombus inscribed in a salient angle.

mod angles;
mod kernel;
mod line;
mod point;
mod rhombus;
pub mod schema;

pub use angles::{deviation, interior_angles, merge_collinear, AngleFactor, AngleLocation, COLLINEAR_TOL};
pub use kernel::{classify, kernel, Classification};
pub use line::{Piece, PolygonalLine, INCIDENCE_TOL};
pub use point::{point_segment_distance, Point};
pub use rhombus::{rhombus_at_vertex, rhombus_for_angle, AdjointReading, RhombusConstruction};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("need at least {needed} vertices, got {got}")]
    TooFewVertices { needed: usize, got: usize },
    #[error("vertex {index} is not finite")]
    NonFiniteVertex { index: usize },
    #[error("ray direction {index} is zero or not finite")]
    BadRayDirection { index: usize },
    #[error("edge {index} has zero length")]
    DegenerateEdge { index: usize },
    #[error("vertex index {index} out of range for {len} vertices")]
    VertexIndex { index: usize, len: usize },
    #[error("vertex {index} has no interior angle (open polyline endpoint)")]
    NoAngle { index: usize },
    #[error("rhombus construction needs a salient angle 0 < alpha < 1, got {alpha}")]
    NotSalient { alpha: f64 },
    #[error("rhombus parameter must be positive and finite, got {t}")]
    BadParameter { t: f64 },
    #[error("line has no corners left after merging collinear vertices")]
    NoCorners,
}
