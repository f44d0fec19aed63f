use serde::{Deserialize, Serialize};

use super::angles::interior_angles;
use super::line::ccw_angle;
use super::{AngleLocation, GeometryError, Point, PolygonalLine};

/// Which of the angles at a side intersection counts as the adjoint angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjointReading {
    /// Angle between the continuation of the side past `B` and the ray from
    /// `T` through `B`; gives `1 - alpha`.
    #[default]
    Default,
    /// Supplement of the default angle; gives `alpha`.
    Supplementary,
}

impl std::str::FromStr for AdjointReading {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "default" => Ok(Self::Default),
            "supplementary" => Ok(Self::Supplementary),
            other => Err(format!("unknown adjoint reading `{other}` (expected default|supplementary)")),
        }
    }
}

/// Rhombus `A, B1, T, B2` inscribed in the angle at `A`, with equal angles at
/// `A` and at the bisector point `T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhombusConstruction {
    pub vertex_index: Option<usize>,
    pub t_parameter: f64,
    /// `[A, B1, T, B2]`.
    pub rhombus_vertices: [Point; 4],
    pub adjoint_angles: (f64, f64),
    pub reading: AdjointReading,
}

impl RhombusConstruction {
    pub fn side_lengths(&self) -> [f64; 4] {
        let v = &self.rhombus_vertices;
        [v[0].distance(v[1]), v[1].distance(v[2]), v[2].distance(v[3]), v[3].distance(v[0])]
    }

    /// Bound term `max(1 - a1, 1 - a2)` from the adjoint angle factors.
    pub fn bound_term(&self) -> f64 {
        (1.0 - self.adjoint_angles.0).max(1.0 - self.adjoint_angles.1)
    }
}

/// Rhombus for the angle with apex `apex` spanned counterclockwise from unit
/// side `u1` to unit side `u2`.
pub(crate) fn construct(apex: Point, u1: Point, u2: Point, t: f64, reading: AdjointReading) -> RhombusConstruction {
    let sum = u1 + u2;
    let bisector = sum.normalized();
    let tip = apex + bisector * t;
    // T = A + s*u1 + s*u2 by symmetry of the bisector.
    let s = t / sum.norm();
    let b1 = apex + u1 * s;
    let b2 = apex + u2 * s;
    let adjoint = |side: Point, b: Point| {
        let through = (b - tip).normalized();
        let phi = side.dot(through).clamp(-1.0, 1.0).acos() / std::f64::consts::PI;
        match reading {
            AdjointReading::Default => phi,
            AdjointReading::Supplementary => 1.0 - phi,
        }
    };
    RhombusConstruction {
        vertex_index: None,
        t_parameter: t,
        rhombus_vertices: [apex, b1, tip, b2],
        adjoint_angles: (adjoint(u1, b1), adjoint(u2, b2)),
        reading,
    }
}

/// Rhombus for a bare angle of factor `alpha` (apex at the origin).
pub fn rhombus_for_angle(alpha: f64, t: f64, reading: AdjointReading) -> Result<RhombusConstruction, GeometryError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(GeometryError::NotSalient { alpha });
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(GeometryError::BadParameter { t });
    }
    let theta = std::f64::consts::PI * alpha;
    Ok(construct(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(theta.cos(), theta.sin()), t, reading))
}

/// Rhombus associated with the interior angle at finite vertex `vertex_index`.
pub fn rhombus_at_vertex(
    line: &PolygonalLine,
    vertex_index: usize,
    t: f64,
    reading: AdjointReading,
) -> Result<RhombusConstruction, GeometryError> {
    if vertex_index >= line.len() {
        return Err(GeometryError::VertexIndex { index: vertex_index, len: line.len() });
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(GeometryError::BadParameter { t });
    }
    let n = line.len();
    let (ccw_line, idx) = if line.is_counterclockwise() {
        (line.clone(), vertex_index)
    } else {
        (line.to_counterclockwise(), n - 1 - vertex_index)
    };
    let alpha = interior_angles(&ccw_line)
        .iter()
        .find(|a| a.location == AngleLocation::Finite(idx))
        .map(|a| a.value)
        .ok_or(GeometryError::NoAngle { index: vertex_index })?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(GeometryError::NotSalient { alpha });
    }
    let (inc, out) = ccw_line.vertex_directions(idx).ok_or(GeometryError::NoAngle { index: vertex_index })?;
    // Interior wedge runs counterclockwise from the outgoing side to the
    // reversed incoming side.
    let u1 = out.normalized();
    let u2 = (-inc).normalized();
    debug_assert!((ccw_angle(u1, u2) / std::f64::consts::PI - alpha).abs() < 1e-9);
    let mut r = construct(ccw_line.vertices()[idx], u1, u2, t, reading);
    r.vertex_index = Some(vertex_index);
    Ok(r)
}
