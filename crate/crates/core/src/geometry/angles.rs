use serde::{Deserialize, Serialize};

use super::line::interior_alpha;
use super::{GeometryError, PolygonalLine};

/// Angle factors within this distance of 1 mark removable (collinear) vertices.
pub const COLLINEAR_TOL: f64 = 1e-9;

/// Where an angle factor sits on the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleLocation {
    Finite(usize),
    Infinity,
    /// Accumulation point of a countable vertex set, or a declared tail.
    Limit,
}

/// Interior angle `pi * value` at one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleFactor {
    pub value: f64,
    pub location: AngleLocation,
}

impl AngleFactor {
    pub fn finite(index: usize, value: f64) -> Self {
        Self { value, location: AngleLocation::Finite(index) }
    }

    pub fn infinity(value: f64) -> Self {
        Self { value, location: AngleLocation::Infinity }
    }

    pub fn limit(value: f64) -> Self {
        Self { value, location: AngleLocation::Limit }
    }

    pub fn is_infinite(&self) -> bool {
        self.location == AngleLocation::Infinity
    }

    /// A straight-through vertex that carries no corner.
    pub fn is_removable(&self) -> bool {
        !self.is_infinite() && (self.value - 1.0).abs() <= COLLINEAR_TOL
    }

    /// `|1 - alpha|` for finite vertices and `|1 - |alpha||` at infinity.
    pub fn deviation(&self) -> f64 {
        if self.is_infinite() {
            (1.0 - self.value.abs()).abs()
        } else {
            (1.0 - self.value).abs()
        }
    }
}

/// Interior angle factors of a polygonal line.
///
/// Closed polygons are measured on their interior regardless of input
/// orientation. Unbounded lines get a trailing factor at infinity fixed by
/// `sum (1 - alpha_k) = 2` over all vertices, so the quadrant has
/// `alpha_inf = -1/2`. Open polylines are measured on their left side at
/// interior vertices only. Overrides replace computed finite values.
pub fn interior_angles(line: &PolygonalLine) -> Vec<AngleFactor> {
    let left = line.is_counterclockwise();
    let n = line.len();
    let mut out = Vec::with_capacity(n + 1);
    let mut turning = 0.0;
    for i in 0..n {
        if let Some((inc, outg)) = line.vertex_directions(i) {
            let alpha = interior_alpha(inc, outg, left);
            turning += 1.0 - alpha;
            out.push(AngleFactor::finite(i, alpha));
        }
    }
    for &(i, a) in line.angle_overrides() {
        if let Some(f) = out.iter_mut().find(|f| f.location == AngleLocation::Finite(i)) {
            turning += f.value - a;
            f.value = a;
        }
    }
    if line.has_infinite_vertex() {
        out.push(AngleFactor::infinity(turning - 1.0));
    }
    out
}

/// Drop collinear vertices (alpha = 1) from a closed or unbounded line.
pub fn merge_collinear(line: &PolygonalLine) -> Result<PolygonalLine, GeometryError> {
    let angles = interior_angles(line);
    let keep: Vec<usize> = angles
        .iter()
        .filter_map(|a| match a.location {
            AngleLocation::Finite(i) if !a.is_removable() => Some(i),
            _ => None,
        })
        .collect();
    let overrides: Vec<(usize, f64)> = line
        .angle_overrides()
        .iter()
        .filter_map(|&(i, a)| keep.iter().position(|&k| k == i).map(|p| (p, a)))
        .collect();
    let vertices: Vec<_> = if line.is_closed() || line.has_infinite_vertex() {
        keep.iter().map(|&i| line.vertices()[i]).collect()
    } else {
        // Open polylines keep their endpoints.
        let n = line.len();
        std::iter::once(0)
            .chain(keep.iter().copied())
            .chain(std::iter::once(n - 1))
            .map(|i| line.vertices()[i])
            .collect()
    };
    let mut merged = if line.is_closed() {
        PolygonalLine::closed(vertices)?
    } else if let Some([a, b]) = line.rays() {
        if vertices.is_empty() {
            return Err(GeometryError::NoCorners);
        }
        PolygonalLine::unbounded(vertices, a, b)?
    } else {
        PolygonalLine::open(vertices)?
    };
    for (i, a) in overrides {
        merged = merged.with_angle_override(i, a)?;
    }
    Ok(merged)
}

/// Largest deviation from a straight angle over a set of factors:
/// `max(sup_n |1 - alpha_n|, |1 - |alpha_inf||)`.
pub fn deviation(angles: &[AngleFactor]) -> f64 {
    angles.iter().map(AngleFactor::deviation).fold(0.0, f64::max)
}
