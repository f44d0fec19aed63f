//! Schwarz–Christoffel maps of the unit disk and the power series built
//! from them.

mod quadrature;
mod scmap;
mod series;

pub use scmap::{sc_eval, sc_solve, ScMap, ScMapSummary, SolveOptions};
pub use series::{
    default_center, homotopy, invert_to_sigma, invert_to_taylor, recenter, schwarzian_at_zero, taylor_coefficients,
    taylor_from_factors, SeriesFile, SeriesKind, SigmaSeries, TaylorSeries,
};

use crate::geometry::GeometryError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConformalError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("open polyline does not bound a domain")]
    NotADomain,
    #[error("polygon is not simple")]
    NotSimple,
    #[error("a bounded polygon needs at least 3 corners, got {0}")]
    TooFewCorners(usize),
    #[error("parameter problem did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("point with modulus {0} lies outside the closed unit disk")]
    OutsideDisk(f64),
    #[error("the prevertex of the vertex at infinity has no finite image")]
    AtInfiniteVertex,
    #[error("no preimage found (residual {0:.3e})")]
    PreimageNotFound(f64),
    #[error("recentering point lies on the boundary")]
    BoundaryPoint,
    #[error("prevertices, angle factors and vertices differ in length")]
    Mismatch,
    #[error("series needs at least 3 coefficients, got {0}")]
    SeriesTooShort(usize),
    #[error("series length {requested} exceeds the limit {limit}")]
    SeriesTooLong { requested: usize, limit: usize },
    #[error("leading coefficient must be 1")]
    NotNormalized,
    #[error("series has non-finite coefficients")]
    NonFinite,
    #[error("homotopy parameter must lie in (0, 1], got {0}")]
    BadHomotopyParameter(f64),
}
