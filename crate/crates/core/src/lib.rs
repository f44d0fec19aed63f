//! Quasiconformal invariants of polygonal lines.
//!
//! The crate evaluates closed-form values of the Grunsky norm, Teichmüller
//! norm, reflection coefficient and reciprocal Fredholm eigenvalue for
//! polygonal lines, and checks them numerically with Schwarz–Christoffel
//! maps of the unit disk and truncated Grunsky matrices. It also generates
//! Koch-type snowflake curves and ladders, and bounds reflections across
//! analytic arcs from the decay of Chebyshev coefficients.

pub mod arcs;
pub mod config;
pub mod conformal;
pub mod fractal;
pub mod geometry;
pub mod grunsky;
pub mod invariants;
pub mod verify;

pub use geometry::{AngleFactor, Point, PolygonalLine};
