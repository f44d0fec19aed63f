use serde::Serialize;

use super::angles::{interior_angles, COLLINEAR_TOL};
use super::line::Piece;
use super::{Point, PolygonalLine};

/// Shape class of the domain bounded by a line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Classification {
    Convex,
    /// Unbounded domain whose complement is convex.
    Concave,
    Starlike { center: Point },
    Generic,
}

/// Intersection of the inward half-planes of every piece, clipped to a box
/// around the finite vertices. Returns the vertices of the (convex) kernel
/// polygon, empty when the kernel is empty. Open polylines have no kernel.
pub fn kernel(line: &PolygonalLine) -> Vec<Point> {
    if !line.bounds_domain() {
        return Vec::new();
    }
    let line = line.to_counterclockwise();
    let scale = line.scale();
    let tol = line.tolerance();
    let (mut lo, mut hi) = (Point::new(f64::MAX, f64::MAX), Point::new(f64::MIN, f64::MIN));
    for p in line.vertices() {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let pad = if line.has_infinite_vertex() { 10.0 * scale } else { scale };
    let mut region = vec![
        Point::new(lo.x - pad, lo.y - pad),
        Point::new(hi.x + pad, lo.y - pad),
        Point::new(hi.x + pad, hi.y + pad),
        Point::new(lo.x - pad, hi.y + pad),
    ];
    for (k, piece) in line.pieces().iter().enumerate() {
        let (origin, dir) = match *piece {
            Piece::Segment(a, b) => (a, (b - a).normalized()),
            // The first ray is traversed towards its origin.
            Piece::Ray(o, d) if k == 0 => (o, -d),
            Piece::Ray(o, d) => (o, d),
        };
        region = clip(&region, origin, dir, tol);
        if region.is_empty() {
            break;
        }
    }
    region
}

/// Sutherland-Hodgman clip of a convex polygon to `cross(dir, p - origin) >= -tol`.
fn clip(poly: &[Point], origin: Point, dir: Point, tol: f64) -> Vec<Point> {
    let side = |p: Point| dir.cross(p - origin);
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let (sa, sb) = (side(a), side(b));
        if sa >= -tol {
            out.push(a);
        }
        if (sa >= -tol) != (sb >= -tol) {
            let t = sa / (sa - sb);
            out.push(a + (b - a) * t);
        }
    }
    out
}

fn area_centroid(poly: &[Point]) -> Point {
    let n = poly.len();
    let mut a2 = 0.0;
    let mut c = Point::default();
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let w = p.cross(q);
        a2 += w;
        c = c + (p + q) * w;
    }
    if a2.abs() > 1e-300 {
        c * (1.0 / (3.0 * a2))
    } else {
        poly.iter().fold(Point::default(), |acc, &p| acc + p) * (1.0 / n as f64)
    }
}

/// Classify the domain bounded by `line`.
///
/// Convex: every finite angle factor at most 1. Concave: unbounded with every
/// finite factor at least 1 (and at least one corner or a straight line).
/// Starlike: kernel nonempty, reported with the kernel centroid.
pub fn classify(line: &PolygonalLine) -> Classification {
    if !line.bounds_domain() {
        return Classification::Generic;
    }
    let angles = interior_angles(line);
    let finite: Vec<f64> = angles.iter().filter(|a| !a.is_infinite()).map(|a| a.value).collect();
    if finite.iter().all(|&a| a <= 1.0 + COLLINEAR_TOL) {
        return Classification::Convex;
    }
    if line.has_infinite_vertex() && finite.iter().all(|&a| a >= 1.0 - COLLINEAR_TOL) {
        return Classification::Concave;
    }
    let k = kernel(line);
    if k.is_empty() {
        Classification::Generic
    } else {
        Classification::Starlike { center: area_centroid(&k) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn square_is_convex() {
        let sq = PolygonalLine::closed(pts(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)])).unwrap();
        assert_eq!(classify(&sq), Classification::Convex);
        let k = kernel(&sq);
        assert!(!k.is_empty());
    }

    #[test]
    fn l_shape_is_starlike_about_lower_square() {
        let l = PolygonalLine::closed(pts(&[(0., 0.), (2., 0.), (2., 1.), (1., 1.), (1., 2.), (0., 2.)])).unwrap();
        match classify(&l) {
            Classification::Starlike { center } => {
                assert!((center.x - 0.5).abs() < 1e-9 && (center.y - 0.5).abs() < 1e-9, "{center:?}");
            }
            c => panic!("unexpected {c:?}"),
        }
    }

    #[test]
    fn quadrant_exterior_is_concave() {
        let ext = PolygonalLine::unbounded(pts(&[(0., 0.)]), Point::new(1., 0.), Point::new(0., 1.)).unwrap();
        assert_eq!(classify(&ext), Classification::Concave);
    }
}
