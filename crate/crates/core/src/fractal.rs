//! Koch-type curves with ratio `t`, their periodic unbounded extensions and
//! closed snowflakes, staircase ladders, and Hausdorff distance between
//! polylines.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use rstar::primitives::Line;
use rstar::{PointDistance, RTree};
use serde::{Deserialize, Serialize};

use crate::geometry::schema::TailSpec;
use crate::geometry::{interior_angles, merge_collinear, AdjointReading, GeometryError, Piece, Point, PolygonalLine};
use crate::invariants::{self, CountableTail, InvariantError, InvariantReport};

/// Largest iteration depth accepted (4^10 + 1 vertices).
pub const MAX_DEPTH: usize = 10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FractalError {
    #[error("ratio t = {0} must lie in (1/4, 1/2)")]
    BadRatio(f64),
    #[error("depth {0} exceeds the limit {MAX_DEPTH}")]
    TooDeep(usize),
    #[error("iterate {0} is not a simple curve")]
    SelfIntersection(usize),
    #[error("need at least one copy")]
    NoCopies,
    #[error("ladder needs positive, finite crossbars and heights, as many crossbars as heights")]
    BadLadder,
    #[error("Hausdorff distance needs two bounded, nonempty lines")]
    BadHausdorffInput,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

/// `z -> a z + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Similarity {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Similarity {
    fn apply(&self, p: Point) -> Point {
        let a = Complex64::new(self.a[0], self.a[1]);
        let b = Complex64::new(self.b[0], self.b[1]);
        Point::from_complex(a * p.to_complex() + b)
    }

    pub fn ratio(&self) -> f64 {
        self.a[0].hypot(self.a[1])
    }
}

/// Generator of the Koch-type curve with ratio `t` on `[0, 6]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnowflakeSpec {
    pub t: f64,
    pub base_points: [Point; 5],
    pub similarities: [Similarity; 4],
}

/// Base points `0, 6t, 3 + 6i sqrt(t^2 - (1/2 - t)^2), 6(1 - t), 6` and the
/// similarities taking `[0, 6]` onto each side.
pub fn koch_spec(t: f64) -> Result<SnowflakeSpec, FractalError> {
    if !(t > 0.25 && t < 0.5) {
        return Err(FractalError::BadRatio(t));
    }
    let h = 6.0 * (t * t - (0.5 - t) * (0.5 - t)).sqrt();
    let z = [
        Point::new(0.0, 0.0),
        Point::new(6.0 * t, 0.0),
        Point::new(3.0, h),
        Point::new(6.0 * (1.0 - t), 0.0),
        Point::new(6.0, 0.0),
    ];
    let sim = |j: usize| {
        let a = (z[j + 1].to_complex() - z[j].to_complex()) / 6.0;
        Similarity { a: [a.re, a.im], b: [z[j].x, z[j].y] }
    };
    Ok(SnowflakeSpec { t, base_points: z, similarities: [sim(0), sim(1), sim(2), sim(3)] })
}

fn iterate_points(spec: &SnowflakeSpec, p: usize) -> Vec<Point> {
    let mut pts = vec![spec.base_points[0], spec.base_points[4]];
    for _ in 0..p {
        let mut next = Vec::with_capacity(4 * pts.len());
        for (j, s) in spec.similarities.iter().enumerate() {
            let skip = usize::from(j > 0);
            next.extend(pts.iter().skip(skip).map(|&q| s.apply(q)));
        }
        pts = next;
    }
    pts
}

/// `sigma^p [z_1, z_5]`: an open polyline with `4^p + 1` vertices.
pub fn iterate(spec: &SnowflakeSpec, p: usize) -> Result<PolygonalLine, FractalError> {
    if p > MAX_DEPTH {
        return Err(FractalError::TooDeep(p));
    }
    let line = PolygonalLine::open(iterate_points(spec, p))?;
    if !line.validate_simple()? {
        return Err(FractalError::SelfIntersection(p));
    }
    Ok(line)
}

/// `copies` translates of iterate `p` by multiples of 6, closed off by rays
/// to the left and right. The domain above the curve is on the left; use
/// [`PolygonalLine::reversed`] for the one below.
pub fn extend_periodic(spec: &SnowflakeSpec, p: usize, copies: usize) -> Result<PolygonalLine, FractalError> {
    if copies == 0 {
        return Err(FractalError::NoCopies);
    }
    let base = iterate(spec, p)?;
    let mut pts: Vec<Point> = Vec::with_capacity(copies * (base.len() - 1) + 1);
    for n in 0..copies {
        let shift = Point::new(6.0 * n as f64, 0.0);
        let skip = usize::from(n > 0);
        pts.extend(base.vertices().iter().skip(skip).map(|&q| q + shift));
    }
    let line = PolygonalLine::unbounded(pts, Point::new(-1.0, 0.0), Point::new(1.0, 0.0))?;
    if !line.validate_simple()? {
        return Err(FractalError::SelfIntersection(p));
    }
    Ok(line)
}

/// Closed snowflake: iterate `p` on each side of an equilateral triangle,
/// teeth pointing outward.
pub fn closed_snowflake(spec: &SnowflakeSpec, p: usize) -> Result<PolygonalLine, FractalError> {
    if p > MAX_DEPTH {
        return Err(FractalError::TooDeep(p));
    }
    let curve = iterate_points(spec, p);
    // clockwise triangle, so the left of each side is the exterior
    let corners = [Complex64::new(0.0, 0.0), Complex64::new(3.0, 3.0 * 3f64.sqrt()), Complex64::new(6.0, 0.0)];
    let mut pts = Vec::with_capacity(3 * (curve.len() - 1));
    for j in 0..3 {
        let (a, b) = (corners[j], corners[(j + 1) % 3]);
        let s = (b - a) / 6.0;
        pts.extend(curve[..curve.len() - 1].iter().map(|q| Point::from_complex(a + s * q.to_complex())));
    }
    let line = PolygonalLine::closed(pts)?;
    if !line.validate_simple()? {
        return Err(FractalError::SelfIntersection(p));
    }
    Ok(line)
}

/// Staircase of alternating horizontal crossbars and vertical steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSpec {
    /// `c_0, c_1, ...`: `c_0` is where the real-axis interval ends, the rest
    /// are horizontal crossbar lengths.
    pub crossbars: Vec<f64>,
    /// Step heights `h_0, h_1, ...`.
    pub heights: Vec<f64>,
}

impl LadderSpec {
    /// `steps` unit steps with unit crossbars.
    pub fn uniform(steps: usize) -> Self {
        Self { crossbars: vec![1.0; steps], heights: vec![1.0; steps] }
    }
}

/// Direction along which every ladder vertex sees infinity.
pub const LADDER_VISIBILITY: Point = Point { x: -1.0, y: 1.0 };

/// Line coming in along the negative real axis to `(c_0, 0)`, then up `h_0`,
/// right `c_1`, up `h_1`, ..., and out along the last crossbar to the right.
/// The domain above and to the left is on the left. The tail declares the
/// repeating right-angle pattern `1/2, 3/2` and the visibility direction.
pub fn ladder(spec: &LadderSpec) -> Result<(PolygonalLine, CountableTail), FractalError> {
    let ok = |v: &[f64]| v.iter().all(|x| x.is_finite() && *x > 0.0);
    if spec.heights.is_empty() || spec.crossbars.len() != spec.heights.len() || !ok(&spec.crossbars) || !ok(&spec.heights)
    {
        return Err(FractalError::BadLadder);
    }
    let mut pts = Vec::with_capacity(2 * spec.heights.len());
    let mut cur = Point::new(spec.crossbars[0], 0.0);
    for (i, &h) in spec.heights.iter().enumerate() {
        pts.push(cur);
        cur = cur + Point::new(0.0, h);
        pts.push(cur);
        if i + 1 < spec.heights.len() {
            cur = cur + Point::new(spec.crossbars[i + 1], 0.0);
        }
    }
    let line = PolygonalLine::unbounded(pts, Point::new(-1.0, 0.0), Point::new(1.0, 0.0))?;
    let tail = CountableTail {
        pattern: Some(TailSpec::Periodic { alphas: vec![0.5, 1.5] }),
        visible_vertices: (0..line.len()).collect(),
        infinite_direction: Some(LADDER_VISIBILITY),
    };
    Ok((line, tail))
}

/// `log 4 / log(1/t)`.
pub fn hausdorff_dimension(t: f64) -> Result<f64, FractalError> {
    if !(t > 0.25 && t < 0.5) {
        return Err(FractalError::BadRatio(t));
    }
    Ok(4f64.ln() / (1.0 / t).ln())
}

fn segments(line: &PolygonalLine) -> Result<Vec<(Point, Point)>, FractalError> {
    line.pieces()
        .into_iter()
        .map(|p| match p {
            Piece::Segment(a, b) => Ok((a, b)),
            Piece::Ray(..) => Err(FractalError::BadHausdorffInput),
        })
        .collect()
}

type Seg = Line<[f64; 2]>;

struct Candidate {
    upper: f64,
    a: Point,
    b: Point,
    da: f64,
    db: f64,
    sa: Seg,
    sb: Seg,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.upper == other.upper
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper.total_cmp(&other.upper)
    }
}

fn seg_dist(s: &Seg, p: Point) -> f64 {
    s.distance_2(&[p.x, p.y]).sqrt()
}

/// Upper bound for the distance to `b` along `[x, y]`: the distance is
/// 1-Lipschitz, and the distance to the segment nearest either endpoint is
/// convex along the interval.
fn interval_bound(x: Point, y: Point, dx: f64, dy: f64, sx: &Seg, sy: &Seg) -> f64 {
    let lipschitz = 0.5 * (dx + dy + x.distance(y));
    let via_x = dx.max(seg_dist(sx, y));
    let via_y = dy.max(seg_dist(sy, x));
    lipschitz.min(via_x).min(via_y)
}

/// `sup_{x in a} dist(x, b)` by branch and bound over the segments of `a`.
fn directed(a: &[(Point, Point)], tree: &RTree<Seg>, tol: f64) -> f64 {
    let nearest = |p: Point| {
        let s = *tree.nearest_neighbor([p.x, p.y]).expect("nonempty tree");
        (seg_dist(&s, p), s)
    };
    let mut best: f64 = 0.0;
    let mut heap = BinaryHeap::new();
    for &(p, q) in a {
        let ((dp, sp), (dq, sq)) = (nearest(p), nearest(q));
        best = best.max(dp).max(dq);
        let upper = interval_bound(p, q, dp, dq, &sp, &sq);
        heap.push(Candidate { upper, a: p, b: q, da: dp, db: dq, sa: sp, sb: sq });
    }
    while let Some(c) = heap.pop() {
        if c.upper <= best + tol {
            break;
        }
        let m = (c.a + c.b) * 0.5;
        let (dm, sm) = nearest(m);
        best = best.max(dm);
        for (x, y, dx, dy, sx, sy) in [(c.a, m, c.da, dm, c.sa, sm), (m, c.b, dm, c.db, sm, c.sb)] {
            let u = interval_bound(x, y, dx, dy, &sx, &sy);
            if u > best + tol {
                heap.push(Candidate { upper: u, a: x, b: y, da: dx, db: dy, sa: sx, sb: sy });
            }
        }
    }
    best
}

/// Symmetric Hausdorff distance between two bounded polylines, exact up to
/// `1e-10` times the larger diameter.
pub fn hausdorff_distance(a: &PolygonalLine, b: &PolygonalLine) -> Result<f64, FractalError> {
    let (sa, sb) = (segments(a)?, segments(b)?);
    if sa.is_empty() || sb.is_empty() {
        return Err(FractalError::BadHausdorffInput);
    }
    let tol = 1e-10 * a.scale().max(b.scale()).max(f64::MIN_POSITIVE);
    let tree = |s: &[(Point, Point)]| RTree::bulk_load(s.iter().map(|(p, q)| Line::new([p.x, p.y], [q.x, q.y])).collect());
    let (ta, tb) = (tree(&sa), tree(&sb));
    Ok(directed(&sa, &tb, tol).max(directed(&sb, &ta, tol)))
}

/// Reports for one iterate of the Koch-type curve.
#[derive(Debug, Clone, Serialize)]
pub struct IterateReports {
    pub p: usize,
    /// Periodic extension, domain above the curve.
    pub upper_side: InvariantReport,
    /// Periodic extension, domain below the curve.
    pub lower_side: InvariantReport,
    /// Closed snowflake with the rhombus term.
    pub closed: InvariantReport,
    /// Closed snowflake, lower bound only.
    pub closed_lower: InvariantReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationInvariants {
    pub iterates: Vec<IterateReports>,
    /// Lower bound for the limit curve.
    pub limit: InvariantReport,
}

/// Invariant reports along iterates `0..=p` and the lower bound that passes
/// to the limit curve.
pub fn iteration_invariants(
    spec: &SnowflakeSpec,
    p: usize,
    copies: usize,
    reading: AdjointReading,
) -> Result<IterationInvariants, FractalError> {
    let mut iterates = Vec::with_capacity(p + 1);
    let mut limit_lower: f64 = 0.0;
    for q in 0..=p {
        let ext = extend_periodic(spec, q, copies)?;
        let closed = closed_snowflake(spec, q)?;
        let closed_report = invariants::bounded_polygon(&closed, reading)?;
        let closed_lower = invariants::bounded_polygon_lower(&closed)?;
        limit_lower = limit_lower.max(closed_lower.lower().unwrap_or(0.0));
        iterates.push(IterateReports {
            p: q,
            upper_side: invariants::rectilinear_unbounded(&ext, None)?,
            lower_side: invariants::rectilinear_unbounded(&ext.reversed(), None)?,
            closed: closed_report,
            closed_lower,
        });
    }
    Ok(IterationInvariants { iterates, limit: invariants::limit_lower_bound(limit_lower) })
}

/// Largest `|1 - alpha|` over the corners of a line.
pub fn max_corner_deviation(line: &PolygonalLine) -> Result<f64, FractalError> {
    let merged = merge_collinear(line)?;
    Ok(interior_angles(&merged).iter().filter(|a| !a.is_infinite()).map(|a| (1.0 - a.value).abs()).fold(0.0, f64::max))
}

/// CSV rows `p,d_H,value` for successive iterates: `d_H` between iterates
/// `p - 1` and `p` (empty for `p = 0`) and the exact value of the upper-side
/// periodic extension.
pub fn iteration_csv(spec: &SnowflakeSpec, p: usize, copies: usize) -> Result<String, FractalError> {
    let mut out = String::from("p,d_H,value\n");
    let mut prev: Option<PolygonalLine> = None;
    for q in 0..=p {
        let cur = iterate(spec, q)?;
        let dh = match &prev {
            Some(pl) => format!("{:.12}", hausdorff_distance(pl, &cur)?),
            None => String::new(),
        };
        let v = invariants::rectilinear_unbounded(&extend_periodic(spec, q, copies)?, None)?;
        out.push_str(&format!("{q},{dh},{:.12}\n", v.k()));
        prev = Some(cur);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koch_third_points() {
        let s = koch_spec(1.0 / 3.0).unwrap();
        let z = s.base_points;
        assert!((z[1].x - 2.0).abs() < 1e-14);
        assert!((z[2].x - 3.0).abs() < 1e-14 && (z[2].y - 3f64.sqrt()).abs() < 1e-14);
        assert!((z[3].x - 4.0).abs() < 1e-14);
        for sim in &s.similarities {
            assert!((sim.ratio() - 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ratio_outside_interval_rejected() {
        assert!(koch_spec(0.25).is_err());
        assert!(koch_spec(0.5).is_err());
        assert!(hausdorff_dimension(0.2).is_err());
    }

    #[test]
    fn segment_to_first_iterate() {
        let s = koch_spec(1.0 / 3.0).unwrap();
        let d = hausdorff_distance(&iterate(&s, 0).unwrap(), &iterate(&s, 1).unwrap()).unwrap();
        assert!((d - 3f64.sqrt()).abs() < 1e-9, "{d}");
    }

    #[test]
    fn ladder_shape() {
        let (line, tail) = ladder(&LadderSpec::uniform(3)).unwrap();
        assert_eq!(line.len(), 6);
        assert!(line.validate_simple().unwrap());
        for i in tail.visible_vertices {
            assert!(line.ray_inside(i, LADDER_VISIBILITY));
        }
    }
}
