use super::{GeometryError, Point};

/// Relative tolerance for incidence tests, applied after scaling to unit diameter.
pub const INCIDENCE_TOL: f64 = 1e-10;

/// A polygonal line in the plane.
///
/// Three shapes are supported:
/// * closed polygons (implicit closing edge, first vertex not repeated),
/// * open bounded polylines,
/// * unbounded lines through the point at infinity, whose two extreme
///   edges are rays. `rays[0]` points from the first vertex towards
///   infinity and `rays[1]` from the last vertex towards infinity. The
///   line is traversed inward along the first ray, through the vertices,
///   and out along the second ray; the domain it bounds lies on the left.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalLine {
    vertices: Vec<Point>,
    closed: bool,
    rays: Option<[Point; 2]>,
    angle_overrides: Vec<(usize, f64)>,
}

/// One straight piece of a polygonal line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    Segment(Point, Point),
    /// Origin and unit direction.
    Ray(Point, Point),
}

impl Piece {
    fn origin(&self) -> Point {
        match *self {
            Piece::Segment(a, _) | Piece::Ray(a, _) => a,
        }
    }

    /// Direction vector: full segment vector, or unit ray direction.
    fn vector(&self) -> Point {
        match *self {
            Piece::Segment(a, b) => b - a,
            Piece::Ray(_, d) => d,
        }
    }

    fn is_ray(&self) -> bool {
        matches!(self, Piece::Ray(..))
    }

    fn x_range(&self) -> (f64, f64) {
        match *self {
            Piece::Segment(a, b) => (a.x.min(b.x), a.x.max(b.x)),
            Piece::Ray(o, d) => {
                if d.x > 0.0 {
                    (o.x, f64::INFINITY)
                } else if d.x < 0.0 {
                    (f64::NEG_INFINITY, o.x)
                } else {
                    (o.x, o.x)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Contact {
    None,
    Point(Point),
    Overlap,
}

fn param_upper(p: &Piece) -> f64 {
    if p.is_ray() {
        f64::INFINITY
    } else {
        1.0
    }
}

/// Intersection of two pieces with absolute tolerance `tol`.
fn contact(p: &Piece, q: &Piece, tol: f64) -> Contact {
    let (o1, r) = (p.origin(), p.vector());
    let (o2, w) = (q.origin(), q.vector());
    let (rn, wn) = (r.norm(), w.norm());
    let denom = r.cross(w);
    let diff = o2 - o1;
    if denom.abs() > 1e-12 * rn * wn {
        let s = diff.cross(w) / denom;
        let u = diff.cross(r) / denom;
        let (smax, umax) = (param_upper(p), param_upper(q));
        let s_tol = tol / rn;
        let u_tol = tol / wn;
        if s >= -s_tol && s <= smax + s_tol && u >= -u_tol && u <= umax + u_tol {
            return Contact::Point(o1 + r * s.clamp(0.0, smax));
        }
        // Near-misses at endpoints: fall back to distance checks.
        for &(a, piece) in &[(o1, q), (o2, p)] {
            if distance_to_piece(a, piece) <= tol {
                return Contact::Point(a);
            }
        }
        if let Piece::Segment(_, b) = *p {
            if distance_to_piece(b, q) <= tol {
                return Contact::Point(b);
            }
        }
        if let Piece::Segment(_, b) = *q {
            if distance_to_piece(b, p) <= tol {
                return Contact::Point(b);
            }
        }
        return Contact::None;
    }
    // Parallel pieces.
    if diff.cross(r).abs() / rn > tol {
        return Contact::None;
    }
    // Collinear: project q onto p's parameter line, in length units.
    let rhat = r * (1.0 / rn);
    let p_lo: f64 = 0.0;
    let p_hi = if p.is_ray() { f64::INFINITY } else { rn };
    let t0 = diff.dot(rhat);
    let (q_lo, q_hi) = if q.is_ray() {
        if w.dot(rhat) > 0.0 {
            (t0, f64::INFINITY)
        } else {
            (f64::NEG_INFINITY, t0)
        }
    } else {
        let t1 = (o2 + w - o1).dot(rhat);
        (t0.min(t1), t0.max(t1))
    };
    let lo = p_lo.max(q_lo);
    let hi = p_hi.min(q_hi);
    if hi < lo - tol {
        Contact::None
    } else if hi - lo <= tol {
        Contact::Point(o1 + rhat * lo.max(0.0))
    } else {
        Contact::Overlap
    }
}

fn distance_to_piece(p: Point, piece: &Piece) -> f64 {
    match *piece {
        Piece::Segment(a, b) => super::point::point_segment_distance(p, a, b),
        Piece::Ray(o, d) => {
            let s = (p - o).dot(d).max(0.0);
            p.distance(o + d * s)
        }
    }
}

impl PolygonalLine {
    /// Closed polygon; a repeated closing vertex is dropped.
    pub fn closed(mut vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if vertices.len() >= 2 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices { needed: 3, got: vertices.len() });
        }
        Self::build(vertices, true, None)
    }

    /// Open bounded polyline.
    pub fn open(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if vertices.len() < 2 {
            return Err(GeometryError::TooFewVertices { needed: 2, got: vertices.len() });
        }
        Self::build(vertices, false, None)
    }

    /// Unbounded line: `first_ray` leaves the first vertex towards infinity,
    /// `last_ray` leaves the last vertex towards infinity.
    pub fn unbounded(vertices: Vec<Point>, first_ray: Point, last_ray: Point) -> Result<Self, GeometryError> {
        if vertices.is_empty() {
            return Err(GeometryError::TooFewVertices { needed: 1, got: 0 });
        }
        for (i, d) in [first_ray, last_ray].into_iter().enumerate() {
            if !d.is_finite() || d.norm() == 0.0 {
                return Err(GeometryError::BadRayDirection { index: i });
            }
        }
        Self::build(vertices, false, Some([first_ray.normalized(), last_ray.normalized()]))
    }

    fn build(vertices: Vec<Point>, closed: bool, rays: Option<[Point; 2]>) -> Result<Self, GeometryError> {
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(GeometryError::NonFiniteVertex { index: i });
        }
        Ok(Self { vertices, closed, rays, angle_overrides: Vec::new() })
    }

    /// Replace the computed angle factor at finite vertex `index` by `alpha`.
    pub fn with_angle_override(mut self, index: usize, alpha: f64) -> Result<Self, GeometryError> {
        if index >= self.vertices.len() {
            return Err(GeometryError::VertexIndex { index, len: self.vertices.len() });
        }
        self.angle_overrides.retain(|(i, _)| *i != index);
        self.angle_overrides.push((index, alpha));
        Ok(self)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn has_infinite_vertex(&self) -> bool {
        self.rays.is_some()
    }

    pub fn rays(&self) -> Option<[Point; 2]> {
        self.rays
    }

    pub fn angle_overrides(&self) -> &[(usize, f64)] {
        &self.angle_overrides
    }

    /// Bounds a domain (closed polygon or unbounded line).
    pub fn bounds_domain(&self) -> bool {
        self.closed || self.rays.is_some()
    }

    /// Twice the signed area of a closed polygon (positive when counterclockwise).
    pub fn signed_area2(&self) -> f64 {
        let n = self.vertices.len();
        (0..n).map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n])).sum()
    }

    /// Counterclockwise orientation; only meaningful for closed polygons.
    /// Unbounded lines are oriented by construction (domain on the left).
    pub fn is_counterclockwise(&self) -> bool {
        !self.closed || self.signed_area2() > 0.0
    }

    /// Same polygon traversed counterclockwise (identity for non-closed lines).
    pub fn to_counterclockwise(&self) -> Self {
        if self.is_counterclockwise() {
            return self.clone();
        }
        let n = self.vertices.len();
        let vertices = self.vertices.iter().rev().copied().collect();
        let angle_overrides = self.angle_overrides.iter().map(|&(i, a)| (n - 1 - i, a)).collect();
        Self { vertices, closed: true, rays: None, angle_overrides }
    }

    /// Reverse the traversal direction. For unbounded lines this swaps the
    /// bounded domain for its complement.
    pub fn reversed(&self) -> Self {
        let n = self.vertices.len();
        let vertices = self.vertices.iter().rev().copied().collect();
        let angle_overrides = self.angle_overrides.iter().map(|&(i, a)| (n - 1 - i, a)).collect();
        Self {
            vertices,
            closed: self.closed,
            rays: self.rays.map(|[a, b]| [b, a]),
            angle_overrides,
        }
    }

    /// Diameter of the finite vertex set (1 when degenerate).
    pub fn scale(&self) -> f64 {
        let mut d: f64 = 0.0;
        let (mut lo, mut hi) = (Point::new(f64::MAX, f64::MAX), Point::new(f64::MIN, f64::MIN));
        for p in &self.vertices {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if !self.vertices.is_empty() {
            d = (hi - lo).norm();
        }
        if d > 0.0 {
            d
        } else {
            1.0
        }
    }

    /// Absolute incidence tolerance at the scale of this line.
    pub fn tolerance(&self) -> f64 {
        INCIDENCE_TOL * self.scale()
    }

    /// Pieces in traversal order. Unbounded lines start and end with rays.
    pub fn pieces(&self) -> Vec<Piece> {
        let v = &self.vertices;
        let n = v.len();
        let mut out = Vec::with_capacity(n + 2);
        if let Some([first, _]) = self.rays {
            out.push(Piece::Ray(v[0], first));
        }
        for i in 0..n.saturating_sub(1) {
            out.push(Piece::Segment(v[i], v[i + 1]));
        }
        if self.closed {
            out.push(Piece::Segment(v[n - 1], v[0]));
        }
        if let Some([_, last]) = self.rays {
            out.push(Piece::Ray(v[n - 1], last));
        }
        out
    }

    /// Edge vectors `(from, to)` around each finite vertex: direction of the
    /// incoming edge and of the outgoing edge, in traversal order. `None` at
    /// the endpoints of an open polyline.
    pub(crate) fn vertex_directions(&self, i: usize) -> Option<(Point, Point)> {
        let v = &self.vertices;
        let n = v.len();
        let incoming = if i > 0 {
            Some(v[i] - v[i - 1])
        } else if self.closed {
            Some(v[0] - v[n - 1])
        } else {
            self.rays.map(|[first, _]| -first)
        };
        let outgoing = if i + 1 < n {
            Some(v[i + 1] - v[i])
        } else if self.closed {
            Some(v[0] - v[n - 1])
        } else {
            self.rays.map(|[_, last]| last)
        };
        Some((incoming?, outgoing?))
    }

    /// Whether no two non-adjacent pieces meet and adjacent pieces meet only
    /// at their shared vertex. Rays of unbounded lines are included.
    pub fn validate_simple(&self) -> Result<bool, GeometryError> {
        let pieces = self.pieces();
        let tol = self.tolerance();
        for (i, p) in pieces.iter().enumerate() {
            if let Piece::Segment(a, b) = p {
                if a.distance(*b) <= tol {
                    return Err(GeometryError::DegenerateEdge { index: self.edge_index(i) });
                }
            }
        }
        let m = pieces.len();
        let adjacent = |i: usize, j: usize| -> bool {
            let (i, j) = (i.min(j), i.max(j));
            j == i + 1 || (self.closed && i == 0 && j == m - 1)
        };
        let check = |i: usize, j: usize| -> bool {
            match contact(&pieces[i], &pieces[j], tol) {
                Contact::None => true,
                Contact::Overlap => false,
                Contact::Point(_) => adjacent(i, j),
            }
        };
        // Rays against everything.
        for i in 0..m {
            if pieces[i].is_ray() {
                for j in 0..m {
                    if j != i && !check(i, j) {
                        return Ok(false);
                    }
                }
            }
        }
        // Segments: sort by x-range and sweep.
        let mut order: Vec<usize> = (0..m).filter(|&i| !pieces[i].is_ray()).collect();
        order.sort_by(|&a, &b| pieces[a].x_range().0.total_cmp(&pieces[b].x_range().0));
        for (k, &i) in order.iter().enumerate() {
            let hi = pieces[i].x_range().1 + tol;
            for &j in &order[k + 1..] {
                if pieces[j].x_range().0 > hi {
                    break;
                }
                if !check(i, j) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Edge index in the user's numbering: segment `i` joins vertices i, i+1.
    fn edge_index(&self, piece: usize) -> usize {
        if self.rays.is_some() {
            piece.saturating_sub(1)
        } else {
            piece
        }
    }

    /// Point-in-polygon test for closed polygons (even-odd rule).
    pub fn contains(&self, p: Point) -> bool {
        if !self.closed {
            return false;
        }
        let v = &self.vertices;
        let n = v.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (v[i], v[j]);
            if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
                inside = !inside;
            }
            j = i;
        }
        inside
    }

    /// Area centroid of a closed polygon.
    pub fn centroid(&self) -> Point {
        let v = &self.vertices;
        let n = v.len();
        let a2 = self.signed_area2();
        if a2.abs() < 1e-300 {
            let s = v.iter().fold(Point::default(), |acc, &p| acc + p);
            return s * (1.0 / n as f64);
        }
        let mut c = Point::default();
        for i in 0..n {
            let (p, q) = (v[i], v[(i + 1) % n]);
            c = c + (p + q) * p.cross(q);
        }
        c * (1.0 / (3.0 * a2))
    }

    /// Whether the ray from vertex `index` in `direction` starts into the
    /// domain and meets the line nowhere else.
    pub fn ray_inside(&self, index: usize, direction: Point) -> bool {
        if !self.is_counterclockwise() {
            let n = self.vertices.len();
            return self.to_counterclockwise().ray_inside(n - 1 - index, direction);
        }
        let Some((inc, out)) = self.vertex_directions(index) else {
            return false;
        };
        let d = direction.normalized();
        let alpha = interior_alpha(inc, out, true);
        let from_out = ccw_angle(out, d);
        if !(from_out > 1e-12 && from_out < std::f64::consts::PI * alpha - 1e-12) {
            return false;
        }
        let origin = self.vertices[index];
        let ray = Piece::Ray(origin, d);
        let tol = self.tolerance();
        self.pieces().iter().all(|piece| match contact(&ray, piece, tol) {
            Contact::None => true,
            Contact::Point(q) => q.distance(origin) <= tol,
            Contact::Overlap => false,
        })
    }
}

/// Counterclockwise angle in [0, 2pi) from `a` to `b`.
pub(crate) fn ccw_angle(a: Point, b: Point) -> f64 {
    let t = a.turn_to(b);
    if t < 0.0 {
        t + 2.0 * std::f64::consts::PI
    } else {
        t
    }
}

/// Angle factor of the domain on the left (ccw) or right of the traversal.
pub(crate) fn interior_alpha(incoming: Point, outgoing: Point, left: bool) -> f64 {
    let turn = incoming.turn_to(outgoing) / std::f64::consts::PI;
    if left {
        1.0 - turn
    } else {
        1.0 + turn
    }
}
