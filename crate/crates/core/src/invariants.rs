//! Closed-form invariants of polygonal lines: exact values for unbounded
//! polygons, two-sided bounds for bounded ones, corner lower bounds and the
//! reflection bound of a set covered by several lines.

use serde::{Deserialize, Serialize};

use crate::geometry::schema::TailSpec;
use crate::geometry::{
    classify, interior_angles, merge_collinear, point_segment_distance, rhombus_at_vertex, rhombus_for_angle,
    AdjointReading, AngleFactor, AngleLocation, Classification, GeometryError, Piece, Point, PolygonalLine,
    COLLINEAR_TOL,
};

/// Result or hypothesis that produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Convex or concave unbounded polygon.
    ConvexConcave,
    /// Unbounded polygon with finitely many vertices.
    FiniteVertices,
    /// Unbounded polygon with countably many vertices.
    CountableVertices,
    /// Starlike unbounded polygon.
    Starlike,
    /// Bounded polygon.
    BoundedPolygon,
    /// Piecewise smooth bounded curve with corners.
    SmoothCorners,
    /// Corner lower bound.
    CornerBound,
    /// Set covered by several lines.
    SetCover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Exact,
    Bounds,
}

/// Grunsky norm, Teichmüller norm, reflection coefficient and reciprocal
/// Fredholm eigenvalue of one line.
///
/// Exact reports store a single value that all four quantities return. For
/// bounds reports the four quantities return the lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ReportJson", try_from = "ReportJson")]
pub struct InvariantReport {
    value: f64,
    status: Status,
    lower: Option<f64>,
    upper: Option<f64>,
    source: Source,
    notes: Vec<String>,
    downgraded: bool,
    non_informative: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ReportJson {
    kappa: f64,
    k: f64,
    q: f64,
    rho_inv: f64,
    status: Status,
    lower: Option<f64>,
    upper: Option<f64>,
    source: Source,
    notes: Vec<String>,
}

impl From<InvariantReport> for ReportJson {
    fn from(r: InvariantReport) -> Self {
        Self {
            kappa: r.value,
            k: r.value,
            q: r.value,
            rho_inv: r.value,
            status: r.status,
            lower: r.lower,
            upper: r.upper,
            source: r.source,
            notes: r.notes,
        }
    }
}

impl TryFrom<ReportJson> for InvariantReport {
    type Error = String;
    fn try_from(j: ReportJson) -> Result<Self, String> {
        if j.status == Status::Exact && !(j.kappa == j.k && j.k == j.q && j.q == j.rho_inv) {
            return Err("exact report with differing kappa, k, q, rho_inv".into());
        }
        if j.rho_inv > j.q {
            return Err("rho_inv exceeds q".into());
        }
        if let (Some(l), Some(u)) = (j.lower, j.upper) {
            if l > u {
                return Err("lower bound exceeds upper bound".into());
            }
        }
        let non_informative = j.upper.is_some_and(|u| u >= 1.0);
        Ok(Self {
            value: j.rho_inv,
            status: j.status,
            lower: j.lower,
            upper: j.upper,
            source: j.source,
            notes: j.notes,
            downgraded: false,
            non_informative,
        })
    }
}

impl InvariantReport {
    fn exact(value: f64, source: Source) -> Self {
        Self {
            value,
            status: Status::Exact,
            lower: None,
            upper: None,
            source,
            notes: Vec::new(),
            downgraded: false,
            non_informative: false,
        }
    }

    fn bounds(lower: f64, upper: Option<f64>, source: Source) -> Self {
        let non_informative = upper.is_some_and(|u| u >= 1.0);
        Self {
            value: lower,
            status: Status::Bounds,
            lower: Some(lower),
            upper,
            source,
            notes: Vec::new(),
            downgraded: false,
            non_informative,
        }
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    pub fn kappa(&self) -> f64 {
        self.value
    }

    pub fn k(&self) -> f64 {
        self.value
    }

    pub fn q(&self) -> f64 {
        self.value
    }

    pub fn rho_inv(&self) -> f64 {
        self.value
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn is_exact(&self) -> bool {
        self.status == Status::Exact
    }

    pub fn lower(&self) -> Option<f64> {
        self.lower
    }

    pub fn upper(&self) -> Option<f64> {
        self.upper
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    /// A theorem hypothesis failed and a weaker statement was reported.
    pub fn is_downgraded(&self) -> bool {
        self.downgraded
    }

    /// The upper bound is at least 1 and says nothing.
    pub fn is_non_informative(&self) -> bool {
        self.non_informative
    }

    /// Best available upper bound for `q`: the value when exact, else `upper`.
    pub fn q_upper(&self) -> Option<f64> {
        match self.status {
            Status::Exact => Some(self.value),
            Status::Bounds => self.upper,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InvariantError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("line is not simple")]
    NotSimple,
    #[error("expected an unbounded polygon")]
    NotUnbounded,
    #[error("expected a closed polygon")]
    NotClosed,
    #[error("deviation {0} is not below 1; outside the scope of the formula")]
    OutsideScope(f64),
    #[error("polygon is not starlike")]
    NotStarlike,
    #[error("deviation {0} must lie strictly between 0 and 1")]
    BetaOutOfRange(f64),
    #[error("no corners remain after merging collinear vertices")]
    NoCorners,
    #[error("corner list is empty; singular points are required")]
    EmptyCorners,
    #[error("tail deviation {0} must be finite and nonnegative")]
    BadTail(f64),
    #[error("no covering line")]
    NoCover,
    #[error("{reports} reports for {covers} covering lines")]
    ReportCountMismatch { covers: usize, reports: usize },
    #[error("covering line {cover} misses set point {point} by {distance:.3e}")]
    CoverMisses { cover: usize, point: usize, distance: f64 },
    #[error("report {0} carries no upper bound for q")]
    NoUpperBound(usize),
}

/// Angle data of the vertices beyond a finite truncation, plus the vertices
/// that should see infinity along a common direction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CountableTail {
    pub pattern: Option<TailSpec>,
    pub visible_vertices: Vec<usize>,
    pub infinite_direction: Option<Point>,
}

impl CountableTail {
    fn deviation(&self) -> Result<f64, InvariantError> {
        match &self.pattern {
            None => Ok(0.0),
            Some(TailSpec::Periodic { alphas }) => Ok(alphas.iter().map(|a| (1.0 - a).abs()).fold(0.0, f64::max)),
            Some(TailSpec::Sup { deviation }) => {
                if deviation.is_finite() && *deviation >= 0.0 {
                    Ok(*deviation)
                } else {
                    Err(InvariantError::BadTail(*deviation))
                }
            }
        }
    }
}

/// Angle factors of the merged line; a straight line yields only the
/// half-plane factor at infinity.
fn corner_angles(line: &PolygonalLine) -> Result<Vec<AngleFactor>, InvariantError> {
    if !line.validate_simple()? {
        return Err(InvariantError::NotSimple);
    }
    match merge_collinear(line) {
        Ok(m) => Ok(interior_angles(&m)),
        Err(GeometryError::NoCorners) if line.has_infinite_vertex() => Ok(vec![AngleFactor::infinity(-1.0)]),
        Err(GeometryError::NoCorners) => Err(InvariantError::NoCorners),
        Err(e) => Err(e.into()),
    }
}

fn finite(angles: &[AngleFactor]) -> impl Iterator<Item = f64> + '_ {
    angles.iter().filter(|a| !a.is_infinite()).map(|a| a.value)
}

fn at_infinity(angles: &[AngleFactor]) -> Option<f64> {
    angles.iter().find(|a| a.is_infinite()).map(|a| a.value)
}

fn max_finite_deviation(angles: &[AngleFactor]) -> f64 {
    finite(angles).map(|a| (1.0 - a).abs()).fold(0.0, f64::max)
}

/// Bounds from the corner data alone, used when a theorem's hypotheses fail
/// for an unbounded polygon.
fn fallback_bounds(angles: &[AngleFactor], reading: AdjointReading, why: &str) -> InvariantReport {
    let lower = max_finite_deviation(angles);
    let min_alpha = finite(angles).fold(f64::INFINITY, f64::min);
    let upper = rhombus_for_angle(min_alpha, 1.0, reading).ok().map(|r| lower + r.bound_term());
    let mut r = InvariantReport::bounds(lower, upper, Source::BoundedPolygon).note(why.to_string());
    r.downgraded = true;
    if r.non_informative {
        r = r.note("upper bound is at least 1 and carries no information");
    }
    r
}

/// Exact value `1 - min |alpha|` for unbounded convex polygons, including the
/// factor at infinity.
pub fn convex_unbounded(line: &PolygonalLine) -> Result<InvariantReport, InvariantError> {
    if !line.has_infinite_vertex() {
        return Err(InvariantError::NotUnbounded);
    }
    let angles = corner_angles(line)?;
    let inf = at_infinity(&angles).expect("unbounded");
    let finite_ok = finite(&angles).all(|a| a > 0.0 && a < 1.0);
    if !finite_ok || !(-1.0 - COLLINEAR_TOL..0.0).contains(&inf) {
        return Ok(fallback_bounds(
            &angles,
            AdjointReading::Default,
            "convexity hypotheses fail (finite factors in (0,1), factor at infinity in [-1,0)); corner bounds reported",
        ));
    }
    let min = angles.iter().map(|a| a.value.abs()).fold(f64::INFINITY, f64::min).min(1.0);
    Ok(InvariantReport::exact(1.0 - min, Source::ConvexConcave))
}

/// Exact value `|beta| - 1` for the complement of an unbounded convex
/// polygon, where `pi |beta|` is the largest interior angle.
pub fn concave_unbounded(line: &PolygonalLine) -> Result<InvariantReport, InvariantError> {
    if !line.has_infinite_vertex() {
        return Err(InvariantError::NotUnbounded);
    }
    let angles = corner_angles(line)?;
    let inf = at_infinity(&angles).expect("unbounded");
    let finite_ok = finite(&angles).all(|a| a > 1.0 && a < 2.0);
    if !finite_ok || !(-2.0..=-1.0 + COLLINEAR_TOL).contains(&inf) {
        return Ok(fallback_bounds(
            &angles,
            AdjointReading::Default,
            "concavity hypotheses fail (finite factors in (1,2), factor at infinity in (-2,-1]); corner bounds reported",
        ));
    }
    let max = angles.iter().map(|a| a.value.abs()).fold(1.0, f64::max);
    Ok(InvariantReport::exact(max - 1.0, Source::ConvexConcave))
}

/// Exact value `max(sup |1 - alpha_n|, |1 - |alpha_inf||)` for unbounded
/// polygons, optionally with a declared countable tail.
///
/// When the tail names vertices that should see infinity and one of them
/// does not, the report is downgraded to a lower bound.
pub fn rectilinear_unbounded(
    line: &PolygonalLine,
    tail: Option<&CountableTail>,
) -> Result<InvariantReport, InvariantError> {
    if !line.has_infinite_vertex() {
        return Err(InvariantError::NotUnbounded);
    }
    let angles = corner_angles(line)?;
    let tail_dev = tail.map(CountableTail::deviation).transpose()?.unwrap_or(0.0);
    let inf_dev = at_infinity(&angles).map(|a| (1.0 - a.abs()).abs()).unwrap_or(0.0);
    let finite_dev = max_finite_deviation(&angles);
    if finite_dev >= 1.0 || tail_dev >= 1.0 || inf_dev >= 1.0 {
        return Err(InvariantError::OutsideScope(finite_dev.max(tail_dev).max(inf_dev)));
    }
    let value = finite_dev.max(tail_dev).max(inf_dev);
    let source = if tail.is_some_and(|t| t.pattern.is_some()) { Source::CountableVertices } else { Source::FiniteVertices };
    let mut report = InvariantReport::exact(value, source);
    if let Some(t) = tail {
        if let Some(dir) = t.infinite_direction {
            let blocked: Vec<usize> = t
                .visible_vertices
                .iter()
                .copied()
                .filter(|&i| i >= line.len() || !line.ray_inside(i, dir))
                .collect();
            if !blocked.is_empty() {
                let mut r = InvariantReport::bounds(value, None, source).note(format!(
                    "vertices {blocked:?} do not see infinity along ({}, {}); value kept as a lower bound",
                    dir.x, dir.y
                ));
                r.downgraded = true;
                return Ok(r);
            }
            report = report.note(format!("all {} listed vertices see infinity along the declared ray", t.visible_vertices.len()));
        }
    }
    Ok(report)
}

/// Exact value `beta` (the deviation) for starlike unbounded polygons.
pub fn starlike_unbounded(line: &PolygonalLine) -> Result<InvariantReport, InvariantError> {
    if !line.has_infinite_vertex() {
        return Err(InvariantError::NotUnbounded);
    }
    let angles = corner_angles(line)?;
    match classify(line) {
        Classification::Starlike { .. } | Classification::Convex => {}
        _ => return Err(InvariantError::NotStarlike),
    }
    let beta = crate::geometry::deviation(&angles);
    if !(beta > 0.0 && beta < 1.0) {
        return Err(InvariantError::BetaOutOfRange(beta));
    }
    Ok(InvariantReport::exact(beta, Source::Starlike)
        .note("assumes the Schwarzian normalization at the base point; check with the conformal module"))
}

/// Bounds `max_j |1 - alpha_j| <= k <= max_j |1 - alpha_j| + b_P` for a
/// bounded polygon, with `b_P` from the rhombus at a smallest angle.
pub fn bounded_polygon(line: &PolygonalLine, reading: AdjointReading) -> Result<InvariantReport, InvariantError> {
    if !line.is_closed() {
        return Err(InvariantError::NotClosed);
    }
    let angles = corner_angles(line)?;
    let merged = merge_collinear(line)?;
    let lower = max_finite_deviation(&angles);
    let (idx, _) = angles
        .iter()
        .filter_map(|a| match a.location {
            AngleLocation::Finite(i) => Some((i, a.value)),
            _ => None,
        })
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    let rhombus = rhombus_at_vertex(&merged, idx, 1.0, reading)?;
    let upper = lower + rhombus.bound_term();
    let mut r = InvariantReport::bounds(lower, Some(upper), Source::BoundedPolygon);
    if r.non_informative {
        r = r.note(format!("upper bound {upper} is at least 1 and carries no information"));
    }
    if finite(&angles).any(|a| a > 1.0) {
        r = r.note("polygon has a non-convex vertex");
    }
    if let Some(ratio) = rectangle_ratio(&merged) {
        if ratio > 2.76 {
            r = r.note(format!("rectangle with side ratio {ratio:.4} > 2.76: its reflection coefficient exceeds 1/2"));
        }
    }
    Ok(r)
}

/// Lower bound `max_j |1 - alpha_j|` for a bounded polygon, without the
/// rhombus term.
pub fn bounded_polygon_lower(line: &PolygonalLine) -> Result<InvariantReport, InvariantError> {
    if !line.is_closed() {
        return Err(InvariantError::NotClosed);
    }
    let angles = corner_angles(line)?;
    Ok(InvariantReport::bounds(max_finite_deviation(&angles), None, Source::BoundedPolygon).note("lower bound without the rhombus term"))
}

/// Lower-bound-only report for a limit curve whose approximating polygons
/// all have corner deviation at most `lower`.
pub fn limit_lower_bound(lower: f64) -> InvariantReport {
    InvariantReport::bounds(lower, None, Source::BoundedPolygon).note("limit curve: lower bound only, not an exact value")
}

/// Long-to-short side ratio of a rectangle.
fn rectangle_ratio(line: &PolygonalLine) -> Option<f64> {
    let v = line.vertices();
    if v.len() != 4 || interior_angles(line).iter().any(|a| (a.value - 0.5).abs() > 1e-9) {
        return None;
    }
    let (a, b) = (v[0].distance(v[1]), v[1].distance(v[2]));
    Some(a.max(b) / a.min(b))
}

/// Bounds for a piecewise smooth bounded curve from its corner factors.
pub fn smooth_quasicircle(corners: &[f64], reading: AdjointReading) -> Result<InvariantReport, InvariantError> {
    let kept: Vec<f64> = corners.iter().copied().filter(|a| (a - 1.0).abs() > COLLINEAR_TOL).collect();
    if kept.is_empty() {
        return Err(InvariantError::EmptyCorners);
    }
    let lower = kept.iter().map(|a| (1.0 - a).abs()).fold(0.0, f64::max);
    let min = kept.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = rhombus_for_angle(min, 1.0, reading).ok().map(|r| lower + r.bound_term());
    let mut r = InvariantReport::bounds(lower, upper, Source::SmoothCorners);
    if r.non_informative {
        r = r.note("upper bound is at least 1 and carries no information");
    }
    if upper.is_none() {
        r = r.note("no salient corner; only the lower bound applies");
    }
    Ok(r)
}

/// `|1 - |alpha||`, a lower bound for `1/rho` at a corner of factor `alpha`.
pub fn corner_lower_bound(alpha: f64) -> f64 {
    (1.0 - alpha.abs()).abs()
}

/// A set `E` and lines each passing through every point of `E`.
#[derive(Debug, Clone)]
pub struct SetBoundRequest {
    pub set_points: Vec<Point>,
    pub covering_lines: Vec<PolygonalLine>,
}

/// Upper bound for the reflection coefficient of a set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetBound {
    pub value: f64,
    /// Index of the cover attaining the minimum.
    pub cover: usize,
    pub source: Source,
    pub notes: Vec<String>,
}

/// Tolerance for a set point to lie on a covering line.
pub const COVER_TOL: f64 = 1e-9;

fn distance_to_line(line: &PolygonalLine, p: Point) -> f64 {
    line.pieces()
        .iter()
        .map(|piece| match *piece {
            Piece::Segment(a, b) => point_segment_distance(p, a, b),
            Piece::Ray(a, d) => {
                let t = (p - a).dot(d).max(0.0);
                p.distance(a + d * t)
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// `min_j q(L_j)` over lines `L_j` containing `E`.
pub fn set_reflection_bound(request: &SetBoundRequest, reports: &[InvariantReport]) -> Result<SetBound, InvariantError> {
    let covers = &request.covering_lines;
    if covers.is_empty() {
        return Err(InvariantError::NoCover);
    }
    if covers.len() != reports.len() {
        return Err(InvariantError::ReportCountMismatch { covers: covers.len(), reports: reports.len() });
    }
    for (ci, line) in covers.iter().enumerate() {
        for (pi, &p) in request.set_points.iter().enumerate() {
            let d = distance_to_line(line, p);
            if d > COVER_TOL {
                return Err(InvariantError::CoverMisses { cover: ci, point: pi, distance: d });
            }
        }
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, r) in reports.iter().enumerate() {
        let q = r.q_upper().ok_or(InvariantError::NoUpperBound(i))?;
        if best.is_none_or(|(_, b)| q < b) {
            best = Some((i, q));
        }
    }
    let (cover, value) = best.expect("nonempty");
    let mut notes = Vec::new();
    if contains_extremal_corner(&covers[cover], &request.set_points) {
        notes.push("E contains an extremal corner with points on both adjacent sides: the bound is attained".to_string());
    }
    Ok(SetBound { value, cover, source: Source::SetCover, notes })
}

/// Whether `points` contain a vertex of largest deviation together with a
/// further point on each adjacent piece.
fn contains_extremal_corner(line: &PolygonalLine, points: &[Point]) -> bool {
    let Ok(merged) = merge_collinear(line) else {
        return false;
    };
    let angles = interior_angles(&merged);
    let dev = max_finite_deviation(&angles);
    if dev == 0.0 {
        return false;
    }
    let pieces = merged.pieces();
    let n = merged.len();
    let closed = merged.is_closed();
    let unbounded = merged.has_infinite_vertex();
    angles.iter().any(|a| {
        let AngleLocation::Finite(i) = a.location else {
            return false;
        };
        if ((1.0 - a.value).abs() - dev).abs() > 1e-12 {
            return false;
        }
        let v = merged.vertices()[i];
        let tol = COVER_TOL.max(merged.tolerance());
        if !points.iter().any(|p| p.distance(v) <= tol) {
            return false;
        }
        // pieces before and after vertex i
        let (before, after) = match (closed, unbounded) {
            (true, _) => ((i + n - 1) % n, i),
            (false, true) => (i, i + 1),
            (false, false) => {
                if i == 0 || i + 1 >= n {
                    return false;
                }
                (i - 1, i)
            }
        };
        let on = |k: usize| {
            points.iter().any(|&p| {
                p.distance(v) > tol
                    && match pieces[k] {
                        Piece::Segment(a, b) => point_segment_distance(p, a, b) <= tol,
                        Piece::Ray(a, d) => {
                            let t = (p - a).dot(d).max(0.0);
                            p.distance(a + d * t) <= tol
                        }
                    }
            })
        };
        on(before) && on(after)
    })
}

/// Pick the applicable result for a line: bounds for closed polygons, the
/// convex or concave formula where it applies, else the general unbounded
/// formula.
pub fn evaluate(
    line: &PolygonalLine,
    tail: Option<&CountableTail>,
    reading: AdjointReading,
) -> Result<InvariantReport, InvariantError> {
    if line.is_closed() {
        return bounded_polygon(line, reading);
    }
    if !line.has_infinite_vertex() {
        return Err(InvariantError::NotUnbounded);
    }
    let has_tail = tail.is_some_and(|t| t.pattern.is_some() || t.infinite_direction.is_some());
    if !has_tail {
        let angles = corner_angles(line)?;
        let inf = at_infinity(&angles).expect("unbounded");
        if finite(&angles).all(|a| a > 0.0 && a < 1.0) && (-1.0 - COLLINEAR_TOL..0.0).contains(&inf) {
            return convex_unbounded(line);
        }
        if finite(&angles).all(|a| a > 1.0 && a < 2.0) && (-2.0..=-1.0 + COLLINEAR_TOL).contains(&inf) {
            return concave_unbounded(line);
        }
    }
    rectilinear_unbounded(line, tail)
}
