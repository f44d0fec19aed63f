use std::f64::consts::PI;

use proptest::prelude::*;
use quasipoly::fractal::{ladder, LadderSpec};
use quasipoly::geometry::{interior_angles, AdjointReading};
use quasipoly::invariants::{
    bounded_polygon, concave_unbounded, convex_unbounded, corner_lower_bound, evaluate, rectilinear_unbounded,
    set_reflection_bound, smooth_quasicircle, starlike_unbounded, InvariantError, InvariantReport,
    SetBoundRequest, Source, Status,
};
use quasipoly::{Point, PolygonalLine};

const D: AdjointReading = AdjointReading::Default;

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

fn dir(t: f64) -> Point {
    p(t.cos(), t.sin())
}

fn closed(v: &[(f64, f64)]) -> PolygonalLine {
    PolygonalLine::closed(v.iter().map(|&(x, y)| p(x, y)).collect()).unwrap()
}

/// Corner at the origin with the domain between the rays at angles 0 and
/// `pi * alpha`.
fn wedge(alpha: f64) -> PolygonalLine {
    PolygonalLine::unbounded(vec![p(0., 0.)], dir(PI * alpha), p(1., 0.)).unwrap()
}

fn exterior(alpha: f64) -> PolygonalLine {
    wedge(alpha).reversed()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

#[test]
fn convex_examples() {
    let r = convex_unbounded(&wedge(0.5)).unwrap();
    assert!(r.is_exact() && close(r.k(), 0.5));
    assert_eq!(r.source(), Source::ConvexConcave);
    assert!(close(convex_unbounded(&wedge(1.0 / 3.0)).unwrap().k(), 2.0 / 3.0));
    let half = PolygonalLine::unbounded(vec![p(0., 0.)], p(-1., 0.), p(1., 0.)).unwrap();
    assert_eq!(convex_unbounded(&half).unwrap().k(), 0.0);
}

#[test]
fn concave_examples() {
    assert!(close(concave_unbounded(&exterior(0.5)).unwrap().k(), 0.5));
    assert!(close(concave_unbounded(&exterior(1.0 / 3.0)).unwrap().k(), 2.0 / 3.0));
    let half = PolygonalLine::unbounded(vec![p(0., 0.)], p(1., 0.), p(-1., 0.)).unwrap();
    assert_eq!(concave_unbounded(&half).unwrap().k(), 0.0);
}

#[test]
fn hypothesis_failure_falls_back_to_bounds() {
    let r = convex_unbounded(&exterior(0.5)).unwrap();
    assert!(!r.is_exact() && r.is_downgraded());
    assert_eq!(r.source(), Source::BoundedPolygon);
    assert!(!r.notes().is_empty());
}

#[test]
fn rectilinear_examples() {
    let (line, tail) = ladder(&LadderSpec::uniform(6)).unwrap();
    let r = rectilinear_unbounded(&line, Some(&tail)).unwrap();
    assert!(r.is_exact() && close(r.k(), 0.5));
    assert_eq!(r.source(), Source::CountableVertices);
    let bend = PolygonalLine::unbounded(vec![p(0., 0.)], p(-1., 0.), p(0., 1.)).unwrap();
    assert!(close(rectilinear_unbounded(&bend, None).unwrap().k(), 0.5));
    let straight = PolygonalLine::unbounded(vec![p(0., 0.), p(1., 0.)], p(-1., 0.), p(1., 0.)).unwrap();
    assert_eq!(rectilinear_unbounded(&straight, None).unwrap().k(), 0.0);
    let strip = PolygonalLine::unbounded(vec![p(0., 0.), p(1., 0.)], p(0., 1.), p(0., 1.)).unwrap();
    assert!(matches!(rectilinear_unbounded(&strip, None), Err(InvariantError::OutsideScope(_))));
}

#[test]
fn blocked_visibility_downgrades() {
    let (line, mut tail) = ladder(&LadderSpec::uniform(4)).unwrap();
    tail.infinite_direction = Some(p(1., -1.));
    let r = rectilinear_unbounded(&line, Some(&tail)).unwrap();
    assert!(r.is_downgraded() && !r.is_exact());
    assert_eq!(r.lower(), Some(0.5));
    assert_eq!(r.upper(), None);
}

#[test]
fn starlike_examples() {
    // saw tooth: corners 3/4, 3/2, 3/4 and a half-plane at infinity
    let saw = PolygonalLine::unbounded(vec![p(0., 0.), p(1., 1.), p(2., 0.)], p(-1., 0.), p(1., 0.)).unwrap();
    let r = starlike_unbounded(&saw).unwrap();
    assert!(close(r.k(), 0.5));
    assert_eq!(r.source(), Source::Starlike);
    let w = wedge(0.4);
    assert!(close(starlike_unbounded(&w).unwrap().k(), convex_unbounded(&w).unwrap().k()));
    let flat = PolygonalLine::unbounded(vec![p(0., 0.), p(1., 1e-3), p(2., 0.)], p(-1., 0.), p(1., 0.)).unwrap();
    assert!(starlike_unbounded(&flat).unwrap().k() < 1e-3);
}

#[test]
fn bounded_examples() {
    let sq = bounded_polygon(&closed(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]), D).unwrap();
    assert_eq!(sq.status(), Status::Bounds);
    assert!(close(sq.lower().unwrap(), 0.5));
    assert!(close(sq.upper().unwrap(), 1.0));
    assert!(sq.is_non_informative());
    let tri = bounded_polygon(&closed(&[(0., 0.), (1., 0.), (0.5, 3f64.sqrt() / 2.0)]), D).unwrap();
    assert!(close(tri.lower().unwrap(), 2.0 / 3.0));
    let thin = bounded_polygon(&closed(&[(0., 0.), (4., 0.), (4., 1.), (0., 1.)]), D).unwrap();
    assert!(close(thin.lower().unwrap(), 0.5));
    assert!(thin.notes().iter().any(|n| n.contains("2.76")));
    let squat = bounded_polygon(&closed(&[(0., 0.), (2., 0.), (2., 1.), (0., 1.)]), D).unwrap();
    assert!(!squat.notes().iter().any(|n| n.contains("2.76")));
}

#[test]
fn smooth_curve_examples() {
    let sq = bounded_polygon(&closed(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]), D).unwrap();
    let rounded = smooth_quasicircle(&[0.5], D).unwrap();
    assert_eq!(rounded.lower(), sq.lower());
    assert_eq!(rounded.upper(), sq.upper());
    assert!(close(smooth_quasicircle(&[0.25], D).unwrap().lower().unwrap(), 0.75));
    assert!(close(smooth_quasicircle(&[1.0, 0.25], D).unwrap().lower().unwrap(), 0.75));
}

#[test]
fn corner_bounds() {
    assert_eq!(corner_lower_bound(0.5), 0.5);
    assert_eq!(corner_lower_bound(1.0), 0.0);
    assert_eq!(corner_lower_bound(1.5), 0.5);
}

fn reports(lines: &[PolygonalLine]) -> Vec<InvariantReport> {
    lines.iter().map(|l| evaluate(l, None, D).unwrap()).collect()
}

#[test]
fn set_bound_examples() {
    let straight = PolygonalLine::unbounded(vec![p(0., 0.), p(1., 0.)], p(-1., 0.), p(1., 0.)).unwrap();
    let req = SetBoundRequest { set_points: vec![p(0.2, 0.), p(3., 0.)], covering_lines: vec![straight] };
    assert_eq!(set_reflection_bound(&req, &reports(&req.covering_lines)).unwrap().value, 0.0);

    let (lad, tail) = ladder(&LadderSpec::uniform(4)).unwrap();
    let corner = lad.vertices()[0];
    let req = SetBoundRequest {
        set_points: vec![corner, corner + p(-0.1, 0.), corner + p(0., 0.1)],
        covering_lines: vec![lad.clone()],
    };
    let rep = vec![rectilinear_unbounded(&lad, Some(&tail)).unwrap()];
    let b = set_reflection_bound(&req, &rep).unwrap();
    assert!(close(b.value, 0.5), "{b:?} {rep:?}");
    assert!(!b.notes.is_empty());

    let bend = PolygonalLine::unbounded(vec![p(0., 0.)], p(-1., 0.), p(0., 1.)).unwrap();
    let sharp = PolygonalLine::unbounded(vec![p(0., 0.)], p(-1., 0.), dir(2.0 * PI / 3.0)).unwrap();
    let req = SetBoundRequest { set_points: vec![p(0., 0.), p(-1., 0.)], covering_lines: vec![sharp, bend] };
    let b = set_reflection_bound(&req, &reports(&req.covering_lines)).unwrap();
    assert!(close(b.value, 0.5));
    assert_eq!(b.cover, 1);
}

#[test]
fn set_bound_rejects_missed_points() {
    let bend = PolygonalLine::unbounded(vec![p(0., 0.)], p(-1., 0.), p(0., 1.)).unwrap();
    let req = SetBoundRequest { set_points: vec![p(1., 1.)], covering_lines: vec![bend] };
    assert!(matches!(
        set_reflection_bound(&req, &reports(&req.covering_lines)),
        Err(InvariantError::CoverMisses { .. })
    ));
}

#[test]
fn report_json_round_trip() {
    let r = convex_unbounded(&wedge(0.5)).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for k in ["kappa", "k", "q", "rho_inv"] {
        assert_eq!(v[k].as_f64(), Some(r.k()));
        assert!(close(r.k(), 0.5));
    }
    let back: InvariantReport = serde_json::from_value(v).unwrap();
    assert_eq!(back, r);
    let b = bounded_polygon(&closed(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]), D).unwrap();
    let back: InvariantReport = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
    assert_eq!(back, b);
}

/// Unbounded polygon turning left at each vertex by the given fractions of pi,
/// starting eastward along the negative real axis.
fn left_turning(turns: &[f64], step: f64) -> Option<PolygonalLine> {
    let mut heading = 0.0;
    let mut pts = vec![p(0., 0.)];
    for (k, t) in turns.iter().enumerate() {
        heading += PI * t;
        if k + 1 < turns.len() {
            let last = *pts.last().unwrap();
            pts.push(last + dir(heading) * step);
        }
    }
    PolygonalLine::unbounded(pts, p(-1., 0.), dir(heading)).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convex_and_general_formulas_agree(turns in prop::collection::vec(0.02f64..0.3, 1..4)) {
        prop_assume!(turns.iter().sum::<f64>() < 0.98);
        let line = left_turning(&turns, 1.0).unwrap();
        prop_assume!(line.validate_simple().unwrap_or(false));
        let a = convex_unbounded(&line).unwrap();
        let b = rectilinear_unbounded(&line, None).unwrap();
        prop_assert!(a.is_exact() && b.is_exact());
        prop_assert!((a.k() - b.k()).abs() < 1e-12);
    }

    #[test]
    fn bounded_lower_is_max_corner_bound(ts in prop::collection::vec(0.0f64..1.0, 3..9), rs in prop::collection::vec(0.5f64..1.0, 9)) {
        let mut ts = ts;
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() < 0.03);
        prop_assume!(ts.len() >= 3 && ts[0] + 1.0 - ts[ts.len() - 1] > 0.03);
        // star-shaped about the origin only when every angular gap is below a half turn
        let max_gap = ts.windows(2).map(|w| w[1] - w[0]).fold(ts[0] + 1.0 - ts[ts.len() - 1], f64::max);
        prop_assume!(max_gap < 0.45);
        let pts: Vec<Point> = ts.iter().zip(&rs).map(|(t, r)| dir(2.0 * PI * t) * *r).collect();
        let line = PolygonalLine::closed(pts).unwrap();
        prop_assume!(interior_angles(&line).iter().all(|a| (a.value - 1.0).abs() > 1e-6));
        let want = interior_angles(&line).iter().map(|a| corner_lower_bound(a.value)).fold(0.0, f64::max);
        for reading in [AdjointReading::Default, AdjointReading::Supplementary] {
            let r = bounded_polygon(&line, reading).unwrap();
            prop_assert!((r.lower().unwrap() - want).abs() < 1e-12);
            prop_assert!(r.lower().unwrap() <= r.upper().unwrap());
            prop_assert!(r.rho_inv() <= r.q() && r.q() >= 0.0 && r.q() < 1.0);
        }
    }

    #[test]
    fn exact_reports_are_consistent(alpha in 0.05f64..0.95, concave in any::<bool>()) {
        let line = if concave { exterior(alpha) } else { wedge(alpha) };
        let r = evaluate(&line, None, D).unwrap();
        prop_assert!(r.is_exact());
        prop_assert!(r.kappa() == r.k() && r.k() == r.q() && r.q() == r.rho_inv());
        prop_assert!((r.k() - (1.0 - alpha)).abs() < 1e-12);
    }

    #[test]
    fn set_bound_monotone(alphas in prop::collection::vec(0.1f64..0.9, 1..6)) {
        // every cover passes through the corner and along the negative axis
        let lines: Vec<PolygonalLine> = alphas
            .iter()
            .map(|a| PolygonalLine::unbounded(vec![p(0., 0.)], p(-1., 0.), dir(PI * (1.0 - a))).unwrap())
            .collect();
        let set = vec![p(0., 0.), p(-0.5, 0.)];
        let reps = reports(&lines);
        let mut prev = f64::INFINITY;
        for k in 1..=lines.len() {
            let req = SetBoundRequest { set_points: set.clone(), covering_lines: lines[..k].to_vec() };
            let b = set_reflection_bound(&req, &reps[..k]).unwrap();
            prop_assert!(b.value <= prev);
            prev = b.value;
        }
    }
}
