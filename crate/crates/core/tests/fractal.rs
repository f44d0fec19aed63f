use num_complex::Complex64;
use proptest::prelude::*;
use quasipoly::fractal::{
    closed_snowflake, extend_periodic, hausdorff_dimension, hausdorff_distance, iterate, iteration_csv,
    iteration_invariants, koch_spec, ladder, LadderSpec, Similarity,
};
use quasipoly::geometry::{point_segment_distance, AdjointReading};
use quasipoly::{Point, PolygonalLine};

fn z(p: Point) -> Complex64 {
    p.to_complex()
}

fn apply(s: &Similarity, p: Point) -> Point {
    Point::from_complex(Complex64::new(s.a[0], s.a[1]) * z(p) + Complex64::new(s.b[0], s.b[1]))
}

/// Directed distance by dense sampling of `a` against exact segment
/// distances to `b`.
fn sampled_directed(a: &PolygonalLine, b: &PolygonalLine, samples: usize) -> f64 {
    let (va, vb) = (a.vertices(), b.vertices());
    let mut worst: f64 = 0.0;
    for s in va.windows(2) {
        for k in 0..=samples {
            let t = k as f64 / samples as f64;
            let q = s[0] + (s[1] - s[0]) * t;
            let d = vb.windows(2).map(|w| point_segment_distance(q, w[0], w[1])).fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
    }
    worst
}

#[test]
fn koch_base_points() {
    let s = koch_spec(1.0 / 3.0).unwrap();
    let want = [(0.0, 0.0), (2.0, 0.0), (3.0, 3f64.sqrt()), (4.0, 0.0), (6.0, 0.0)];
    for (p, w) in s.base_points.iter().zip(want) {
        assert!((p.x - w.0).abs() < 1e-14 && (p.y - w.1).abs() < 1e-14);
    }
    for (j, sim) in s.similarities.iter().enumerate() {
        assert!((sim.ratio() - 1.0 / 3.0).abs() < 1e-14);
        assert!(apply(sim, s.base_points[0]).distance(s.base_points[j]) < 1e-14);
        assert!(apply(sim, s.base_points[4]).distance(s.base_points[j + 1]) < 1e-14);
    }
    let flat = koch_spec(0.25 + 1e-9).unwrap();
    assert!(flat.base_points[2].y < 1e-3);
    assert!(koch_spec(0.25).is_err() && koch_spec(0.5).is_err());
}

#[test]
fn iterates_and_self_similarity() {
    let s = koch_spec(1.0 / 3.0).unwrap();
    let p0 = iterate(&s, 0).unwrap();
    assert_eq!(p0.vertices(), &[Point::new(0.0, 0.0), Point::new(6.0, 0.0)]);
    assert_eq!(iterate(&s, 1).unwrap().vertices(), &s.base_points[..]);
    for p in 0..5 {
        let cur = iterate(&s, p).unwrap();
        let next = iterate(&s, p + 1).unwrap();
        assert_eq!(next.len(), 4usize.pow(p as u32 + 1) + 1);
        let m = 4usize.pow(p as u32);
        for (j, sim) in s.similarities.iter().enumerate() {
            for (k, q) in cur.vertices().iter().enumerate() {
                assert!(apply(sim, *q).distance(next.vertices()[j * m + k]) < 1e-12);
            }
        }
        assert_eq!(next.vertices()[0], Point::new(0.0, 0.0));
        assert!(next.vertices()[next.len() - 1].distance(Point::new(6.0, 0.0)) < 1e-12);
    }
}

#[test]
fn periodic_extensions() {
    let s = koch_spec(1.0 / 3.0).unwrap();
    let one = extend_periodic(&s, 2, 1).unwrap();
    assert_eq!(one.vertices(), iterate(&s, 2).unwrap().vertices());
    assert!(one.has_infinite_vertex());
    let three = extend_periodic(&s, 1, 3).unwrap();
    assert_eq!(three.len(), 13);
    for k in 0..5 {
        let base = s.base_points[k];
        assert!(three.vertices()[4 + k].distance(base + Point::new(6.0, 0.0)) < 1e-12);
        assert!(three.vertices()[8 + k].distance(base + Point::new(12.0, 0.0)) < 1e-12);
    }
    assert!(extend_periodic(&s, 1, 0).is_err());
}

#[test]
fn hausdorff_examples_and_oracle() {
    let s = koch_spec(1.0 / 3.0).unwrap();
    let a = iterate(&s, 2).unwrap();
    assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
    let d01 = hausdorff_distance(&iterate(&s, 0).unwrap(), &iterate(&s, 1).unwrap()).unwrap();
    assert!((d01 - 3f64.sqrt()).abs() < 1e-9);
    for p in 1..4 {
        let (x, y) = (iterate(&s, p).unwrap(), iterate(&s, p + 1).unwrap());
        let fast = hausdorff_distance(&x, &y).unwrap();
        let slow = sampled_directed(&x, &y, 64).max(sampled_directed(&y, &x, 64));
        assert!(slow <= fast + 1e-9 && fast - slow < 1e-3 * fast, "{fast} vs {slow}");
    }
    for t in [0.3, 0.4, 0.45] {
        let s = koch_spec(t).unwrap();
        let d: Vec<f64> =
            (0..5).map(|p| hausdorff_distance(&iterate(&s, p).unwrap(), &iterate(&s, p + 1).unwrap()).unwrap()).collect();
        for p in 2..5 {
            assert!((d[p] / d[p - 1] - t).abs() <= 0.05, "t = {t}: {d:?}");
        }
    }
}

#[test]
fn dimension_examples() {
    assert!((hausdorff_dimension(1.0 / 3.0).unwrap() - 1.26186).abs() < 1e-5);
    assert!((hausdorff_dimension(0.25 + 1e-12).unwrap() - 1.0).abs() < 1e-9);
    assert!((hausdorff_dimension(0.5 - 1e-12).unwrap() - 2.0).abs() < 1e-9);
}

fn turn_factor(a: Point, b: Point, c: Point) -> f64 {
    // interior factor on the left for a walk a -> b -> c
    let (u, v) = (b - a, c - b);
    let turn = u.cross(v).atan2(u.dot(v)) / std::f64::consts::PI;
    1.0 - turn
}

#[test]
fn iteration_reports() {
    let s = koch_spec(1.0 / 3.0).unwrap();
    let r = iteration_invariants(&s, 2, 2, AdjointReading::Default).unwrap();
    // p = 1 oracle from the five base points
    let b = s.base_points;
    let want = (1..4).map(|k| (1.0 - turn_factor(b[k - 1], b[k], b[k + 1])).abs()).fold(0.0, f64::max);
    assert!((r.iterates[1].upper_side.k() - want).abs() < 1e-12);
    assert!(r.iterates[1].upper_side.is_exact() && r.iterates[1].lower_side.is_exact());
    assert_eq!(r.iterates[0].upper_side.k(), 0.0);
    assert!(!r.limit.is_exact());
    assert!(r.limit.upper().is_none());
    assert!(r.iterates.iter().all(|it| it.closed.lower() == it.closed_lower.lower()));

    for n in 1..=5 {
        let (l, tail) = ladder(&LadderSpec::uniform(n)).unwrap();
        assert!(l.validate_simple().unwrap());
        let v = quasipoly::invariants::rectilinear_unbounded(&l, Some(&tail)).unwrap();
        assert!(v.is_exact() && (v.k() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn closed_snowflake_is_simple_and_outward() {
    let s = koch_spec(1.0 / 3.0).unwrap();
    for p in 0..4 {
        let c = closed_snowflake(&s, p).unwrap();
        assert_eq!(c.len(), 3 * 4usize.pow(p as u32));
        assert!(c.validate_simple().unwrap());
    }
    // the first tooth points away from the triangle's centroid
    let c = closed_snowflake(&s, 1).unwrap();
    let centroid = Point::new(3.0, 3f64.sqrt());
    let apex = c.vertices()[2];
    let foot = Point::new(1.5, 1.5 * 3f64.sqrt());
    assert!(apex.distance(centroid) > foot.distance(centroid));
}

#[test]
fn csv_rows() {
    let s = koch_spec(1.0 / 3.0).unwrap();
    let csv = iteration_csv(&s, 2, 1).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "p,d_H,value");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0,,"));
}

#[test]
fn bad_ladders_rejected() {
    assert!(ladder(&LadderSpec { crossbars: vec![1.0], heights: vec![] }).is_err());
    assert!(ladder(&LadderSpec { crossbars: vec![1.0, -1.0], heights: vec![1.0, 1.0] }).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dimension_increasing(a in 0.2501f64..0.4999, b in 0.2501f64..0.4999) {
        prop_assume!((a - b).abs() > 1e-9);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(hausdorff_dimension(lo).unwrap() < hausdorff_dimension(hi).unwrap());
    }

    #[test]
    fn similarity_ratios_and_endpoints(t in 0.26f64..0.49) {
        let s = koch_spec(t).unwrap();
        for (j, sim) in s.similarities.iter().enumerate() {
            prop_assert!((sim.ratio() - t).abs() < 1e-12);
            prop_assert!(apply(sim, s.base_points[0]).distance(s.base_points[j]) < 1e-12);
            prop_assert!(apply(sim, s.base_points[4]).distance(s.base_points[j + 1]) < 1e-12);
        }
        let it = iterate(&s, 3).unwrap();
        prop_assert_eq!(it.vertices()[0], s.base_points[0]);
        prop_assert!(it.vertices()[it.len() - 1].distance(s.base_points[4]) < 1e-12);
    }
}
