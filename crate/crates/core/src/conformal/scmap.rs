use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::quadrature::Integrand;
use super::ConformalError;
use crate::config;
use crate::geometry::{interior_angles, merge_collinear, AngleFactor, Point, PolygonalLine};

/// Schwarz–Christoffel map of the unit disk onto a polygon,
/// `f(z) = A + C int_0^z prod_k (1 - s/z_k)^(alpha_k - 1) ds`.
///
/// Prevertices are stored in traversal order (counterclockwise on the
/// circle). For unbounded polygons the prevertex of the vertex at infinity
/// comes last.
#[derive(Debug, Clone)]
pub struct ScMap {
    integrand: Integrand,
    angle_factors: Vec<AngleFactor>,
    /// Images of the prevertices; `None` for the vertex at infinity.
    vertices: Vec<Option<Complex64>>,
    multiplier: Complex64,
    translation: Complex64,
    side_residual: f64,
    iterations: usize,
}

/// Summary suitable for reports.
#[derive(Debug, Clone, Serialize)]
pub struct ScMapSummary {
    pub prevertices: Vec<[f64; 2]>,
    pub angle_factors: Vec<f64>,
    pub multiplier: [f64; 2],
    pub translation: [f64; 2],
    pub side_residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub nodes: usize,
    pub budget: usize,
    pub tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { nodes: config::QUADRATURE_NODES, budget: config::SOLVER_BUDGET, tol: config::SOLVER_TOL }
    }
}

/// Gauge: three prevertices pinned at fixed roots of unity; the others are
/// parameterized by log-gaps within the arcs between pins.
struct Gauge {
    n: usize,
    pins: Vec<usize>,
}

impl Gauge {
    fn new(n: usize) -> Self {
        let pins = if n >= 3 { vec![0, n / 3, 2 * n / 3] } else { (0..n).collect() };
        Self { n, pins }
    }

    fn unknowns(&self) -> usize {
        self.n - self.pins.len()
    }

    fn pin_angle(&self, idx: usize) -> f64 {
        2.0 * PI * idx as f64 / self.n as f64
    }

    /// Prevertex angles from free log-gap variables.
    fn angles(&self, y: &[f64]) -> Vec<f64> {
        let mut theta = vec![0.0; self.n];
        let mut used = 0;
        let m = self.pins.len();
        for p in 0..m {
            let a = self.pins[p];
            let b = if p + 1 < m { self.pins[p + 1] } else { self.n };
            let (ta, tb) = (self.pin_angle(a), if p + 1 < m { self.pin_angle(b) } else { 2.0 * PI });
            let free = b - a - 1;
            // gaps proportional to exp(0), exp(y_1), ..., exp(y_free)
            let mut w = Vec::with_capacity(free + 1);
            w.push(1.0);
            for &v in &y[used..used + free] {
                w.push(v.exp());
            }
            used += free;
            let total: f64 = w.iter().sum();
            theta[a] = ta;
            let mut acc = ta;
            for (i, wi) in w.iter().take(free).enumerate() {
                acc += (tb - ta) * wi / total;
                theta[a + 1 + i] = acc;
            }
        }
        theta
    }
}

impl ScMap {
    /// Solve the parameter problem for `line`.
    pub fn solve(line: &PolygonalLine, opts: &SolveOptions) -> Result<Self, ConformalError> {
        if !line.bounds_domain() {
            return Err(ConformalError::NotADomain);
        }
        if !line.validate_simple()? {
            return Err(ConformalError::NotSimple);
        }
        let bare = strip_overrides(line)?;
        let merged = merge_collinear(&bare)?.to_counterclockwise();
        let angles = interior_angles(&merged);
        let m = merged.len();
        let bounded = merged.is_closed();
        if bounded && m < 3 {
            return Err(ConformalError::TooFewCorners(m));
        }
        let n = angles.len();
        let vertices: Vec<Option<Complex64>> = merged
            .vertices()
            .iter()
            .map(|p| Some(p.to_complex()))
            .chain((!bounded).then_some(None))
            .collect();
        let exponents: Vec<f64> = angles.iter().map(|a| a.value - 1.0).collect();
        let gauge = Gauge::new(n);
        // finite sides k joins finite vertices k and k+1 (cyclic when bounded)
        let sides: Vec<(usize, usize)> = if bounded {
            (0..m).map(|k| (k, (k + 1) % m)).collect()
        } else {
            (0..m.saturating_sub(1)).map(|k| (k, k + 1)).collect()
        };
        let lengths: Vec<f64> = sides
            .iter()
            .map(|&(a, b)| (vertices[b].unwrap() - vertices[a].unwrap()).norm())
            .collect();
        let conditions = gauge.unknowns();
        debug_assert!(conditions <= sides.len().saturating_sub(1));

        let build = |y: &[f64]| -> Integrand {
            let pts = gauge.angles(y).into_iter().map(|t| Complex64::from_polar(1.0, t)).collect();
            Integrand::new(pts, exponents.clone(), opts.nodes)
        };
        let residual = |ig: &Integrand| -> Vec<f64> {
            let i0 = ig.between_points(sides[0].0, sides[0].1).norm().ln();
            (1..=conditions)
                .map(|k| {
                    let ik = ig.between_points(sides[k].0, sides[k].1).norm().ln();
                    (ik - i0) - (lengths[k] / lengths[0]).ln()
                })
                .collect()
        };

        let mut y = vec![0.0; conditions];
        let mut iterations = 0;
        if conditions > 0 {
            let mut r = residual(&build(&y));
            let mut lambda = 1e-3;
            loop {
                let rnorm = inf_norm(&r);
                if rnorm < opts.tol {
                    break;
                }
                if iterations >= opts.budget {
                    return Err(ConformalError::NonConvergence { iterations, residual: rnorm });
                }
                iterations += 1;
                let jac = jacobian(&y, &r, |v| residual(&build(v)));
                let jt = jac.transpose();
                let jtj = &jt * &jac;
                let g = &jt * DVector::from_column_slice(&r);
                let mut accepted = false;
                for _ in 0..8 {
                    let mut a = jtj.clone();
                    for i in 0..conditions {
                        a[(i, i)] += lambda * (1.0 + jtj[(i, i)]);
                    }
                    let Some(step) = a.lu().solve(&(-&g)) else {
                        lambda *= 10.0;
                        continue;
                    };
                    let mut t = 1.0;
                    for _ in 0..20 {
                        let trial: Vec<f64> = y.iter().zip(step.iter()).map(|(a, s)| a + t * s).collect();
                        let rt = residual(&build(&trial));
                        if rt.iter().all(|v| v.is_finite()) && l2(&rt) < l2(&r) {
                            y = trial;
                            r = rt;
                            accepted = true;
                            break;
                        }
                        t *= 0.5;
                    }
                    if accepted {
                        lambda = (lambda * 0.3).max(1e-12);
                        break;
                    }
                    lambda *= 10.0;
                }
                if !accepted {
                    let rnorm = inf_norm(&r);
                    if rnorm < opts.tol.sqrt() * 1e-2 {
                        // stalled at round-off level
                        break;
                    }
                    return Err(ConformalError::NonConvergence { iterations, residual: rnorm });
                }
            }
        }
        let integrand = build(&y);

        // Multiplier from all finite sides by least squares, or from the
        // outgoing edge direction when only one finite vertex exists.
        let multiplier = if sides.is_empty() {
            let [_, out] = merged.rays().expect("unbounded");
            let t0 = integrand.points[0].arg();
            let t1 = integrand.points[1].arg();
            let t1 = if t1 <= t0 { t1 + 2.0 * PI } else { t1 };
            let zeta = Complex64::from_polar(1.0, 0.5 * (t0 + t1));
            let tangent = integrand.eval(zeta) * Complex64::i() * zeta;
            Complex64::from_polar(1.0, out.to_complex().arg() - tangent.arg())
        } else {
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = 0.0;
            for &(a, b) in &sides {
                let i = integrand.between_points(a, b);
                num += i.conj() * (vertices[b].unwrap() - vertices[a].unwrap());
                den += i.norm_sqr();
            }
            num / den
        };
        let side_residual = sides
            .iter()
            .zip(&lengths)
            .map(|(&(a, b), &len)| ((multiplier * integrand.between_points(a, b)).norm() - len).abs() / len)
            .fold(0.0, f64::max);
        let translation = vertices[0].unwrap() + multiplier * integrand.integral_from(0, Complex64::new(0.0, 0.0));
        Ok(Self { integrand, angle_factors: angles, vertices, multiplier, translation, side_residual, iterations })
    }

    /// Map with explicit prevertices and constants (no solve).
    pub fn from_parts(
        prevertices: Vec<Complex64>,
        angle_factors: Vec<AngleFactor>,
        vertices: Vec<Option<Complex64>>,
        multiplier: Complex64,
        translation: Complex64,
    ) -> Result<Self, ConformalError> {
        if prevertices.len() != angle_factors.len() || vertices.len() != prevertices.len() {
            return Err(ConformalError::Mismatch);
        }
        let exponents = angle_factors.iter().map(|a| a.value - 1.0).collect();
        Ok(Self {
            integrand: Integrand::new(prevertices, exponents, config::QUADRATURE_NODES),
            angle_factors,
            vertices,
            multiplier,
            translation,
            side_residual: 0.0,
            iterations: 0,
        })
    }

    pub fn prevertices(&self) -> &[Complex64] {
        &self.integrand.points
    }

    /// `alpha_k - 1` per prevertex.
    pub fn exponents(&self) -> &[f64] {
        &self.integrand.exponents
    }

    pub fn angle_factors(&self) -> &[AngleFactor] {
        &self.angle_factors
    }

    pub fn vertices(&self) -> &[Option<Complex64>] {
        &self.vertices
    }

    pub fn multiplier(&self) -> Complex64 {
        self.multiplier
    }

    /// `f(0)`.
    pub fn translation(&self) -> Complex64 {
        self.translation
    }

    /// Largest relative side-length error over the finite sides.
    pub fn side_residual(&self) -> f64 {
        self.side_residual
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn is_bounded(&self) -> bool {
        self.vertices.iter().all(Option::is_some)
    }

    /// `f'(z)`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.multiplier * self.integrand.eval(z)
    }

    /// `f(z)` for `|z| <= 1`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, ConformalError> {
        if !(z.norm() <= 1.0 + 1e-14) {
            return Err(ConformalError::OutsideDisk(z.norm()));
        }
        let pts = &self.integrand.points;
        let mut best: Option<(usize, f64)> = None;
        for (k, p) in pts.iter().enumerate() {
            let d = (z - p).norm();
            if d <= 1e-14 {
                return self.vertices[k].ok_or(ConformalError::AtInfiniteVertex);
            }
            if self.vertices[k].is_some() && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((k, d));
            }
        }
        match best {
            Some((k, d)) if d < z.norm() => {
                Ok(self.vertices[k].unwrap() + self.multiplier * self.integrand.integral_from(k, z))
            }
            _ => Ok(self.translation + self.multiplier * self.integrand.regular(Complex64::new(0.0, 0.0), z)),
        }
    }

    /// Image of prevertex `k` by quadrature from the origin.
    pub fn vertex_image(&self, k: usize) -> Result<Complex64, ConformalError> {
        if self.vertices.get(k).copied().flatten().is_none() {
            return Err(ConformalError::AtInfiniteVertex);
        }
        Ok(self.translation - self.multiplier * self.integrand.integral_from(k, Complex64::new(0.0, 0.0)))
    }

    /// Preimage of an interior point by grid search and damped Newton.
    pub fn preimage(&self, p: Complex64) -> Result<Complex64, ConformalError> {
        let scale = self
            .vertices
            .iter()
            .flatten()
            .map(|v| (v - self.translation).norm())
            .fold(0.0, f64::max)
            .max(1e-300);
        let mut z = Complex64::new(0.0, 0.0);
        let mut best = (self.translation - p).norm();
        for ring in 1..24 {
            let r = 1.0 - 0.75f64.powi(ring);
            for j in 0..64 {
                let c = Complex64::from_polar(r, 2.0 * PI * j as f64 / 64.0);
                if let Ok(w) = self.eval(c) {
                    let d = (w - p).norm();
                    if d < best {
                        best = d;
                        z = c;
                    }
                }
            }
        }
        for _ in 0..100 {
            let w = self.eval(z)?;
            let err = w - p;
            if err.norm() <= 1e-13 * scale {
                return Ok(z);
            }
            let step = err / self.derivative(z);
            let mut t = 1.0;
            let mut moved = false;
            for _ in 0..40 {
                let trial = z - step * t;
                if trial.norm() < 1.0 {
                    if let Ok(wt) = self.eval(trial) {
                        if (wt - p).norm() < err.norm() {
                            z = trial;
                            moved = true;
                            break;
                        }
                    }
                }
                t *= 0.5;
            }
            if !moved {
                break;
            }
        }
        let err = (self.eval(z)? - p).norm();
        if err <= 1e-9 * scale {
            Ok(z)
        } else {
            Err(ConformalError::PreimageNotFound(err))
        }
    }

    /// Precompose with the disk automorphism taking 0 to the preimage of `p`.
    /// The result is again a Schwarz–Christoffel map with `f(0) = p`.
    pub fn recentered(&self, p: Point) -> Result<Self, ConformalError> {
        let target = p.to_complex();
        let c = self.preimage(target)?;
        if c.norm() >= 1.0 - 1e-12 {
            return Err(ConformalError::BoundaryPoint);
        }
        let pts = self.integrand.points.iter().map(|&zk| (zk - c) / (Complex64::new(1.0, 0.0) - c.conj() * zk)).collect();
        let multiplier = self.derivative(c) * (1.0 - c.norm_sqr());
        Ok(Self {
            integrand: Integrand::new(pts, self.integrand.exponents.clone(), config::QUADRATURE_NODES),
            angle_factors: self.angle_factors.clone(),
            vertices: self.vertices.clone(),
            multiplier,
            translation: target,
            side_residual: self.side_residual,
            iterations: self.iterations,
        })
    }

    pub fn summary(&self) -> ScMapSummary {
        ScMapSummary {
            prevertices: self.prevertices().iter().map(|z| [z.re, z.im]).collect(),
            angle_factors: self.angle_factors.iter().map(|a| a.value).collect(),
            multiplier: [self.multiplier.re, self.multiplier.im],
            translation: [self.translation.re, self.translation.im],
            side_residual: self.side_residual,
            iterations: self.iterations,
        }
    }
}

fn strip_overrides(line: &PolygonalLine) -> Result<PolygonalLine, ConformalError> {
    let v = line.vertices().to_vec();
    Ok(if line.is_closed() {
        PolygonalLine::closed(v)?
    } else if let Some([a, b]) = line.rays() {
        PolygonalLine::unbounded(v, a, b)?
    } else {
        PolygonalLine::open(v)?
    })
}

fn inf_norm(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn l2(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn jacobian(y: &[f64], r: &[f64], f: impl Fn(&[f64]) -> Vec<f64>) -> DMatrix<f64> {
    let n = y.len();
    let mut j = DMatrix::zeros(r.len(), n);
    let mut yp = y.to_vec();
    for c in 0..n {
        let h = 1e-7 * (1.0 + y[c].abs());
        yp[c] = y[c] + h;
        let rp = f(&yp);
        yp[c] = y[c] - h;
        let rm = f(&yp);
        yp[c] = y[c];
        for i in 0..r.len() {
            j[(i, c)] = (rp[i] - rm[i]) / (2.0 * h);
        }
    }
    j
}

/// Solve the Schwarz–Christoffel parameter problem with default options.
pub fn sc_solve(line: &PolygonalLine) -> Result<ScMap, ConformalError> {
    ScMap::solve(line, &SolveOptions::default())
}

/// Evaluate a solved map at a point of the closed disk.
pub fn sc_eval(map: &ScMap, z: Complex64) -> Result<Point, ConformalError> {
    map.eval(z).map(Point::from_complex)
}
