//! Compound Gauss–Jacobi quadrature of the Schwarz–Christoffel integrand
//! `g(z) = prod_k (1 - z/z_k)^beta_k` along straight paths in the closed disk.

use std::num::NonZeroUsize;

use gauss_quad::{jacobi::GaussJacobi, FiniteAboveNegOneF64};
use num_complex::Complex64;

/// Node/weight pairs on [-1, 1].
#[derive(Debug, Clone)]
pub(crate) struct Rule {
    pairs: Vec<(f64, f64)>,
}

impl Rule {
    /// Weight `(1 + x)^beta` on [-1, 1]; `beta = 0` is Gauss–Legendre.
    pub(crate) fn left_singular(nodes: usize, beta: f64) -> Self {
        let deg = NonZeroUsize::new(nodes).expect("at least one node");
        let zero = FiniteAboveNegOneF64::new(0.0).expect("0 > -1");
        let b = FiniteAboveNegOneF64::new(beta).expect("exponent above -1");
        let rule = GaussJacobi::new(deg, zero, b);
        Self { pairs: rule.iter().map(|(x, w)| (*x, *w)).collect() }
    }
}

/// Longest run of panels a single path may be split into.
const MAX_PANELS: usize = 400;

/// Singularities and exponents of one integrand plus cached rules.
#[derive(Debug, Clone)]
pub(crate) struct Integrand {
    pub(crate) points: Vec<Complex64>,
    pub(crate) exponents: Vec<f64>,
    /// Jacobi rule per point (None where the exponent is not integrable).
    rules: Vec<Option<Rule>>,
    legendre: Rule,
}

impl Integrand {
    pub(crate) fn new(points: Vec<Complex64>, exponents: Vec<f64>, nodes: usize) -> Self {
        let rules = exponents
            .iter()
            .map(|&b| (b > -1.0).then(|| Rule::left_singular(nodes, b)))
            .collect();
        Self { points, exponents, rules, legendre: Rule::left_singular(nodes, 0.0) }
    }

    /// `g(z)` with the factor of point `skip` left out.
    fn eval_except(&self, z: Complex64, skip: Option<usize>) -> Complex64 {
        let mut log = Complex64::new(0.0, 0.0);
        for (k, (&p, &b)) in self.points.iter().zip(&self.exponents).enumerate() {
            if Some(k) != skip {
                log += (Complex64::new(1.0, 0.0) - z / p).ln() * b;
            }
        }
        log.exp()
    }

    pub(crate) fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_except(z, None)
    }

    fn nearest_distance(&self, z: Complex64, skip: Option<usize>) -> f64 {
        self.points
            .iter()
            .enumerate()
            .filter(|(k, _)| Some(*k) != skip)
            .map(|(_, p)| (p - z).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Gauss–Legendre panels from `a` to `b`, each no longer than half the
    /// distance from its start to the nearest singularity.
    pub(crate) fn regular(&self, a: Complex64, b: Complex64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        let mut cur = a;
        for _ in 0..MAX_PANELS {
            let remaining = (b - cur).norm();
            if remaining == 0.0 {
                break;
            }
            let step = remaining.min(0.5 * self.nearest_distance(cur, None));
            let next = if step >= remaining { b } else { cur + (b - cur) * (step / remaining) };
            total += self.panel(cur, next, None);
            cur = next;
            if next == b {
                break;
            }
        }
        total
    }

    /// One panel; with `singular = Some(k)` the left end sits on point `k`.
    fn panel(&self, a: Complex64, b: Complex64, singular: Option<usize>) -> Complex64 {
        let half = (b - a) * 0.5;
        let rule = match singular {
            Some(k) => self.rules[k].as_ref().expect("integrable exponent"),
            None => &self.legendre,
        };
        let mut sum = Complex64::new(0.0, 0.0);
        for &(x, w) in &rule.pairs {
            let z = a + half * (1.0 + x);
            sum += self.eval_except(z, singular) * w;
        }
        match singular {
            Some(k) => {
                // (1 - z/z_k) = c (1 + x) along the panel.
                let c = -half / self.points[k];
                sum * c.powf(self.exponents[k]) * half
            }
            None => sum * half,
        }
    }

    /// `int_{z_k}^{z} g`, starting at singular point `k`.
    pub(crate) fn integral_from(&self, k: usize, z: Complex64) -> Complex64 {
        let a = self.points[k];
        let len = (z - a).norm();
        if len == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let room = 0.5 * self.nearest_distance(a, Some(k));
        let first = if room >= len { z } else { a + (z - a) * (room / len) };
        let mut total = self.panel(a, first, Some(k));
        if first != z {
            total += self.regular(first, z);
        }
        total
    }

    /// `int_{z_j}^{z_k} g` along the chord, split at its midpoint.
    pub(crate) fn between_points(&self, j: usize, k: usize) -> Complex64 {
        let mid = (self.points[j] + self.points[k]) * 0.5;
        self.integral_from(j, mid) - self.integral_from(k, mid)
    }
}
