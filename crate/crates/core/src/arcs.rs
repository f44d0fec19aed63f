//! Reflection bounds for analytic arcs from the decay of Chebyshev
//! coefficients of the kernel `F(x, xi) = log((f(x) - f(xi)) / (x - xi))`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Half-width of the uncertainty band attached to an estimated decay rate.
pub const R_BAND: f64 = 0.02;

/// Samples used by the injectivity check.
pub const INJECTIVITY_SAMPLES: usize = 2000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ArcError {
    #[error("polynomial has no coefficients")]
    EmptyPolynomial,
    #[error("Möbius matrix is singular")]
    SingularMobius,
    #[error("Möbius map has a pole on [-1, 1]")]
    PoleOnInterval,
    #[error("arc is not injective: samples {0} and {1} coincide")]
    NotInjective(usize, usize),
    #[error("derivative vanishes near x = {0}")]
    CriticalPoint(f64),
    #[error("difference quotient vanishes at ({0}, {1})")]
    VanishingQuotient(f64, f64),
    #[error("point outside [-1, 1]")]
    OutsideInterval,
    #[error("need max_degree >= 16, got {0}")]
    DegreeTooSmall(usize),
    #[error("coefficients show no geometric decay (fitted r = {0})")]
    NoDecay(f64),
    #[error("r = {0} must lie in [0, 1)")]
    BadRate(f64),
    #[error("R = {0} must exceed 1")]
    BadRadius(f64),
}

/// `f = g o gamma` on `[-1, 1]`: `g` a polynomial, `gamma` a Möbius map
/// taking `[-1, 1]` onto the source arc.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSpec {
    g: Vec<Complex64>,
    gamma: [[Complex64; 2]; 2],
}

/// One Möbius matrix entry: a real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> Complex64 {
        match self {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// `{"g_coefficients": [[re, im], ...], "gamma": [[a, b], [c, d]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcFile {
    pub g_coefficients: Vec<[f64; 2]>,
    #[serde(default = "identity_gamma")]
    pub gamma: [[Entry; 2]; 2],
}

fn identity_gamma() -> [[Entry; 2]; 2] {
    [[Entry::Real(1.0), Entry::Real(0.0)], [Entry::Real(0.0), Entry::Real(1.0)]]
}

impl ArcFile {
    pub fn to_spec(&self) -> Result<ArcSpec, ArcError> {
        let g = self.g_coefficients.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        let m = self.gamma.map(|row| row.map(Entry::value));
        ArcSpec::new(g, m)
    }
}

impl ArcSpec {
    /// Validates the Möbius map and injectivity of `g o gamma` on `[-1, 1]`.
    pub fn new(g: Vec<Complex64>, gamma: [[Complex64; 2]; 2]) -> Result<Self, ArcError> {
        if g.is_empty() {
            return Err(ArcError::EmptyPolynomial);
        }
        let [[a, b], [c, d]] = gamma;
        if (a * d - b * c).norm() < 1e-14 * (a.norm() + b.norm()) * (c.norm() + d.norm()) {
            return Err(ArcError::SingularMobius);
        }
        // c x + d vanishes on [-1, 1] only for real -d/c
        if c != ZERO {
            let x = -d / c;
            if x.im.abs() < 1e-14 && x.re.abs() <= 1.0 {
                return Err(ArcError::PoleOnInterval);
            }
        }
        let spec = Self { g, gamma };
        spec.check_injective()?;
        Ok(spec)
    }

    /// Polynomial `g` on `[-1, 1]` itself.
    pub fn polynomial(g: Vec<Complex64>) -> Result<Self, ArcError> {
        Self::new(g, [[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn gamma(&self, x: f64) -> Complex64 {
        let [[a, b], [c, d]] = self.gamma;
        let x = Complex64::new(x, 0.0);
        (a * x + b) / (c * x + d)
    }

    fn gamma_prime(&self, x: f64) -> Complex64 {
        let [[a, b], [c, d]] = self.gamma;
        let den = c * x + d;
        (a * d - b * c) / (den * den)
    }

    fn g_at(&self, u: Complex64) -> Complex64 {
        self.g.iter().rev().fold(ZERO, |acc, c| acc * u + c)
    }

    fn g_prime(&self, u: Complex64) -> Complex64 {
        self.g.iter().enumerate().skip(1).rev().fold(ZERO, |acc, (k, c)| acc * u + c * k as f64)
    }

    pub fn f(&self, x: f64) -> Complex64 {
        self.g_at(self.gamma(x))
    }

    fn check_injective(&self) -> Result<(), ArcError> {
        let n = INJECTIVITY_SAMPLES;
        let xs: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
        let vals: Vec<Complex64> = xs.iter().map(|&x| self.f(x)).collect();
        let ders: Vec<f64> = xs.iter().map(|&x| (self.g_prime(self.gamma(x)) * self.gamma_prime(x)).norm()).collect();
        let dmax = ders.iter().copied().fold(0.0, f64::max);
        if let Some(i) = ders.iter().position(|&d| d <= 1e-12 * dmax.max(1e-300)) {
            return Err(ArcError::CriticalPoint(xs[i]));
        }
        let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
        for i in 0..n {
            for j in i + 1..n {
                if (vals[i] - vals[j]).norm() <= 1e-12 * scale {
                    return Err(ArcError::NotInjective(i, j));
                }
            }
        }
        Ok(())
    }

    /// `(f(x) - f(xi)) / (x - xi)`, exact on and near the diagonal.
    pub fn difference_quotient(&self, x: f64, xi: f64) -> Complex64 {
        let (u, v) = (self.gamma(x), self.gamma(xi));
        // (u^k - v^k)/(u - v) = h_k with h_k = u h_(k-1) + v^(k-1)
        let mut h = ZERO;
        let mut vpow = ONE;
        let mut sum = ZERO;
        for c in self.g.iter().skip(1) {
            h = u * h + vpow;
            vpow *= v;
            sum += c * h;
        }
        let [[a, b], [c, d]] = self.gamma;
        sum * (a * d - b * c) / ((c * x + d) * (c * xi + d))
    }
}

fn check_unit(x: f64) -> Result<(), ArcError> {
    if (-1.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(ArcError::OutsideInterval)
    }
}

/// Argument of `q` on the branch nearest `reference`.
fn continue_arg(reference: f64, q: Complex64) -> f64 {
    let a = q.arg();
    a + 2.0 * PI * ((reference - a) / (2.0 * PI)).round()
}

/// Track the argument of the quotient along a straight path in the square,
/// bisecting steps whose phase change is not small.
fn track(spec: &ArcSpec, from: (f64, f64), to: (f64, f64), arg0: f64) -> Result<f64, ArcError> {
    let quotient = |s: f64| {
        let (x, xi) = (from.0 + s * (to.0 - from.0), from.1 + s * (to.1 - from.1));
        let q = spec.difference_quotient(x, xi);
        if q == ZERO || !q.re.is_finite() {
            Err(ArcError::VanishingQuotient(x, xi))
        } else {
            Ok(q)
        }
    };
    let mut arg = arg0;
    let mut s = 0.0;
    let mut h: f64 = 1.0 / 8.0;
    while s < 1.0 {
        let step = h.min(1.0 - s);
        let cand = continue_arg(arg, quotient(s + step)?);
        if (cand - arg).abs() > 0.5 && step > 1e-9 {
            h = step * 0.5;
            continue;
        }
        arg = cand;
        s += step;
        h = (h * 2.0).min(1.0 / 8.0);
    }
    Ok(arg)
}

/// `F(x, xi) = log((f(x) - f(xi)) / (x - xi))`, continued from the principal
/// value at `(-1, -1)` along the diagonal to `(x, x)` and then in `xi`. On
/// the diagonal this is `log f'(x)`.
pub fn kernel_f(spec: &ArcSpec, x: f64, xi: f64) -> Result<Complex64, ArcError> {
    check_unit(x)?;
    check_unit(xi)?;
    let q0 = spec.difference_quotient(-1.0, -1.0);
    if q0 == ZERO {
        return Err(ArcError::VanishingQuotient(-1.0, -1.0));
    }
    let mut arg = track(spec, (-1.0, -1.0), (x, x), q0.arg())?;
    if xi != x {
        arg = track(spec, (x, x), (x, xi), arg)?;
    }
    let q = spec.difference_quotient(x, xi);
    if q == ZERO {
        return Err(ArcError::VanishingQuotient(x, xi));
    }
    Ok(Complex64::new(q.norm().ln(), arg))
}

/// Green function of `[-1, 1]` with pole at infinity:
/// `log |z + sqrt(z^2 - 1)|` on the branch with modulus at least 1.
pub fn green_segment(z: Complex64) -> f64 {
    if z.im == 0.0 {
        let x = z.re.abs();
        return if x <= 1.0 { 0.0 } else { (x + (x * x - 1.0).sqrt()).ln() };
    }
    let h = z + (z - ONE).sqrt() * (z + ONE).sqrt();
    h.norm().ln().max(0.0)
}

/// `max(g(z1), g(z2)) < log R`, membership in the Bernstein–Walsh region of
/// the square `[-1, 1]^2`.
pub fn bernstein_walsh_region(z1: Complex64, z2: Complex64, r: f64) -> Result<bool, ArcError> {
    if !(r > 1.0) {
        return Err(ArcError::BadRadius(r));
    }
    Ok(green_segment(z1).max(green_segment(z2)) < r.ln())
}

/// Decay of the bivariate Chebyshev coefficients of the kernel.
#[derive(Debug, Clone, Serialize)]
pub struct DecayEstimate {
    pub degrees: Vec<usize>,
    /// `e_m = max |c_ij|` over `i + j = m`.
    pub proxies: Vec<f64>,
    pub r: f64,
    /// RMS residual of the log-linear fit.
    pub fit_quality: f64,
    /// Degrees used in the fit.
    pub fit_degrees: Vec<usize>,
    pub band: f64,
}

impl DecayEstimate {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,e_m\n");
        for (m, e) in self.degrees.iter().zip(&self.proxies) {
            s.push_str(&format!("{m},{e:.6e}\n"));
        }
        s
    }
}

/// Kernel values on the Chebyshev–Lobatto grid `cos(pi i / M)`, branch
/// continued node to node.
fn kernel_grid(spec: &ArcSpec, m: usize) -> Result<Vec<Vec<Complex64>>, ArcError> {
    let nodes: Vec<f64> = (0..=m).map(|i| (PI * i as f64 / m as f64).cos()).collect();
    // diagonal first, walking from x = -1 (index m) upward
    let mut diag_arg = vec![0.0; m + 1];
    let q0 = spec.difference_quotient(-1.0, -1.0);
    let mut arg = q0.arg();
    let mut prev = -1.0;
    for i in (0..=m).rev() {
        arg = track(spec, (prev, prev), (nodes[i], nodes[i]), arg)?;
        diag_arg[i] = arg;
        prev = nodes[i];
    }
    let mut grid = vec![vec![ZERO; m + 1]; m + 1];
    for i in 0..=m {
        let x = nodes[i];
        let mut fill = |j: usize, a: f64| -> Result<(), ArcError> {
            let q = spec.difference_quotient(x, nodes[j]);
            if q == ZERO {
                return Err(ArcError::VanishingQuotient(x, nodes[j]));
            }
            grid[i][j] = Complex64::new(q.norm().ln(), a);
            Ok(())
        };
        fill(i, diag_arg[i])?;
        for dir in [-1i64, 1] {
            let mut a = diag_arg[i];
            let mut j = i as i64;
            loop {
                let next = j + dir;
                if next < 0 || next > m as i64 {
                    break;
                }
                a = track(spec, (x, nodes[j as usize]), (x, nodes[next as usize]), a)?;
                fill(next as usize, a)?;
                j = next;
            }
        }
    }
    Ok(grid)
}

/// Chebyshev coefficients from Lobatto samples (type-I cosine transform in
/// each variable).
fn chebyshev_coefficients(values: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let m = values.len() - 1;
    let mf = m as f64;
    let w = |k: usize| if k == 0 || k == m { 0.5 } else { 1.0 };
    let cos: Vec<Vec<f64>> = (0..=m).map(|i| (0..=m).map(|k| (PI * (i * k) as f64 / mf).cos()).collect()).collect();
    let weight = |i: usize| (2.0 / mf) * if i == 0 || i == m { 0.5 } else { 1.0 };
    // rows: transform in the second variable
    let mut tmp = vec![vec![ZERO; m + 1]; m + 1];
    for (k, row) in values.iter().enumerate() {
        for j in 0..=m {
            let mut s = ZERO;
            for (l, v) in row.iter().enumerate() {
                s += v * (w(l) * cos[j][l]);
            }
            tmp[k][j] = s * weight(j);
        }
    }
    let mut out = vec![vec![ZERO; m + 1]; m + 1];
    for i in 0..=m {
        for j in 0..=m {
            let mut s = ZERO;
            for k in 0..=m {
                s += tmp[k][j] * (w(k) * cos[i][k]);
            }
            out[i][j] = s * weight(i);
        }
    }
    out
}

/// Geometric decay rate `r = limsup e_m^(1/m)` of the kernel's Chebyshev
/// coefficients, from a least-squares slope over the upper half of the
/// degrees above the round-off floor.
pub fn estimate_r(spec: &ArcSpec, max_degree: usize) -> Result<DecayEstimate, ArcError> {
    if max_degree < 16 {
        return Err(ArcError::DegreeTooSmall(max_degree));
    }
    let m = max_degree;
    let coeffs = chebyshev_coefficients(&kernel_grid(spec, m)?);
    let mut proxies = vec![0.0; m + 1];
    for (i, row) in coeffs.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            if i + j <= m {
                proxies[i + j] = f64::max(proxies[i + j], c.norm());
            }
        }
    }
    let degrees: Vec<usize> = (1..=m).collect();
    let proxies: Vec<f64> = proxies[1..].to_vec();
    let max = proxies.iter().copied().fold(0.0, f64::max);
    let floor = (1e3 * f64::EPSILON * max).max(1e-300);
    let above: Vec<usize> = degrees.iter().copied().filter(|&d| proxies[d - 1] > floor).collect();
    if max < 1e-13 || above.is_empty() {
        return Ok(DecayEstimate { degrees, proxies, r: 0.0, fit_quality: 0.0, fit_degrees: Vec::new(), band: 0.0 });
    }
    let fit: Vec<usize> = if above.len() >= 4 { above[above.len() / 2..].to_vec() } else { above.clone() };
    let (r, fit_quality) = if fit.len() == 1 {
        let d = fit[0];
        (proxies[d - 1].powf(1.0 / d as f64), 0.0)
    } else {
        let xs: Vec<f64> = fit.iter().map(|&d| d as f64).collect();
        let ys: Vec<f64> = fit.iter().map(|&d| proxies[d - 1].ln()).collect();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let slope = sxy / sxx;
        let icpt = my - slope * mx;
        let rms = (xs.iter().zip(&ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum::<f64>() / n).sqrt();
        (slope.exp(), rms)
    };
    if !(r < 1.0) {
        return Err(ArcError::NoDecay(r));
    }
    Ok(DecayEstimate { degrees, proxies, r, fit_quality, fit_degrees: fit, band: R_BAND })
}

/// Ellipse with foci `-1, 1` and semiaxes `a > b >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipseParams {
    pub a: f64,
    pub b: f64,
}

/// Ellipse with `a + b = 1/r` and the bound `1/(a^2 + b^2) = 2/(r^2 + 1/r^2)`.
/// `r = 0` gives bound 0 and no ellipse.
pub fn reflection_bound(r: f64) -> Result<(Option<EllipseParams>, f64), ArcError> {
    if !(0.0..1.0).contains(&r) {
        return Err(ArcError::BadRate(r));
    }
    if r == 0.0 {
        return Ok((None, 0.0));
    }
    let inv = 1.0 / r;
    let e = EllipseParams { a: 0.5 * (inv + r), b: 0.5 * (inv - r) };
    Ok((Some(e), 2.0 / (r * r + inv * inv)))
}

/// Decay estimate plus the bound at `r` and at the conservative `r + band`.
#[derive(Debug, Clone, Serialize)]
pub struct ArcBound {
    pub estimate: DecayEstimate,
    pub ellipse: Option<EllipseParams>,
    pub bound: f64,
    pub conservative_bound: f64,
}

pub fn arc_bound(spec: &ArcSpec, max_degree: usize) -> Result<ArcBound, ArcError> {
    let estimate = estimate_r(spec, max_degree)?;
    let (ellipse, bound) = reflection_bound(estimate.r)?;
    let upper_r = if estimate.r == 0.0 { 0.0 } else { (estimate.r + estimate.band).min(1.0 - 1e-12) };
    let (_, conservative_bound) = reflection_bound(upper_r)?;
    Ok(ArcBound { estimate, ellipse, bound, conservative_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_kernel_vanishes() {
        let s = ArcSpec::polynomial(vec![ZERO, ONE]).unwrap();
        assert_eq!(kernel_f(&s, 0.3, -0.7).unwrap(), ZERO);
        let e = estimate_r(&s, 16).unwrap();
        assert_eq!(e.r, 0.0);
        assert_eq!(reflection_bound(e.r).unwrap().1, 0.0);
    }

    #[test]
    fn green_values() {
        assert_eq!(green_segment(c(1.0)), 0.0);
        assert_eq!(green_segment(c(0.3)), 0.0);
        assert!((green_segment(c(2.0)) - 1.3169578969248166).abs() < 1e-15);
        assert!(!bernstein_walsh_region(c(2.0), ZERO, 2.0 + 3f64.sqrt()).unwrap());
        assert!(bernstein_walsh_region(c(2.0), ZERO, 4.0).unwrap());
        assert!(bernstein_walsh_region(c(0.5), c(0.5), 1.01).unwrap());
    }

    #[test]
    fn one_third() {
        let (e, q) = reflection_bound(1.0 / 3.0).unwrap();
        let e = e.unwrap();
        assert!((e.a - 5.0 / 3.0).abs() < 1e-15 && (e.b - 4.0 / 3.0).abs() < 1e-15);
        assert!((q - 9.0 / 41.0).abs() < 1e-15);
    }

    #[test]
    fn square_map_on_shifted_arc() {
        // g = z^2 on [1, 2]: F = log(gamma(x) + gamma(xi)) + log(1/2)
        let gamma = [[c(0.5), c(1.5)], [ZERO, ONE]];
        let s = ArcSpec::new(vec![ZERO, ZERO, ONE], gamma).unwrap();
        for &(x, xi) in &[(0.2, -0.4), (-1.0, 1.0), (0.5, 0.5)] {
            let want = (s.gamma(x) + s.gamma(xi)).ln() + c(0.5).ln();
            assert!((kernel_f(&s, x, xi).unwrap() - want).norm() < 1e-14);
        }
    }

    #[test]
    fn non_injective_rejected() {
        // z^2 folds [-1, 1]
        assert!(ArcSpec::polynomial(vec![ZERO, ZERO, ONE]).is_err());
    }
}
