use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::scmap::ScMap;
use super::ConformalError;
use crate::config;
use crate::geometry::{kernel, Point, PolygonalLine};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `f(z) = z + a_2 z^2 + ... + a_N z^N`, stored as `[a_1, ..., a_N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries {
    coefficients: Vec<Complex64>,
}

/// `F(z) = z + b_0 + b_1 / z + ...`, stored as `[1, b_0, b_1, ...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSeries {
    coefficients: Vec<Complex64>,
}

impl TaylorSeries {
    /// From `[a_1, ..., a_N]`; `a_1` must be 1.
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self, ConformalError> {
        if coefficients.len() < 3 {
            return Err(ConformalError::SeriesTooShort(coefficients.len()));
        }
        if (coefficients[0] - ONE).norm() > 1e-12 {
            return Err(ConformalError::NotNormalized);
        }
        if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(ConformalError::NonFinite);
        }
        Ok(Self { coefficients })
    }

    pub fn identity(n: usize) -> Self {
        let mut c = vec![ZERO; n.max(3)];
        c[0] = ONE;
        Self { coefficients: c }
    }

    /// Koebe function `z / (1 - z)^2`, `a_n = n`.
    pub fn koebe(n: usize) -> Self {
        Self { coefficients: (1..=n.max(3)).map(|k| Complex64::new(k as f64, 0.0)).collect() }
    }

    /// Truncation `N`.
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `a_n` for `n >= 1`.
    pub fn a(&self, n: usize) -> Complex64 {
        self.coefficients.get(n.wrapping_sub(1)).copied().unwrap_or(ZERO)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients.iter().rev().fold(ZERO, |acc, c| acc * z + c) * z
    }

    pub fn truncated(&self, n: usize) -> Self {
        let mut s = self.clone();
        s.coefficients.resize(n.max(3), ZERO);
        s
    }
}

impl SigmaSeries {
    /// From `[1, b_0, b_1, ...]`.
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self, ConformalError> {
        if coefficients.is_empty() || (coefficients[0] - ONE).norm() > 1e-12 {
            return Err(ConformalError::NotNormalized);
        }
        if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(ConformalError::NonFinite);
        }
        Ok(Self { coefficients })
    }

    /// From `b_0, b_1, ...`.
    pub fn from_b(b: &[Complex64]) -> Self {
        Self { coefficients: std::iter::once(ONE).chain(b.iter().copied()).collect() }
    }

    /// Number of known `b_k`.
    pub fn len(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `b_k` for `k >= 0`; zero beyond the truncation.
    pub fn b(&self, k: usize) -> Complex64 {
        self.coefficients.get(k + 1).copied().unwrap_or(ZERO)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let w = z.inv();
        self.coefficients.iter().rev().fold(ZERO, |acc, c| acc * w + c) * z
    }
}

/// Reciprocal of a power series with nonzero constant term, to `n` terms.
fn reciprocal(h: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut r = vec![ZERO; n];
    let inv0 = h[0].inv();
    for k in 0..n {
        let mut s = if k == 0 { ONE } else { ZERO };
        for j in 1..=k.min(h.len() - 1) {
            s -= h[j] * r[k - j];
        }
        r[k] = s * inv0;
    }
    r
}

/// Class-S Taylor series of the map with derivative proportional to
/// `prod (1 - z/z_k)^beta_k`, by products of binomial series.
pub fn taylor_from_factors(prevertices: &[Complex64], exponents: &[f64], n: usize) -> Result<TaylorSeries, ConformalError> {
    if n < 3 {
        return Err(ConformalError::SeriesTooShort(n));
    }
    if n > config::MAX_SERIES_LEN {
        return Err(ConformalError::SeriesTooLong { requested: n, limit: config::MAX_SERIES_LEN });
    }
    if prevertices.len() != exponents.len() {
        return Err(ConformalError::Mismatch);
    }
    // f' to order n - 1
    let m = n;
    let mut prod = vec![ZERO; m];
    prod[0] = ONE;
    let mut factor = vec![ZERO; m];
    for (&zk, &beta) in prevertices.iter().zip(exponents) {
        if beta == 0.0 {
            continue;
        }
        let w = -zk.inv();
        factor[0] = ONE;
        for j in 1..m {
            factor[j] = factor[j - 1] * w * ((beta - (j - 1) as f64) / j as f64);
        }
        for k in (0..m).rev() {
            let mut s = ZERO;
            for j in 0..=k {
                s += prod[j] * factor[k - j];
            }
            prod[k] = s;
        }
    }
    let coefficients = (0..n).map(|k| if k == 0 { ONE } else { prod[k] / (k + 1) as f64 }).collect();
    TaylorSeries::new(coefficients)
}

/// Class-S series `(f - f(0)) / f'(0)` of a solved map.
pub fn taylor_coefficients(map: &ScMap, n: usize) -> Result<TaylorSeries, ConformalError> {
    taylor_from_factors(map.prevertices(), map.exponents(), n)
}

/// `S_f(0) = 6 (a_3 - a_2^2)`.
pub fn schwarzian_at_zero(series: &TaylorSeries) -> Complex64 {
    (series.a(3) - series.a(2) * series.a(2)) * 6.0
}

/// Series of the map recentered so that 0 goes to `p`.
pub fn recenter(map: &ScMap, p: Point, n: usize) -> Result<TaylorSeries, ConformalError> {
    taylor_coefficients(&map.recentered(p)?, n)
}

/// Interior point used when `S_f(0)` vanishes: the centroid when it lies
/// inside, otherwise a kernel point, otherwise the image of 1/2.
pub fn default_center(line: &PolygonalLine, map: &ScMap) -> Result<Point, ConformalError> {
    if line.is_closed() {
        let c = line.centroid();
        if line.contains(c) {
            return Ok(c);
        }
        let k = kernel(line);
        if k.len() >= 3 {
            let n = k.len() as f64;
            let c = k.iter().fold(Point::new(0.0, 0.0), |acc, &p| acc + p) * (1.0 / n);
            if line.contains(c) {
                return Ok(c);
            }
        }
    }
    super::scmap::sc_eval(map, Complex64::new(0.5, 0.0))
}

/// `f_t(z) = f(tz) / t`: `a_n -> a_n t^(n-1)`.
pub fn homotopy(series: &TaylorSeries, t: f64) -> Result<TaylorSeries, ConformalError> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(ConformalError::BadHomotopyParameter(t));
    }
    let mut pow = 1.0;
    let coefficients = series
        .coefficients
        .iter()
        .map(|&a| {
            let v = a * pow;
            pow *= t;
            v
        })
        .collect();
    Ok(TaylorSeries { coefficients })
}

/// `F(z) = 1 / f(1/z)`, with as many terms as the input determines.
pub fn invert_to_sigma(series: &TaylorSeries) -> SigmaSeries {
    let n = series.len();
    SigmaSeries { coefficients: reciprocal(&series.coefficients, n) }
}

/// Inverse of [`invert_to_sigma`].
pub fn invert_to_taylor(series: &SigmaSeries) -> TaylorSeries {
    let n = series.coefficients.len();
    TaylorSeries { coefficients: reciprocal(&series.coefficients, n) }
}

/// Exchange format for series: `{"kind": ..., "coefficients": [[re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesFile {
    pub kind: SeriesKind,
    pub coefficients: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesKind {
    #[serde(rename = "taylor-S")]
    TaylorS,
    #[serde(rename = "sigma")]
    Sigma,
}

fn pairs(c: &[Complex64]) -> Vec<[f64; 2]> {
    c.iter().map(|z| [z.re, z.im]).collect()
}

fn complexes(c: &[[f64; 2]]) -> Vec<Complex64> {
    c.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

impl From<&TaylorSeries> for SeriesFile {
    fn from(s: &TaylorSeries) -> Self {
        Self { kind: SeriesKind::TaylorS, coefficients: pairs(&s.coefficients) }
    }
}

impl From<&SigmaSeries> for SeriesFile {
    fn from(s: &SigmaSeries) -> Self {
        Self { kind: SeriesKind::Sigma, coefficients: pairs(&s.coefficients) }
    }
}

impl SeriesFile {
    pub fn to_taylor(&self) -> Result<TaylorSeries, ConformalError> {
        match self.kind {
            SeriesKind::TaylorS => TaylorSeries::new(complexes(&self.coefficients)),
            SeriesKind::Sigma => Ok(invert_to_taylor(&self.to_sigma()?)),
        }
    }

    pub fn to_sigma(&self) -> Result<SigmaSeries, ConformalError> {
        match self.kind {
            SeriesKind::Sigma => SigmaSeries::new(complexes(&self.coefficients)),
            SeriesKind::TaylorS => Ok(invert_to_sigma(&self.to_taylor()?)),
        }
    }
}
