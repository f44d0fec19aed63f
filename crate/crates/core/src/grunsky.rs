//! Grunsky coefficients of class-Σ series and norms of the weighted,
//! truncated Grunsky matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config;
use crate::conformal::SigmaSeries;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GrunskyError {
    #[error("truncation {n} needs b_0..b_{needed}, series has {available} coefficients")]
    InsufficientCoefficients { n: usize, needed: usize, available: usize },
    #[error("truncation must be at least 1")]
    EmptyTruncation,
    #[error("matrix is not symmetric (defect {0:.3e})")]
    NotSymmetric(f64),
    #[error("power iteration did not reach tolerance after {0} iterations")]
    NormStalled(usize),
    #[error("truncations must be strictly increasing")]
    BadTruncations,
    #[error("norm decreased from {previous} at N = {n_previous} to {value} at N = {n}")]
    NotMonotone { n_previous: usize, previous: f64, n: usize, value: f64 },
    #[error("homotopy parameter must lie in (0, 1], got {0}")]
    BadParameter(f64),
}

/// Weighted Grunsky matrix `beta_mn = sqrt(mn) b_mn`, `1 <= m, n <= N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrunskyMatrix {
    entries: DMatrix<Complex64>,
}

impl GrunskyMatrix {
    pub fn from_entries(entries: DMatrix<Complex64>) -> Result<Self, GrunskyError> {
        let m = Self { entries };
        let defect = m.symmetry_defect();
        if defect > 1e-12 * (1.0 + m.max_abs()) {
            return Err(GrunskyError::NotSymmetric(defect));
        }
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        Self { entries: DMatrix::identity(n, n) }
    }

    pub fn truncation(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// `beta_mn` with 1-based indices.
    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.entries[(m - 1, n - 1)]
    }

    /// Unweighted coefficient `b_mn`.
    pub fn coefficient(&self, m: usize, n: usize) -> Complex64 {
        self.get(m, n) / ((m * n) as f64).sqrt()
    }

    /// Leading `n x n` block.
    pub fn leading(&self, n: usize) -> Self {
        let n = n.min(self.truncation());
        Self { entries: self.entries.view((0, 0), (n, n)).into_owned() }
    }

    pub fn symmetry_defect(&self) -> f64 {
        let n = self.truncation();
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                d = d.max((self.entries[(i, j)] - self.entries[(j, i)]).norm());
            }
        }
        d
    }

    fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Row-major `[re, im]` dump.
    pub fn to_dump(&self) -> MatrixDump {
        let n = self.truncation();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.entries[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        MatrixDump { truncation: n, entries }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDump {
    pub truncation: usize,
    pub entries: Vec<[f64; 2]>,
}

/// Length of a class-S Taylor series whose inversion determines the
/// `N x N` Grunsky matrix.
pub fn required_taylor_len(n: usize) -> usize {
    2 * n + 1
}

/// Grunsky coefficients from the expansion of
/// `log((F(z) - F(w)) / (z - w)) = -sum b_mn z^-m w^-n`.
///
/// With `u = 1/z`, `v = 1/w` the quotient is `Q = 1 - sum b_(p+q-1) u^p v^q`
/// and `l = log Q` obeys `m l_mn = m q_mn - sum q_ij (m - i) l_(m-i, n-j)`.
/// The inner sum depends on `i + j` only through `q`, so grouping it by
/// anti-diagonals of `W_ac = a l_ac` with prefix sums gives O(N^3) work.
pub fn grunsky_coefficients(series: &SigmaSeries, n: usize) -> Result<GrunskyMatrix, GrunskyError> {
    if n == 0 {
        return Err(GrunskyError::EmptyTruncation);
    }
    let needed = 2 * n - 1;
    if series.len() < needed + 1 {
        return Err(GrunskyError::InsufficientCoefficients { n, needed, available: series.len() });
    }
    let b: Vec<Complex64> = (0..=needed).map(|k| series.b(k)).collect();
    // l and W are 1-based in both indices
    let mut l = vec![vec![ZERO; n + 1]; n + 1];
    let mut w = vec![vec![ZERO; n + 1]; n + 1];
    // prefix[d][a] = sum of W_(a', d - a') over valid a' <= a
    let mut prefix: Vec<Vec<Complex64>> = vec![Vec::new(); 2 * n + 1];
    for d in 2..=2 * n {
        let m_lo = d.saturating_sub(n).max(1);
        let m_hi = (d - 1).min(n);
        for m in m_lo..=m_hi {
            let nn = d - m;
            let mut acc = ZERO;
            for s in 2..=d - 2 {
                let i_lo = 1.max((s + 1).saturating_sub(nn));
                let i_hi = (m - 1).min(s - 1);
                if i_lo > i_hi {
                    continue;
                }
                let dd = d - s;
                let (a_lo, a_hi) = (m - i_hi, m - i_lo);
                let p = &prefix[dd];
                acc += b[s - 1] * (p[a_hi] - p[a_lo - 1]);
            }
            let val = -b[d - 1] + acc / m as f64;
            l[m][nn] = val;
            w[m][nn] = val * m as f64;
        }
        let mut p = vec![ZERO; n + 1];
        let mut run = ZERO;
        for a in 1..=n {
            if a >= m_lo && a <= m_hi {
                run += w[a][d - a];
            }
            p[a] = run;
        }
        prefix[d] = p;
    }
    let entries = DMatrix::from_fn(n, n, |i, j| -l[i + 1][j + 1] * (((i + 1) * (j + 1)) as f64).sqrt());
    Ok(GrunskyMatrix { entries })
}

/// Top singular value of a Grunsky matrix and a certificate vector.
#[derive(Debug, Clone, Serialize)]
pub struct GrunskyNormEstimate {
    pub value: f64,
    pub truncation: usize,
    /// `(N_i, value_i)`, nondecreasing.
    pub monotone_certificate: Vec<(usize, f64)>,
    pub target: Option<f64>,
    /// Unit vector `x` with `|x^T beta x|` equal to `value` (up to tolerance).
    #[serde(skip)]
    pub certificate: Vec<Complex64>,
    /// `|x^T beta x|` for the certificate.
    pub certificate_value: f64,
    pub iterations: usize,
}

impl GrunskyNormEstimate {
    /// Gap between the last two sweep values.
    pub fn cauchy_gap(&self) -> f64 {
        match self.monotone_certificate.as_slice() {
            [.., (_, a), (_, b)] => b - a,
            _ => 0.0,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("N,value\n");
        for (n, v) in &self.monotone_certificate {
            s.push_str(&format!("{n},{v:.15}\n"));
        }
        s
    }
}

/// Largest singular value by power iteration on `beta^H beta`.
pub fn grunsky_norm(matrix: &GrunskyMatrix) -> Result<GrunskyNormEstimate, GrunskyError> {
    norm_with_start(matrix, None)
}

fn norm_with_start(matrix: &GrunskyMatrix, start: Option<&[Complex64]>) -> Result<GrunskyNormEstimate, GrunskyError> {
    let n = matrix.truncation();
    let beta = &matrix.entries;
    let zero_estimate = |n| GrunskyNormEstimate {
        value: 0.0,
        truncation: n,
        monotone_certificate: vec![(n, 0.0)],
        target: None,
        certificate: vec![ZERO; n],
        certificate_value: 0.0,
        iterations: 0,
    };
    if n == 0 || matrix.max_abs() == 0.0 {
        return Ok(zero_estimate(n));
    }
    let budget = config::NORM_BUDGET_PER_DIM * n;
    let mut rng = ChaCha8Rng::seed_from_u64(config::DEFAULT_SEED);
    let mut total = 0;
    for attempt in 0..2 {
        let mut v = DVector::from_fn(n, |i, _| match (attempt, start) {
            (0, Some(s)) if i < s.len() => s[i] + Complex64::new(1e-3, 0.0),
            _ => Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        });
        v /= Complex64::new(v.norm(), 0.0);
        let mut lambda = 0.0;
        for it in 0..budget {
            total += 1;
            let u = beta * &v;
            let y = beta.adjoint() * &u;
            let next = y.norm();
            if next == 0.0 {
                break;
            }
            v = y / Complex64::new(next, 0.0);
            if it > 0 && (next - lambda).abs() <= config::NORM_TOL * next {
                let sigma = (beta * &v).norm();
                let (cert, cert_value) = takagi_certificate(beta, &v, sigma);
                return Ok(GrunskyNormEstimate {
                    value: sigma,
                    truncation: n,
                    monotone_certificate: vec![(n, sigma)],
                    target: None,
                    certificate: cert,
                    certificate_value: cert_value,
                    iterations: total,
                });
            }
            lambda = next;
        }
    }
    // nearly repeated top singular value: fall back to a dense SVD
    let svd = beta.clone().svd(false, true);
    let Some(v_t) = svd.v_t else {
        return Err(GrunskyError::NormStalled(total));
    };
    let (k, sigma) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, s)| if s > best.1 { (i, s) } else { best });
    if !sigma.is_finite() {
        return Err(GrunskyError::NormStalled(total));
    }
    let v = v_t.row(k).adjoint();
    let (cert, cert_value) = takagi_certificate(beta, &v, sigma);
    Ok(GrunskyNormEstimate {
        value: sigma,
        truncation: n,
        monotone_certificate: vec![(n, sigma)],
        target: None,
        certificate: cert,
        certificate_value: cert_value,
        iterations: total,
    })
}

/// For symmetric `beta` with right singular vector `v` and `u = beta v / sigma`,
/// one of `v + conj(u)` and `i (v - conj(u))` is a unit vector attaining
/// `|x^T beta x| = sigma`.
fn takagi_certificate(beta: &DMatrix<Complex64>, v: &DVector<Complex64>, sigma: f64) -> (Vec<Complex64>, f64) {
    let u = beta * v / Complex64::new(sigma, 0.0);
    let uc = u.map(|z| z.conj());
    let candidates = [v + &uc, (v - &uc) * Complex64::i()];
    let mut best = (v.iter().copied().collect::<Vec<_>>(), 0.0);
    for x in candidates {
        let nx = x.norm();
        if nx < 1e-8 {
            continue;
        }
        let x = x / Complex64::new(nx, 0.0);
        let q = (x.transpose() * beta * &x)[(0, 0)].norm();
        if q > best.1 {
            best = (x.iter().copied().collect(), q);
        }
    }
    best
}

/// `beta_mn -> beta_mn t^(m+n)`, the matrix of `f_t(z) = f(tz)/t`.
pub fn homotopy_scaling(matrix: &GrunskyMatrix, t: f64) -> Result<GrunskyMatrix, GrunskyError> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(GrunskyError::BadParameter(t));
    }
    let n = matrix.truncation();
    let pw: Vec<f64> = (1..=n).map(|k| t.powi(k as i32)).collect();
    Ok(GrunskyMatrix { entries: DMatrix::from_fn(n, n, |i, j| matrix.entries[(i, j)] * (pw[i] * pw[j])) })
}

/// Norms of the leading blocks for increasing truncations.
pub fn norm_sweep(series: &SigmaSeries, truncations: &[usize]) -> Result<GrunskyNormEstimate, GrunskyError> {
    let max = *truncations.last().ok_or(GrunskyError::BadTruncations)?;
    if truncations.windows(2).any(|w| w[0] >= w[1]) || truncations[0] == 0 {
        return Err(GrunskyError::BadTruncations);
    }
    let full = grunsky_coefficients(series, max)?;
    sweep_blocks(&full, truncations)
}

/// [`norm_sweep`] over leading blocks of an already computed matrix.
pub fn sweep_blocks(full: &GrunskyMatrix, truncations: &[usize]) -> Result<GrunskyNormEstimate, GrunskyError> {
    let mut history: Vec<(usize, f64)> = Vec::new();
    let mut last: Option<GrunskyNormEstimate> = None;
    let mut iterations = 0;
    for &n in truncations {
        let block = full.leading(n);
        let est = norm_with_start(&block, last.as_ref().map(|e| e.certificate_start()))?;
        iterations += est.iterations;
        if let Some(&(n_previous, previous)) = history.last() {
            if est.value < previous - 1e-12 {
                return Err(GrunskyError::NotMonotone { n_previous, previous, n, value: est.value });
            }
        }
        history.push((n, est.value));
        last = Some(est);
    }
    let mut est = last.ok_or(GrunskyError::BadTruncations)?;
    est.monotone_certificate = history;
    est.iterations = iterations;
    Ok(est)
}

impl GrunskyNormEstimate {
    fn certificate_start(&self) -> &[Complex64] {
        &self.certificate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::{invert_to_sigma, TaylorSeries};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn slit_map_gives_identity() {
        let mut b = vec![ZERO; 64];
        b[1] = c(1.0);
        let f = SigmaSeries::from_b(&b);
        let g = grunsky_coefficients(&f, 32).unwrap();
        for i in 1..=32 {
            for j in 1..=32 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g.get(i, j) - c(want)).norm() < 1e-14);
            }
        }
        let est = grunsky_norm(&g).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn koebe_inversion_matches_slit() {
        let f = invert_to_sigma(&TaylorSeries::koebe(40));
        let g = grunsky_coefficients(&f, 16).unwrap();
        assert!((g.get(1, 1) - c(1.0)).norm() < 1e-12);
        assert!((grunsky_norm(&g).unwrap().value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_series_gives_zero_norm() {
        let f = SigmaSeries::from_b(&[ZERO; 20]);
        let g = grunsky_coefficients(&f, 8).unwrap();
        assert_eq!(grunsky_norm(&g).unwrap().value, 0.0);
    }

    #[test]
    fn too_short_series_is_rejected() {
        let f = SigmaSeries::from_b(&[ZERO; 10]);
        assert!(matches!(grunsky_coefficients(&f, 8), Err(GrunskyError::InsufficientCoefficients { .. })));
    }

    #[test]
    fn identity_homotopy_diagonal() {
        let g = homotopy_scaling(&GrunskyMatrix::identity(5), 0.5).unwrap();
        for m in 1..=5 {
            assert_eq!(g.get(m, m).re, 0.5f64.powi(2 * m as i32));
        }
    }
}
