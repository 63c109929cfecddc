//! Singular values, Hermitian eigenvalues and the Wielandt embedding.
//!
//! Both decompositions are Jacobi methods: one-sided (Hestenes) Jacobi on the
//! columns for the SVD, and cyclic two-sided Jacobi with complex rotations for
//! Hermitian eigenvalues. At the sizes used here (n <= 64) they converge in a
//! handful of sweeps and keep small singular values to high relative accuracy.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

const MAX_SWEEPS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Singular,
    #[serde(rename = "hermitian")]
    HermitianEigen,
}

/// A non-ascending sequence of spectral values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumJson")]
pub struct Spectrum {
    kind: SpectrumKind,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct SpectrumJson {
    kind: SpectrumKind,
    values: Vec<f64>,
}

impl TryFrom<SpectrumJson> for Spectrum {
    type Error = Error;

    fn try_from(raw: SpectrumJson) -> Result<Self> {
        Spectrum::new(raw.kind, raw.values)
    }
}

impl Spectrum {
    /// Validates ordering (and non-negativity for singular values).
    pub fn new(kind: SpectrumKind, values: Vec<f64>) -> Result<Self> {
        if let Some(p) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum(format!(
                "value at position {} is not finite",
                p + 1
            )));
        }
        if let Some(p) = values.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::InvalidSpectrum(format!(
                "values increase between positions {} and {}",
                p + 1,
                p + 2
            )));
        }
        if kind == SpectrumKind::Singular {
            if let Some(p) = values.iter().position(|&v| v < 0.0) {
                return Err(Error::InvalidSpectrum(format!(
                    "singular value at position {} is negative",
                    p + 1
                )));
            }
        }
        Ok(Spectrum { kind, values })
    }

    pub fn singular(values: Vec<f64>) -> Result<Self> {
        Self::new(SpectrumKind::Singular, values)
    }

    pub fn hermitian(values: Vec<f64>) -> Result<Self> {
        Self::new(SpectrumKind::HermitianEigen, values)
    }

    /// Sorts arbitrary values non-ascending before validating.
    pub(crate) fn from_unsorted(kind: SpectrumKind, mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        if kind == SpectrumKind::Singular {
            for v in &mut values {
                *v = v.max(0.0);
            }
        }
        Spectrum { kind, values }
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// One-based access, matching the index conventions of the inequalities.
    #[inline]
    pub fn at(&self, i: usize) -> f64 {
        self.values[i - 1]
    }

    /// Sum over a set of one-based positions; the empty sum is 0.
    pub fn sum_at(&self, positions: &[usize]) -> f64 {
        positions.iter().map(|&i| self.at(i)).sum()
    }
}

/// Singular values of `x`, non-ascending.
pub fn singular_values(x: &ComplexMatrix) -> Result<Spectrum> {
    x.check_finite()?;
    let (sigma, _, _) = jacobi_svd(x, false);
    Ok(Spectrum {
        kind: SpectrumKind::Singular,
        values: sigma,
    })
}

/// Full SVD `x = U diag(sigma) V*`, sigma non-ascending.
pub(crate) fn svd(x: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix, ComplexMatrix)> {
    x.check_finite()?;
    let (sigma, u, v) = jacobi_svd(x, true);
    Ok((sigma, u.expect("vectors requested"), v.expect("vectors requested")))
}

type SvdParts = (Vec<f64>, Option<ComplexMatrix>, Option<ComplexMatrix>);

fn jacobi_svd(x: &ComplexMatrix, want_vectors: bool) -> SvdParts {
    let n = x.n();
    // Column-major working copy: cols[j][i] = x[i, j].
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| x[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<Complex64>> = if want_vectors {
        (0..n)
            .map(|j| {
                let mut e = vec![Complex64::new(0.0, 0.0); n];
                e[j] = Complex64::new(1.0, 0.0);
                e
            })
            .collect()
    } else {
        Vec::new()
    };

    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotate the phase out of column q so the pair is real-orthogonalizable.
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], phase, c, s);
                if want_vectors {
                    let (lo, hi) = v.split_at_mut(q);
                    rotate(&mut lo[p], &mut hi[0], phase, c, s);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(f64, usize)> = cols
        .iter()
        .enumerate()
        .map(|(j, col)| (col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(), j))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let sigma: Vec<f64> = order.iter().map(|&(s, _)| s).collect();
    if !want_vectors {
        return (sigma, None, None);
    }

    let mut u = ComplexMatrix::zeros(n);
    let mut vm = ComplexMatrix::zeros(n);
    for (k, &(s, j)) in order.iter().enumerate() {
        for i in 0..n {
            vm[(i, k)] = v[j][i];
            if s > 0.0 {
                u[(i, k)] = cols[j][i] / s;
            }
        }
    }
    complete_orthonormal(&mut u, &sigma);
    (sigma, Some(u), Some(vm))
}

/// Columns `p`, `q` <- `[p, e^{-i phi} q] * [[c, s], [-s, c]]`.
fn rotate(p: &mut [Complex64], q: &mut [Complex64], phase: Complex64, c: f64, s: f64) {
    let ph = phase.conj();
    for (a, b) in p.iter_mut().zip(q.iter_mut()) {
        let x = *a;
        let y = *b * ph;
        *a = x * c - y * s;
        *b = x * s + y * c;
    }
}

/// Fills columns of `u` belonging to zero singular values with an orthonormal
/// completion (Gram-Schmidt against the unit vectors).
fn complete_orthonormal(u: &mut ComplexMatrix, sigma: &[f64]) {
    let n = u.n();
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut e = 0;
    for k in 0..n {
        let mut col: Vec<Complex64> = (0..n).map(|i| u[(i, k)]).collect();
        if sigma[k] == 0.0 {
            loop {
                col = vec![Complex64::new(0.0, 0.0); n];
                col[e % n] = Complex64::new(1.0, 0.0);
                e += 1;
                for b in &basis {
                    let d: Complex64 = b.iter().zip(&col).map(|(x, y)| x.conj() * y).sum();
                    for (c, x) in col.iter_mut().zip(b) {
                        *c -= d * x;
                    }
                }
                let nrm: f64 = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if nrm > 1e-8 {
                    for c in &mut col {
                        *c /= nrm;
                    }
                    break;
                }
            }
            for i in 0..n {
                u[(i, k)] = col[i];
            }
        }
        basis.push(col);
    }
}

/// Real eigenvalues of a Hermitian matrix, non-ascending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Spectrum> {
    a.check_finite()?;
    let tolerance = 1e-12 * (1.0 + a.max_abs());
    let deviation = a.hermitian_deviation();
    if deviation > tolerance {
        return Err(Error::NotHermitian {
            deviation,
            tolerance,
        });
    }
    Ok(Spectrum::from_unsorted(
        SpectrumKind::HermitianEigen,
        jacobi_eigenvalues(&a.hermitian_part()),
    ))
}

fn jacobi_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    let n = a.n();
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
    }
    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let h = m[(p, q)];
                let hn = h.norm();
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                if hn == 0.0 || hn <= 0.5 * eps * (app.abs() * aqq.abs()).sqrt() {
                    continue;
                }
                rotated = true;
                let e = h / hn;
                let tau = (aqq - app) / (2.0 * hn);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // W = diag(1, conj(e)) * [[c, s], [-s, c]]; A <- W* A W.
                let ec = e.conj();
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp * c - akq * (s * ec);
                    m[(k, q)] = akp * s + akq * (c * ec);
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = apk * c - aqk * (s * e);
                    m[(q, k)] = apk * s + aqk * (c * e);
                }
                m[(p, q)] = Complex64::new(0.0, 0.0);
                m[(q, p)] = Complex64::new(0.0, 0.0);
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
            }
        }
        if !rotated {
            break;
        }
    }
    (0..n).map(|i| m[(i, i)].re).collect()
}

/// The 2n x 2n Hermitian block matrix `[[0, A], [A*, 0]]`.
pub fn wielandt_embed(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.n();
    let mut out = ComplexMatrix::zeros(2 * n);
    for r in 0..n {
        for c in 0..n {
            out[(r, n + c)] = a[(r, c)];
            out[(n + c, r)] = a[(r, c)].conj();
        }
    }
    out
}

/// Spectrum of the Wielandt embedding predicted from singular values:
/// `sigma_1, ..., sigma_n, -sigma_n, ..., -sigma_1`.
pub fn wielandt_spectrum(sigma: &Spectrum) -> Spectrum {
    let mut values = sigma.values().to_vec();
    values.extend(sigma.values().iter().rev().map(|s| -s));
    Spectrum {
        kind: SpectrumKind::HermitianEigen,
        values,
    }
}
