//! The concave Mirsky inequality read as a perturbation bound: how far can
//! `f(sigma(X))` move when `X` is perturbed to `Y`?

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::concave::ConcaveFn;
use crate::error::{Error, Result};
use crate::index::IndexSeq;
use crate::ineq::Checker;
use crate::matrix::ComplexMatrix;
use crate::spectrum::{singular_values, svd, Spectrum};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    /// `sum_{k<=m} f(sigma_k(X - Y))`.
    pub bound: f64,
    /// `sum_k |f(sigma_{i_k}(X)) - f(sigma_{i_k}(Y))|`.
    pub actual: f64,
    /// `actual / bound`; 0 when both vanish, infinite (JSON `null`) when only the bound does.
    #[serde(serialize_with = "ser_ratio", deserialize_with = "de_ratio")]
    pub tightness: f64,
    pub holds: bool,
    pub f: ConcaveFn,
    pub idx: IndexSeq,
}

fn ser_ratio<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_some(v)
    } else {
        s.serialize_none()
    }
}

fn de_ratio<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

/// [`BoundResult`] for Schatten quasi-norms, with the norm of the difference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchattenDeviation {
    pub p: f64,
    pub result: BoundResult,
    /// `||X - Y||_p = (sum sigma_k(X - Y)^p)^(1/p)`.
    pub difference_quasi_norm: f64,
}

impl Checker {
    pub fn deviation_bound_spectra(
        &self,
        sx: &Spectrum,
        sy: &Spectrum,
        sd: &Spectrum,
        f: &ConcaveFn,
        idx: &IndexSeq,
    ) -> Result<BoundResult> {
        let gap = self.mirsky_f_gap_spectra(sx, sy, sd, idx, f)?;
        let tightness = if gap.rhs > 0.0 {
            gap.lhs / gap.rhs
        } else if gap.lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Ok(BoundResult {
            bound: gap.rhs,
            actual: gap.lhs,
            tightness,
            holds: gap.holds,
            f: f.clone(),
            idx: idx.clone(),
        })
    }

    pub fn spectral_deviation_bound(
        &self,
        x: &ComplexMatrix,
        y: &ComplexMatrix,
        f: &ConcaveFn,
        idx: &IndexSeq,
    ) -> Result<BoundResult> {
        x.same_dim(y)?;
        if idx.n() != x.n() {
            return Err(Error::DimMismatch(format!(
                "index sequence is over [1, {}] but matrices are {}x{}",
                idx.n(),
                x.n(),
                x.n()
            )));
        }
        let sx = singular_values(x)?;
        let sy = singular_values(y)?;
        let sd = singular_values(&(x - y))?;
        self.deviation_bound_spectra(&sx, &sy, &sd, f, idx)
    }

    /// `sum_i |sigma_i(X)^p - sigma_i(Y)^p| <= ||X - Y||_p^p` for `0 < p <= 1`.
    pub fn schatten_p_deviation(&self, x: &ComplexMatrix, y: &ComplexMatrix, p: f64) -> Result<SchattenDeviation> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidP(p));
        }
        let idx = IndexSeq::prefix(x.n(), x.n())?;
        let result = self.spectral_deviation_bound(x, y, &ConcaveFn::power(p), &idx)?;
        Ok(SchattenDeviation {
            p,
            difference_quasi_norm: result.bound.powf(1.0 / p),
            result,
        })
    }
}

/// Best rank-`r` approximation `U_r diag(sigma_1..sigma_r) V_r*`.
pub fn truncate_rank(x: &ComplexMatrix, r: usize) -> Result<ComplexMatrix> {
    let (sigma, u, v) = svd(x)?;
    let n = x.n();
    let mut us = ComplexMatrix::zeros(n);
    for k in 0..r.min(n) {
        for i in 0..n {
            us[(i, k)] = u[(i, k)] * sigma[k];
        }
    }
    us.matmul(&v.adjoint())
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    #[test]
    fn diagonal_truncation_is_tight() {
        let chk = Checker::default();
        let x = ComplexMatrix::diag(&[4.0, 1.0]);
        let y = ComplexMatrix::diag(&[4.0, 0.0]);
        let idx = IndexSeq::prefix(2, 2).unwrap();
        let r = chk.spectral_deviation_bound(&x, &y, &ConcaveFn::power(0.5), &idx).unwrap();
        assert_eq!((r.actual, r.bound, r.tightness), (1.0, 1.0, 1.0));
        let s = chk.schatten_p_deviation(&x, &y, 0.5).unwrap();
        assert_eq!((s.result.actual, s.result.bound), (1.0, 1.0));
        assert_eq!(s.difference_quasi_norm, 1.0);
    }

    #[test]
    fn schatten_one_is_mirsky() {
        let chk = Checker::default();
        let s = chk
            .schatten_p_deviation(&ComplexMatrix::diag(&[3.0, 1.0]), &ComplexMatrix::diag(&[1.0, 0.0]), 1.0)
            .unwrap();
        assert_eq!((s.result.actual, s.result.bound), (3.0, 3.0));
    }

    #[test]
    fn equal_matrices() {
        let chk = Checker::default();
        let x = ComplexMatrix::diag(&[2.0, 1.0, 0.5]);
        let r = chk
            .spectral_deviation_bound(&x, &x, &ConcaveFn::log1p(1.0), &IndexSeq::prefix(3, 3).unwrap())
            .unwrap();
        assert_eq!((r.actual, r.bound, r.tightness), (0.0, 0.0, 0.0));
        let s = chk.schatten_p_deviation(&x, &x, 0.25).unwrap();
        assert_eq!((s.result.actual, s.result.bound), (0.0, 0.0));
    }

    #[test]
    fn invalid_p() {
        let x = ComplexMatrix::diag(&[1.0]);
        for p in [0.0, -1.0, 1.5, f64::NAN] {
            assert!(matches!(
                Checker::default().schatten_p_deviation(&x, &x, p),
                Err(Error::InvalidP(_))
            ));
        }
    }

    #[test]
    fn truncation_keeps_leading_values() {
        let x = ComplexMatrix::from_real_rows(&[&[2.0, 1.0, 0.0], &[0.5, 3.0, 1.0], &[0.0, 0.2, 1.0]]);
        let full = singular_values(&x).unwrap();
        let t = singular_values(&truncate_rank(&x, 2).unwrap()).unwrap();
        assert_abs_diff_eq!(t.at(1), full.at(1), epsilon = 1e-12);
        assert_abs_diff_eq!(t.at(2), full.at(2), epsilon = 1e-12);
        assert_abs_diff_eq!(t.at(3), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn infinite_tightness_round_trips_as_null() {
        let r = BoundResult {
            bound: 0.0,
            actual: 1.0,
            tightness: f64::INFINITY,
            holds: false,
            f: ConcaveFn::identity(),
            idx: IndexSeq::prefix(1, 1).unwrap(),
        };
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"tightness\":null"));
        let back: BoundResult = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
