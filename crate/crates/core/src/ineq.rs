//! Evaluation of the individual inequalities as [`GapReport`]s.
//!
//! Each check has a spectra-level form (operating on already sorted
//! sequences) and, where the inequality is about matrices, a matrix-level
//! wrapper that computes the spectra first.

use crate::concave::ConcaveFn;
use crate::error::{Error, Result};
use crate::index::{IndexPartition, IndexSeq, TfPair};
use crate::matrix::ComplexMatrix;
use crate::report::{GapReport, ThresholdIndices, DEFAULT_TOL_REL};
use crate::spectrum::{singular_values, Spectrum};

/// Evaluates inequalities under a fixed relative tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checker {
    pub tol_rel: f64,
}

impl Default for Checker {
    fn default() -> Self {
        Checker {
            tol_rel: DEFAULT_TOL_REL,
        }
    }
}

/// The three singular-value spectra of a zero-sum triple `A + B + C = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleSpectra {
    pub alpha: Spectrum,
    pub beta: Spectrum,
    pub gamma: Spectrum,
}

impl TripleSpectra {
    /// `alpha = sigma(A)`, `beta = sigma(B)`, `gamma = sigma(A + B)`.
    pub fn of_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        a.same_dim(b)?;
        Ok(TripleSpectra {
            alpha: singular_values(a)?,
            beta: singular_values(b)?,
            gamma: singular_values(&(a + b))?,
        })
    }
}

fn require_len(what: &str, s: &Spectrum, n: usize) -> Result<()> {
    if s.len() < n {
        return Err(Error::DimMismatch(format!(
            "{what} has {} values, need at least {n}",
            s.len()
        )));
    }
    Ok(())
}

fn require_non_negative(s: &Spectrum) -> Result<()> {
    match s.values().iter().position(|&v| v < 0.0) {
        Some(p) => Err(Error::NegativeSpectrum {
            position: p + 1,
            value: s.values()[p],
        }),
        None => Ok(()),
    }
}

/// `(sum_k g(gamma(i_k + j_k - k)), sum_k g(alpha(i_k)) + sum_k g(beta(j_k)))`.
pub(crate) fn tf_sides(
    alpha: &Spectrum,
    beta: &Spectrum,
    gamma: &Spectrum,
    pair: &TfPair,
    g: impl Fn(f64) -> f64,
) -> (f64, f64) {
    let lhs: f64 = pair.gamma_positions().into_iter().map(|p| g(gamma.at(p))).sum();
    let a: f64 = pair.i().indices().iter().map(|&i| g(alpha.at(i))).sum();
    let b: f64 = pair.j().indices().iter().map(|&j| g(beta.at(j))).sum();
    (lhs, a + b)
}

/// First one-based position whose value is below `t`, or `len + 1`.
pub fn first_below(values: impl IntoIterator<Item = f64>, t: f64) -> usize {
    let mut count = 0;
    for v in values {
        count += 1;
        if v < t {
            return count;
        }
    }
    count + 1
}

impl Checker {
    pub fn new(tol_rel: f64) -> Self {
        Checker { tol_rel }
    }

    pub fn gap(&self, name: &str, lhs: f64, rhs: f64) -> GapReport {
        GapReport::new(name, lhs, rhs, self.tol_rel)
    }

    fn check_tf_dims(&self, alpha: &Spectrum, beta: &Spectrum, gamma: &Spectrum, n: usize) -> Result<()> {
        require_len("alpha", alpha, n)?;
        require_len("beta", beta, n)?;
        require_len("gamma", gamma, n)
    }

    /// Thompson-Freede: `sum gamma(i_k + j_k - k) <= sum alpha(i_k) + sum beta(j_k)`.
    pub fn tf_gap(&self, alpha: &Spectrum, beta: &Spectrum, gamma: &Spectrum, pair: &TfPair) -> Result<GapReport> {
        self.check_tf_dims(alpha, beta, gamma, pair.n())?;
        let (lhs, rhs) = tf_sides(alpha, beta, gamma, pair, |x| x);
        Ok(self.gap("tf", lhs, rhs))
    }

    /// The same inequality with `f` applied to every value. Requires non-negative spectra.
    pub fn f_tf_gap(
        &self,
        alpha: &Spectrum,
        beta: &Spectrum,
        gamma: &Spectrum,
        pair: &TfPair,
        f: &ConcaveFn,
    ) -> Result<GapReport> {
        self.check_tf_dims(alpha, beta, gamma, pair.n())?;
        f.ensure_valid()?;
        for s in [alpha, beta, gamma] {
            require_non_negative(s)?;
        }
        let (lhs, rhs) = tf_sides(alpha, beta, gamma, pair, |x| f.eval_unchecked(x));
        Ok(self.gap("f_tf", lhs, rhs))
    }

    /// `sum_k |f(sx(i_k)) - f(sy(i_k))| <= sum_{k<=m} f(sd(k))` on given spectra,
    /// where `sd` is the spectrum of the difference.
    pub fn mirsky_f_gap_spectra(
        &self,
        sx: &Spectrum,
        sy: &Spectrum,
        sd: &Spectrum,
        idx: &IndexSeq,
        f: &ConcaveFn,
    ) -> Result<GapReport> {
        for (what, s) in [("sigma(X)", sx), ("sigma(Y)", sy), ("sigma(X-Y)", sd)] {
            require_len(what, s, idx.n())?;
            require_non_negative(s)?;
        }
        f.ensure_valid()?;
        let lhs: f64 = idx
            .indices()
            .iter()
            .map(|&i| (f.eval_unchecked(sx.at(i)) - f.eval_unchecked(sy.at(i))).abs())
            .sum();
        let rhs: f64 = (1..=idx.m()).map(|k| f.eval_unchecked(sd.at(k))).sum();
        Ok(self.gap("mirsky_f", lhs, rhs))
    }

    pub fn mirsky_f_gap(&self, x: &ComplexMatrix, y: &ComplexMatrix, idx: &IndexSeq, f: &ConcaveFn) -> Result<GapReport> {
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
        self.mirsky_f_gap_spectra(&sx, &sy, &sd, idx, f)
    }

    /// `gamma(I_CL) + alpha(I_AL) <= alpha(I_CR) + gamma(I_AR) + beta(J)`.
    pub fn theorem3_gap(&self, alpha: &Spectrum, beta: &Spectrum, gamma: &Spectrum, p: &IndexPartition) -> Result<GapReport> {
        self.check_tf_dims(alpha, beta, gamma, p.seq().n())?;
        let lhs = gamma.sum_at(&p.i_cl()) + alpha.sum_at(&p.i_al());
        let rhs = alpha.sum_at(&p.i_cr()) + gamma.sum_at(&p.i_ar()) + beta.sum_at(&p.j_set());
        Ok(self.gap("theorem3", lhs, rhs))
    }

    /// [`theorem3_gap`](Self::theorem3_gap) for `C = -(A + B)`.
    pub fn theorem3_gap_matrices(&self, a: &ComplexMatrix, b: &ComplexMatrix, p: &IndexPartition) -> Result<GapReport> {
        let s = TripleSpectra::of_sum(a, b)?;
        self.theorem3_gap(&s.alpha, &s.beta, &s.gamma, p)
    }
}

/// `a` over `alpha(i_k)`, `c` over `gamma(i_k)`, `b` over `beta(k)`, `k = 1..m`.
pub fn threshold_indices(alpha: &Spectrum, beta: &Spectrum, gamma: &Spectrum, idx: &IndexSeq, t: f64) -> ThresholdIndices {
    let m = idx.m();
    ThresholdIndices {
        a: first_below(idx.indices().iter().map(|&i| alpha.at(i)), t),
        b: first_below((1..=m).map(|k| beta.at(k)), t),
        c: first_below(idx.indices().iter().map(|&i| gamma.at(i)), t),
        t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{IndexSeq, Side};

    fn sing(v: &[f64]) -> Spectrum {
        Spectrum::singular(v.to_vec()).unwrap()
    }

    #[test]
    fn tf_examples() {
        let chk = Checker::default();
        // A = diag(2,1), B = diag(1,1): gamma = (3,2).
        let r = chk
            .tf_gap(&sing(&[2.0, 1.0]), &sing(&[1.0, 1.0]), &sing(&[3.0, 2.0]), &TfPair::from_slices(2, &[1], &[1]).unwrap())
            .unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (3.0, 3.0, 0.0));
        // A = diag(2,0), B = diag(0,2): gamma = (2,2).
        let (a, b, g) = (sing(&[2.0, 0.0]), sing(&[2.0, 0.0]), sing(&[2.0, 2.0]));
        let pair = TfPair::from_slices(2, &[1], &[1]).unwrap();
        let r = chk.tf_gap(&a, &b, &g, &pair).unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (2.0, 4.0, 2.0));
        let r = chk.f_tf_gap(&a, &b, &g, &pair, &ConcaveFn::hook(1.0)).unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (1.0, 2.0, 1.0));
    }

    #[test]
    fn tf_trace_identity_on_eigenvalues() {
        let a = Spectrum::hermitian(vec![2.0, -1.0]).unwrap();
        let b = Spectrum::hermitian(vec![0.5, -3.0]).unwrap();
        let g = Spectrum::hermitian(vec![1.0, -2.5]).unwrap();
        let r = Checker::default()
            .tf_gap(&a, &b, &g, &TfPair::from_slices(2, &[1, 2], &[1, 2]).unwrap())
            .unwrap();
        assert_eq!(r.slack, 0.0);
        assert!(matches!(
            Checker::default().f_tf_gap(&a, &b, &g, &TfPair::from_slices(2, &[1], &[1]).unwrap(), &ConcaveFn::identity()),
            Err(Error::NegativeSpectrum { position: 2, .. })
        ));
    }

    #[test]
    fn f_tf_zero_gamma() {
        let r = Checker::default()
            .f_tf_gap(
                &sing(&[1.0, 0.5]),
                &sing(&[0.3, 0.2]),
                &sing(&[0.0, 0.0]),
                &TfPair::from_slices(2, &[1, 2], &[1, 2]).unwrap(),
                &ConcaveFn::power(0.5),
            )
            .unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.slack, r.rhs);
    }

    #[test]
    fn mirsky_examples() {
        let chk = Checker::default();
        let x = ComplexMatrix::diag(&[3.0, 1.0]);
        let y = ComplexMatrix::diag(&[1.0, 0.0]);
        let full = IndexSeq::new(2, vec![1, 2]).unwrap();
        let r = chk.mirsky_f_gap(&x, &y, &full, &ConcaveFn::identity()).unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (3.0, 3.0, 0.0));
        let r = chk
            .mirsky_f_gap(&x, &y, &IndexSeq::new(2, vec![2]).unwrap(), &ConcaveFn::identity())
            .unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (1.0, 2.0, 1.0));
        let r = chk
            .mirsky_f_gap(&ComplexMatrix::diag(&[5.0, 0.0]), &ComplexMatrix::zeros(2), &full, &ConcaveFn::hook(1.0))
            .unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (1.0, 1.0, 0.0));
        let r = chk.mirsky_f_gap(&x, &x, &full, &ConcaveFn::power(0.3)).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(matches!(
            chk.mirsky_f_gap(&x, &ComplexMatrix::zeros(3), &full, &ConcaveFn::identity()),
            Err(Error::DimMismatch(_))
        ));
    }

    #[test]
    fn theorem3_examples() {
        let chk = Checker::default();
        let a = ComplexMatrix::diag(&[1.0, 1.0]);
        let b = ComplexMatrix::diag(&[1.0, 0.0]);
        let p = IndexPartition::new(IndexSeq::new(2, vec![1]).unwrap(), 1, vec![Side::C]).unwrap();
        let r = chk.theorem3_gap_matrices(&a, &b, &p).unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (2.0, 2.0, 0.0));

        let p = IndexPartition::new(IndexSeq::new(2, vec![1, 2]).unwrap(), 3, vec![Side::A, Side::C]).unwrap();
        let r = chk.theorem3_gap_matrices(&a, &b, &p).unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (0.0, 0.0, 0.0));
    }

    #[test]
    fn threshold_examples() {
        let alpha = sing(&[2.0, 0.5]);
        let idx = IndexSeq::new(2, vec![1, 2]).unwrap();
        let th = threshold_indices(&alpha, &alpha, &alpha, &idx, 1.0);
        assert_eq!((th.a, th.b, th.c), (2, 2, 2));
        let th = threshold_indices(&alpha, &alpha, &alpha, &idx, 0.1);
        assert_eq!(th.a, 3);
        let th = threshold_indices(&alpha, &alpha, &alpha, &idx, 5.0);
        assert_eq!(th.a, 1);
    }
}
