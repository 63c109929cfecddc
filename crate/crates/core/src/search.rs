//! Search for Hermitian eigenvalue triples where a concave version of a
//! Thompson-Freede inequality fails although the plain inequality holds.
//!
//! `f` is only defined on `[0, inf)`, so negative eigenvalues need a
//! convention; neither is privileged.

use serde::{Deserialize, Serialize};

use crate::concave::ConcaveFn;
use crate::error::{Error, Result};
use crate::index::{enumerate_tf_pairs, TfPair};
use crate::ineq::{tf_sides, Checker};
use crate::matrix::ComplexMatrix;
use crate::report::GapReport;
use crate::rng::{CounterRng, Purpose};
use crate::sampling::sample_tf_pair;
use crate::spectrum::{hermitian_eigenvalues, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeConvention {
    /// Only evaluate inequalities whose arguments are all non-negative.
    SkipNegative,
    /// `f(-x) := -f(x)`.
    OddExtension,
}

/// Where the Hermitian pairs come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchSource {
    /// `(G + G*) / 2` with complex Ginibre `G`.
    HermitianGaussian,
    /// `G G* / n`: positive semidefinite.
    PsdWishart,
    /// Real diagonal with sorted `|N(0, 1)|` entries.
    DiagonalNonNegative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub budget: u64,
    pub n: usize,
    pub f: ConcaveFn,
    pub convention: NegativeConvention,
    pub seed: u64,
    pub source: SearchSource,
    /// Pairs drawn per instance when `n` is too large to enumerate.
    #[serde(default = "default_pairs")]
    pub pairs_per_instance: usize,
}

fn default_pairs() -> usize {
    64
}

impl SearchConfig {
    pub fn new(budget: u64, n: usize, f: ConcaveFn, convention: NegativeConvention, seed: u64) -> Self {
        SearchConfig {
            budget,
            n,
            f,
            convention,
            seed,
            source: SearchSource::HermitianGaussian,
            pairs_per_instance: default_pairs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FVersionWitness {
    pub instance: u64,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub alpha: Spectrum,
    pub beta: Spectrum,
    pub gamma: Spectrum,
    pub pair: TfPair,
    pub f_report: GapReport,
    pub tf_report: GapReport,
}

fn signed_eval(f: &ConcaveFn, x: f64, convention: NegativeConvention) -> Option<f64> {
    if x >= 0.0 {
        Some(f.eval_unchecked(x))
    } else {
        match convention {
            NegativeConvention::SkipNegative => None,
            NegativeConvention::OddExtension => Some(-f.eval_unchecked(-x)),
        }
    }
}

impl Checker {
    /// The f-TF gap on arbitrary real spectra; `None` when the convention skips it.
    pub fn signed_f_tf_gap(
        &self,
        alpha: &Spectrum,
        beta: &Spectrum,
        gamma: &Spectrum,
        pair: &TfPair,
        f: &ConcaveFn,
        convention: NegativeConvention,
    ) -> Result<Option<GapReport>> {
        f.ensure_valid()?;
        // Dimension checks are shared with the plain gap.
        self.tf_gap(alpha, beta, gamma, pair)?;
        let args = pair
            .gamma_positions()
            .into_iter()
            .map(|p| gamma.at(p))
            .chain(pair.i().indices().iter().map(|&i| alpha.at(i)))
            .chain(pair.j().indices().iter().map(|&j| beta.at(j)));
        let mut skip = false;
        for v in args {
            skip |= signed_eval(f, v, convention).is_none();
        }
        if skip {
            return Ok(None);
        }
        let (lhs, rhs) = tf_sides(alpha, beta, gamma, pair, |x| {
            signed_eval(f, x, convention).expect("arguments checked")
        });
        Ok(Some(self.gap("f_tf_signed", lhs, rhs)))
    }

    /// `Some((f_report, tf_report))` iff the f-version fails while plain TF holds.
    pub fn fversion_witness(
        &self,
        alpha: &Spectrum,
        beta: &Spectrum,
        gamma: &Spectrum,
        pair: &TfPair,
        f: &ConcaveFn,
        convention: NegativeConvention,
    ) -> Result<Option<(GapReport, GapReport)>> {
        let Some(fr) = self.signed_f_tf_gap(alpha, beta, gamma, pair, f, convention)? else {
            return Ok(None);
        };
        if fr.holds {
            return Ok(None);
        }
        let tr = self.tf_gap(alpha, beta, gamma, pair)?;
        Ok(tr.holds.then_some((fr, tr)))
    }

    pub fn hermitian_fversion_search(&self, cfg: &SearchConfig) -> Result<Vec<FVersionWitness>> {
        cfg.f.ensure_valid()?;
        if cfg.n == 0 {
            return Err(Error::InvalidConfig("search dimension must be >= 1".into()));
        }
        let n = cfg.n;
        let all_pairs: Option<Vec<TfPair>> = (n <= 6).then(|| {
            (1..=n)
                .flat_map(|m| enumerate_tf_pairs(n, m).expect("1 <= m <= n"))
                .collect()
        });
        let mut out = Vec::new();
        for k in 0..cfg.budget {
            let a = sample_hermitian(cfg.source, cfg.seed, n, 2 * k);
            let b = sample_hermitian(cfg.source, cfg.seed, n, 2 * k + 1);
            let alpha = hermitian_eigenvalues(&a)?;
            let beta = hermitian_eigenvalues(&b)?;
            let gamma = hermitian_eigenvalues(&(&a + &b))?;
            let pairs = match &all_pairs {
                Some(p) => p.clone(),
                None => {
                    let mut rng = CounterRng::for_purpose(cfg.seed, Purpose::Indices, k);
                    (0..cfg.pairs_per_instance).map(|_| sample_tf_pair(&mut rng, n)).collect()
                }
            };
            for pair in pairs {
                if let Some((f_report, tf_report)) =
                    self.fversion_witness(&alpha, &beta, &gamma, &pair, &cfg.f, cfg.convention)?
                {
                    out.push(FVersionWitness {
                        instance: k,
                        a: a.clone(),
                        b: b.clone(),
                        alpha: alpha.clone(),
                        beta: beta.clone(),
                        gamma: gamma.clone(),
                        pair,
                        f_report,
                        tf_report,
                    });
                }
            }
        }
        Ok(out)
    }
}

fn sample_hermitian(source: SearchSource, seed: u64, n: usize, index: u64) -> ComplexMatrix {
    use crate::ensemble::{Ensemble, EnsembleKind};
    let draw = |kind| Ensemble { kind, n, seed }.sample(index);
    match source {
        SearchSource::HermitianGaussian => draw(EnsembleKind::HermitianGaussian),
        SearchSource::DiagonalNonNegative => draw(EnsembleKind::DiagonalNonNegative),
        SearchSource::PsdWishart => {
            let g = draw(EnsembleKind::GinibreComplex);
            // Symmetrize to remove rounding asymmetry in the product.
            g.matmul(&g.adjoint()).expect("square").scale(1.0 / n as f64).hermitian_part()
        }
    }
}
