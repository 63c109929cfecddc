//! Brute-force coverage for small dimensions: every TF pair, every index
//! sequence and every partition, for every supplied matrix pair.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::campaign::{CheckCounts, CheckKind, Instance, Tally, Witness};
use crate::concave::ConcaveFn;
use crate::error::{Error, Result};
use crate::index::{enumerate_index_seqs, enumerate_partitions, enumerate_tf_pairs, IndexSeq, TfPair};
use crate::ineq::Checker;
use crate::matrix::ComplexMatrix;

/// Largest dimension the oracle accepts.
pub const ORACLE_MAX_N: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n: usize,
    pub instances: usize,
    pub tf_pairs: usize,
    pub index_seqs: usize,
    pub partitions: usize,
    pub checks: BTreeMap<CheckKind, CheckCounts>,
    /// Every failing evaluation with its replay payload.
    pub failures: Vec<Witness>,
}

impl OracleReport {
    pub fn clean(&self) -> bool {
        self.failures.is_empty() && self.checks.values().all(|c| c.violated == 0)
    }
}

/// Evaluates TF (singular values and Hermitian parts), f-TF and concave
/// Mirsky for every `f`, and the exchange inequality, on each pair `(A, B)`
/// over all index configurations of dimension `n`.
pub fn exhaustive_oracle(
    checker: &Checker,
    n: usize,
    pairs: &[(ComplexMatrix, ComplexMatrix)],
    fs: &[ConcaveFn],
) -> Result<OracleReport> {
    if n > ORACLE_MAX_N {
        return Err(Error::BudgetExceeded(n));
    }
    if n == 0 {
        return Err(Error::InvalidDims { n, m: 0 });
    }
    for f in fs {
        f.ensure_valid()?;
    }
    let tf_pairs: Vec<TfPair> = (1..=n)
        .flat_map(|m| enumerate_tf_pairs(n, m).expect("1 <= m <= n"))
        .collect();
    let seqs: Vec<IndexSeq> = (1..=n).flat_map(|m| enumerate_index_seqs(n, m)).collect();
    let partitions: Vec<_> = seqs.iter().flat_map(|s| enumerate_partitions(s).collect::<Vec<_>>()).collect();

    let mut checks: BTreeMap<CheckKind, CheckCounts> = BTreeMap::new();
    let mut failures = Vec::new();
    for (k, (a, b)) in pairs.iter().enumerate() {
        if a.n() != n || b.n() != n {
            return Err(Error::DimMismatch(format!(
                "instance {k} is {}x{} / {}x{}, oracle runs at n = {n}",
                a.n(),
                a.n(),
                b.n(),
                b.n()
            )));
        }
        let inst = Instance::new(a, b, true)?;
        let mut tally = Tally::new(k as u64, None, checker.tol_rel, f64::INFINITY, false, usize::MAX, 0);
        for p in &tf_pairs {
            inst.tf(checker, &mut tally, p)?;
            for f in fs {
                inst.f_tf(checker, &mut tally, p, f)?;
            }
        }
        for s in &seqs {
            for f in fs {
                inst.mirsky(checker, &mut tally, s, f)?;
            }
        }
        for p in &partitions {
            inst.theorem3(checker, &mut tally, p)?;
        }
        for (c, v) in &tally.counts {
            let e = checks.entry(*c).or_default();
            e.checked += v.checked;
            e.held += v.held;
            e.violated += v.violated;
            e.max_tightness = e.max_tightness.max(v.max_tightness);
        }
        failures.append(&mut tally.violations);
    }
    Ok(OracleReport {
        n,
        instances: pairs.len(),
        tf_pairs: tf_pairs.len(),
        index_seqs: seqs.len(),
        partitions: partitions.len(),
        checks,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_case() {
        let a = ComplexMatrix::diag(&[1.0]);
        let r = exhaustive_oracle(&Checker::default(), 1, &[(a.clone(), a)], &[ConcaveFn::identity()]).unwrap();
        assert_eq!((r.tf_pairs, r.index_seqs, r.partitions), (1, 1, 4));
        assert!(r.clean());
    }

    #[test]
    fn budget() {
        assert!(matches!(
            exhaustive_oracle(&Checker::default(), 7, &[], &[]),
            Err(Error::BudgetExceeded(7))
        ));
    }

    #[test]
    fn diagonal_pair() {
        let pairs = [(ComplexMatrix::diag(&[2.0, 1.0]), ComplexMatrix::diag(&[1.0, 1.0]))];
        let r = exhaustive_oracle(&Checker::default(), 2, &pairs, &[ConcaveFn::power(0.5)]).unwrap();
        // 3^n + 2n 3^(n-1) - 1 partitions.
        assert_eq!(r.partitions, 9 + 12 - 1);
        assert_eq!(r.index_seqs, 3);
        assert!(r.clean());
    }
}
