//! Random matrix ensembles with reproducible samples.
//!
//! Sample `index` of an ensemble draws from the stream
//! `(seed, Purpose::Matrix, index)`, so any sample can be regenerated on its
//! own. Complex Gaussians are `(g1 + i g2) / sqrt(2)` with `g1, g2` drawn in
//! that order, entries filled row-major.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::rng::{CounterRng, Purpose};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleKind {
    GinibreComplex,
    HermitianGaussian,
    DiagonalNonNegative,
    LowRankPlusNoise { rank: usize, noise_scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub kind: EnsembleKind,
    pub n: usize,
    pub seed: u64,
}

impl Ensemble {
    pub fn new(kind: EnsembleKind, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("ensemble dimension must be >= 1".into()));
        }
        if let EnsembleKind::LowRankPlusNoise { rank, noise_scale } = kind {
            if rank > n {
                return Err(Error::InvalidConfig(format!("rank {rank} exceeds n = {n}")));
            }
            if !(noise_scale >= 0.0 && noise_scale.is_finite()) {
                return Err(Error::InvalidConfig(format!("noise scale {noise_scale} is invalid")));
            }
        }
        Ok(Ensemble { kind, n, seed })
    }

    pub fn sample(&self, index: u64) -> ComplexMatrix {
        let mut rng = CounterRng::for_purpose(self.seed, Purpose::Matrix, index);
        let n = self.n;
        match self.kind {
            EnsembleKind::GinibreComplex => ginibre(&mut rng, n),
            EnsembleKind::HermitianGaussian => ginibre(&mut rng, n).hermitian_part(),
            EnsembleKind::DiagonalNonNegative => {
                let mut d: Vec<f64> = (0..n).map(|_| rng.gaussian().abs()).collect();
                d.sort_by(|a, b| b.total_cmp(a));
                ComplexMatrix::diag(&d)
            }
            EnsembleKind::LowRankPlusNoise { rank, noise_scale } => {
                let mut left = ComplexMatrix::zeros(n);
                let mut right = ComplexMatrix::zeros(n);
                for i in 0..n {
                    for k in 0..rank {
                        left[(i, k)] = complex_gaussian(&mut rng);
                    }
                }
                for k in 0..rank {
                    for j in 0..n {
                        right[(k, j)] = complex_gaussian(&mut rng);
                    }
                }
                let scale = if rank > 0 { 1.0 / (rank as f64).sqrt() } else { 0.0 };
                let signal = left.matmul(&right).expect("same size").scale(scale);
                let noise = ginibre(&mut rng, n).scale(noise_scale);
                &signal + &noise
            }
        }
    }
}

fn complex_gaussian(rng: &mut CounterRng) -> Complex64 {
    let re = rng.gaussian();
    let im = rng.gaussian();
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn ginibre(rng: &mut CounterRng, n: usize) -> ComplexMatrix {
    let entries = (0..n * n).map(|_| complex_gaussian(rng)).collect();
    ComplexMatrix::new(n, entries).expect("Gaussian entries are finite")
}

/// Haar-distributed unitary from the QR factorization of a Ginibre sample,
/// with the phases of R's diagonal absorbed.
pub fn haar_unitary(rng: &mut CounterRng, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n);
    let mut q: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..n {
        for k in 0..j {
            let d: Complex64 = q[k].iter().zip(&q[j]).map(|(a, b)| a.conj() * b).sum();
            let (head, tail) = q.split_at_mut(j);
            for (x, y) in tail[0].iter_mut().zip(&head[k]) {
                *x -= d * y;
            }
        }
        let nrm = q[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut q[j] {
            *x /= nrm;
        }
    }
    let mut out = ComplexMatrix::zeros(n);
    for (j, col) in q.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            out[(i, j)] = *z;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{hermitian_eigenvalues, singular_values};

    #[test]
    fn samples_are_deterministic() {
        let kinds = [
            EnsembleKind::GinibreComplex,
            EnsembleKind::HermitianGaussian,
            EnsembleKind::DiagonalNonNegative,
            EnsembleKind::LowRankPlusNoise { rank: 2, noise_scale: 0.1 },
        ];
        for kind in kinds {
            let e = Ensemble::new(kind, 4, 42).unwrap();
            assert_eq!(e.sample(3), e.sample(3));
            assert_ne!(e.sample(3), e.sample(4));
        }
    }

    #[test]
    fn hermitian_sample_is_exactly_hermitian() {
        let e = Ensemble::new(EnsembleKind::HermitianGaussian, 5, 1).unwrap();
        for i in 0..20 {
            let h = e.sample(i);
            assert_eq!(h.hermitian_deviation(), 0.0);
            assert!(hermitian_eigenvalues(&h).is_ok());
        }
    }

    #[test]
    fn rank_one_without_noise() {
        let e = Ensemble::new(EnsembleKind::LowRankPlusNoise { rank: 1, noise_scale: 0.0 }, 3, 5).unwrap();
        for i in 0..20 {
            let s = singular_values(&e.sample(i)).unwrap();
            assert!(s.at(1) > 1e-3);
            assert!(s.at(2) < 1e-10 && s.at(3) < 1e-10, "{:?}", s.values());
        }
    }

    #[test]
    fn diagonal_sample_is_sorted_non_negative() {
        let e = Ensemble::new(EnsembleKind::DiagonalNonNegative, 6, 2).unwrap();
        let d = e.sample(0);
        let diag: Vec<f64> = (0..6).map(|i| d[(i, i)].re).collect();
        assert!(diag.windows(2).all(|w| w[0] >= w[1]));
        assert!(diag.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Ensemble::new(EnsembleKind::GinibreComplex, 0, 0).is_err());
        assert!(Ensemble::new(EnsembleKind::LowRankPlusNoise { rank: 4, noise_scale: 0.0 }, 3, 0).is_err());
        assert!(Ensemble::new(EnsembleKind::LowRankPlusNoise { rank: 1, noise_scale: -1.0 }, 3, 0).is_err());
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = CounterRng::new(8, 8);
        let u = haar_unitary(&mut rng, 5);
        let uu = u.adjoint().matmul(&u).unwrap();
        assert!((&uu - &ComplexMatrix::identity(5)).max_abs() < 1e-13);
    }
}
