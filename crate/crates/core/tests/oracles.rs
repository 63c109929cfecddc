mod common;

use approx::assert_relative_eq;
use common::*;
use svineq::ensemble::{Ensemble, EnsembleKind};
use svineq::index::{enumerate_index_seqs, enumerate_partitions, enumerate_tf_pairs};
use svineq::rng::CounterRng;
use svineq::spectrum::wielandt_spectrum;
use svineq::{hermitian_eigenvalues, singular_values, wielandt_embed, ComplexMatrix};

fn ginibre(n: usize, seed: u64, k: u64) -> ComplexMatrix {
    Ensemble::new(EnsembleKind::GinibreComplex, n, seed).unwrap().sample(k)
}

#[test]
fn singular_values_match_characteristic_polynomial() {
    for n in 1..=3 {
        for k in 0..200 {
            let x = ginibre(n, 11, k);
            let got = singular_values(&x).unwrap();
            let want = char_poly_singular_values(&x);
            assert!(scaled_distance(got.values(), &want) < 1e-10, "{:?} vs {want:?}", got.values());
        }
    }
}

#[test]
fn hermitian_2x2_matches_quadratic_formula() {
    let e = Ensemble::new(EnsembleKind::HermitianGaussian, 2, 4).unwrap();
    for k in 0..500 {
        let h = e.sample(k);
        let got = hermitian_eigenvalues(&h).unwrap();
        let want = quadratic_eigenvalues(&h);
        assert!(scaled_distance(got.values(), &want) < 1e-12);
    }
}

#[test]
fn hermitian_3x3_matches_cubic() {
    let e = Ensemble::new(EnsembleKind::HermitianGaussian, 3, 9).unwrap();
    for k in 0..300 {
        let h = e.sample(k);
        let got = hermitian_eigenvalues(&h).unwrap();
        assert!(scaled_distance(got.values(), &char_poly_eigenvalues(&h)) < 1e-10);
    }
}

#[test]
fn wielandt_embedding_spectrum() {
    for n in 1..=8 {
        for k in 0..20 {
            let x = ginibre(n, 2, k);
            let s = singular_values(&x).unwrap();
            let w = hermitian_eigenvalues(&wielandt_embed(&x)).unwrap();
            let want = wielandt_spectrum(&s);
            assert!(scaled_distance(w.values(), want.values()) < 1e-10);
            for i in 1..=n {
                assert_relative_eq!(w.at(2 * n + 1 - i), -s.at(i), epsilon = 1e-10 * (1.0 + s.at(1)));
            }
        }
    }
}

#[test]
fn hand_computed_spectra() {
    // [[1, 1], [0, 1]]: sigma^2 = (3 +- sqrt 5) / 2.
    let x = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
    let s = singular_values(&x).unwrap();
    assert_relative_eq!(s.at(1), ((3.0 + 5f64.sqrt()) / 2.0).sqrt(), max_relative = 1e-14);
    assert_relative_eq!(s.at(2), ((3.0 - 5f64.sqrt()) / 2.0).sqrt(), max_relative = 1e-14);
    // Pauli Y has eigenvalues +-1.
    let y = ComplexMatrix::new(
        2,
        vec![
            num_complex::Complex64::new(0.0, 0.0),
            num_complex::Complex64::new(0.0, -1.0),
            num_complex::Complex64::new(0.0, 1.0),
            num_complex::Complex64::new(0.0, 0.0),
        ],
    )
    .unwrap();
    let e = hermitian_eigenvalues(&y).unwrap();
    assert_relative_eq!(e.at(1), 1.0, epsilon = 1e-15);
    assert_relative_eq!(e.at(2), -1.0, epsilon = 1e-15);
}

#[test]
fn enumeration_counts() {
    for n in 1..=6 {
        let seqs: usize = (1..=n).map(|m| enumerate_index_seqs(n, m).count()).sum();
        assert_eq!(seqs, (1 << n) - 1);
        for m in 1..=n {
            assert_eq!(enumerate_index_seqs(n, m).count(), binomial(n, m));
            assert_eq!(enumerate_tf_pairs(n, m).unwrap().count(), brute_force_tf_count(n, m), "n={n} m={m}");
        }
        let partitions: usize = (1..=n)
            .flat_map(|m| enumerate_index_seqs(n, m))
            .map(|s| enumerate_partitions(&s).count())
            .sum();
        let closed = 3usize.pow(n as u32) + 2 * n * 3usize.pow(n as u32 - 1) - 1;
        let direct: usize = (1..=n).map(|m| binomial(n, m) * (1 << m) * (m + 1)).sum();
        assert_eq!(partitions, closed);
        assert_eq!(partitions, direct);
    }
}

#[test]
fn tf_pairs_for_n2() {
    // m = 1: i_1 + j_1 <= 3 gives (1,1), (1,2), (2,1); m = 2: only ((1,2),(1,2)).
    let m1: Vec<_> = enumerate_tf_pairs(2, 1)
        .unwrap()
        .map(|p| (p.i().at(1), p.j().at(1)))
        .collect();
    assert_eq!(m1, vec![(1, 1), (1, 2), (2, 1)]);
    assert_eq!(enumerate_tf_pairs(2, 2).unwrap().count(), 1);
}

#[test]
fn rng_gaussians_are_standard() {
    let mut rng = CounterRng::new(1, 1);
    let xs: Vec<f64> = (0..200_000).map(|_| rng.gaussian()).collect();
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
    assert!(mean.abs() < 0.01 && (var - 1.0).abs() < 0.02);
}
