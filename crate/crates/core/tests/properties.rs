use proptest::prelude::*;
use svineq::ensemble::{haar_unitary, Ensemble, EnsembleKind};
use svineq::index::enumerate_partitions;
use svineq::rng::{CounterRng, Purpose};
use svineq::sampling::{sample_index_seq, sample_pwl, sample_tf_pair};
use svineq::{
    hook_decompose, singular_values, Checker, ComplexMatrix, ConcaveFn, IndexPartition, IndexSeq, Side, TfPair,
};

fn kind(sel: u8) -> EnsembleKind {
    match sel % 4 {
        0 => EnsembleKind::GinibreComplex,
        1 => EnsembleKind::HermitianGaussian,
        2 => EnsembleKind::DiagonalNonNegative,
        _ => EnsembleKind::LowRankPlusNoise {
            rank: 1,
            noise_scale: 0.05,
        },
    }
}

fn pair_of(n: usize, seed: u64, sel: u8) -> (ComplexMatrix, ComplexMatrix) {
    let e = Ensemble::new(kind(sel), n, seed).unwrap();
    (e.sample(0), e.sample(1))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn frobenius_energy_is_conserved(n in 1usize..=8, seed: u64, sel: u8) {
        let (x, _) = pair_of(n, seed, sel);
        let s = singular_values(&x).unwrap();
        let energy: f64 = s.values().iter().map(|v| v * v).sum();
        prop_assert!(rel(energy, x.frobenius_norm_sq()) < 1e-12);
    }

    #[test]
    fn mirsky_is_unitarily_invariant(n in 1usize..=6, seed: u64, sel: u8, p in 0.1f64..=1.0) {
        let (x, y) = pair_of(n, seed, sel);
        let mut rng = CounterRng::for_purpose(seed, Purpose::Matrix, 99);
        let u = haar_unitary(&mut rng, n);
        let v = haar_unitary(&mut rng, n);
        let rot = |m: &ComplexMatrix| u.matmul(m).unwrap().matmul(&v).unwrap();
        let idx = sample_index_seq(&mut rng, n);
        let chk = Checker::default();
        let f = ConcaveFn::power(p);
        let a = chk.spectral_deviation_bound(&x, &y, &f, &idx).unwrap();
        let b = chk.spectral_deviation_bound(&rot(&x), &rot(&y), &f, &idx).unwrap();
        let scale = 1.0 + a.bound + a.actual;
        prop_assert!((a.bound - b.bound).abs() <= 1e-9 * scale);
        prop_assert!((a.actual - b.actual).abs() <= 1e-9 * scale);
    }

    #[test]
    fn pwl_scaling_is_covariant(n in 1usize..=6, seed: u64, c in 0.01f64..100.0) {
        let (x, y) = pair_of(n, seed, 0);
        let mut rng = CounterRng::for_purpose(seed, Purpose::Function, 0);
        let f = sample_pwl(&mut rng, 5, 2.0);
        let g = f.scaled(c).unwrap();
        let chk = Checker::default();
        let idx = sample_index_seq(&mut rng, n);
        let a = chk.mirsky_f_gap(&x, &y, &idx, &f).unwrap();
        let b = chk.mirsky_f_gap(&x, &y, &idx, &g).unwrap();
        prop_assert!(rel(c * a.lhs, b.lhs) < 1e-12 && rel(c * a.rhs, b.rhs) < 1e-12);
        prop_assert!((c * a.slack - b.slack).abs() <= 1e-12 * (1.0 + b.lhs.abs() + b.rhs.abs()));

        let pair = sample_tf_pair(&mut rng, n);
        let sa = singular_values(&x).unwrap();
        let sb = singular_values(&y).unwrap();
        let sg = singular_values(&(&x + &y)).unwrap();
        let a = chk.f_tf_gap(&sa, &sb, &sg, &pair, &f).unwrap();
        let b = chk.f_tf_gap(&sa, &sb, &sg, &pair, &g).unwrap();
        prop_assert!(rel(c * a.lhs, b.lhs) < 1e-12 && rel(c * a.rhs, b.rhs) < 1e-12);
    }

    #[test]
    fn hooks_suffice(n in 1usize..=6, seed: u64, sel: u8) {
        let (x, y) = pair_of(n, seed, sel);
        let mut rng = CounterRng::for_purpose(seed, Purpose::Function, 1);
        let f = sample_pwl(&mut rng, 4, 2.0);
        let idx = sample_index_seq(&mut rng, n);
        let chk = Checker::default();
        let whole = chk.mirsky_f_gap(&x, &y, &idx, &f).unwrap();
        let measure = hook_decompose(&f).unwrap();
        let mut combined = 0.0;
        for atom in &measure.atoms {
            let g = chk.mirsky_f_gap(&x, &y, &idx, &ConcaveFn::hook(atom.t)).unwrap();
            prop_assert!(g.holds);
            combined += atom.weight * g.slack;
        }
        let tail = chk.mirsky_f_gap(&x, &y, &idx, &ConcaveFn::identity()).unwrap();
        prop_assert!(tail.holds);
        combined += measure.linear_tail * tail.slack;
        // |sum w_k d_k| <= sum w_k |d_k| makes the slack of f at least the combination.
        prop_assert!(whole.slack >= combined - 1e-9 * whole.scale);
        prop_assert!(whole.holds);
    }

    #[test]
    fn bound_grows_with_m(n in 1usize..=8, seed: u64, sel: u8, p in 0.1f64..=1.0) {
        let (x, y) = pair_of(n, seed, sel);
        let chk = Checker::default();
        let f = ConcaveFn::power(p);
        let mut prev = 0.0;
        for m in 1..=n {
            let r = chk.spectral_deviation_bound(&x, &y, &f, &IndexSeq::prefix(n, m).unwrap()).unwrap();
            prop_assert!(r.bound >= prev);
            prop_assert!(r.holds);
            prev = r.bound;
        }
    }

    #[test]
    fn identity_collapses_bitwise(n in 1usize..=8, seed: u64, sel: u8) {
        let (x, y) = pair_of(n, seed, sel);
        let mut rng = CounterRng::for_purpose(seed, Purpose::Indices, 0);
        let chk = Checker::default();
        let sa = singular_values(&x).unwrap();
        let sb = singular_values(&y).unwrap();
        let sg = singular_values(&(&x + &y)).unwrap();
        let pair = sample_tf_pair(&mut rng, n);
        let f = chk.f_tf_gap(&sa, &sb, &sg, &pair, &ConcaveFn::identity()).unwrap();
        let t = chk.tf_gap(&sa, &sb, &sg, &pair).unwrap();
        prop_assert_eq!((f.lhs.to_bits(), f.rhs.to_bits()), (t.lhs.to_bits(), t.rhs.to_bits()));

        // Classic Mirsky computed directly.
        let idx = sample_index_seq(&mut rng, n);
        let sd = singular_values(&(&x - &y)).unwrap();
        let lhs: f64 = idx.indices().iter().map(|&i| (sa.at(i) - sb.at(i)).abs()).sum();
        let rhs: f64 = (1..=idx.m()).map(|k| sd.at(k)).sum();
        let g = chk.mirsky_f_gap(&x, &y, &idx, &ConcaveFn::identity()).unwrap();
        prop_assert_eq!((g.lhs.to_bits(), g.rhs.to_bits()), (lhs.to_bits(), rhs.to_bits()));
    }

    #[test]
    fn largest_singular_value_is_subadditive(n in 1usize..=8, seed: u64, sel: u8) {
        let (a, b) = pair_of(n, seed, sel);
        let r = Checker::default()
            .tf_gap(
                &singular_values(&a).unwrap(),
                &singular_values(&b).unwrap(),
                &singular_values(&(&a + &b)).unwrap(),
                &TfPair::from_slices(n, &[1], &[1]).unwrap(),
            )
            .unwrap();
        prop_assert!(r.holds);
    }

    #[test]
    fn exchange_reduces_to_tf(n in 1usize..=6, seed: u64, sel: u8) {
        let (a, b) = pair_of(n, seed, sel);
        let mut rng = CounterRng::for_purpose(seed, Purpose::Indices, 1);
        let seq = sample_index_seq(&mut rng, n);
        let m = seq.m();
        let chk = Checker::default();
        let p = IndexPartition::new(seq.clone(), 1, vec![Side::C; m]).unwrap();
        let t3 = chk.theorem3_gap_matrices(&a, &b, &p).unwrap();
        let pair = TfPair::new(seq, IndexSeq::prefix(n, m).unwrap()).unwrap();
        let s = svineq::ineq::TripleSpectra::of_sum(&a, &b).unwrap();
        let tf = chk.tf_gap(&s.alpha, &s.beta, &s.gamma, &pair).unwrap();
        prop_assert_eq!((t3.lhs.to_bits(), t3.rhs.to_bits()), (tf.lhs.to_bits(), tf.rhs.to_bits()));
    }

    #[test]
    fn every_partition_holds(n in 1usize..=4, seed: u64, sel: u8) {
        let (a, b) = pair_of(n, seed, sel);
        let chk = Checker::default();
        let mut rng = CounterRng::for_purpose(seed, Purpose::Indices, 2);
        let seq = sample_index_seq(&mut rng, n);
        for p in enumerate_partitions(&seq) {
            prop_assert!(chk.theorem3_gap_matrices(&a, &b, &p).unwrap().holds);
        }
    }

    #[test]
    fn hermitian_trace_identity(n in 1usize..=6, seed: u64) {
        let e = Ensemble::new(EnsembleKind::HermitianGaussian, n, seed).unwrap();
        let (a, b) = (e.sample(0), e.sample(1));
        let ea = svineq::hermitian_eigenvalues(&a).unwrap();
        let eb = svineq::hermitian_eigenvalues(&b).unwrap();
        let eg = svineq::hermitian_eigenvalues(&(&a + &b)).unwrap();
        let full = IndexSeq::prefix(n, n).unwrap();
        let r = Checker::default().tf_gap(&ea, &eb, &eg, &TfPair::new(full.clone(), full).unwrap()).unwrap();
        prop_assert!(r.slack.abs() <= 1e-12 * r.scale);
    }
}
