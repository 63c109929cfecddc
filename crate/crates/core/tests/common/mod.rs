//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use svineq::ComplexMatrix;

/// Eigenvalues of a Hermitian matrix of size 1..=3 from the roots of its
/// characteristic polynomial, descending.
pub fn char_poly_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.n();
    let a = |i: usize, j: usize| m[(i, j)];
    match n {
        1 => vec![a(0, 0).re],
        2 => {
            // l^2 - t l + d with t = trace, d = det.
            let t = (a(0, 0) + a(1, 1)).re;
            let d = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)).re;
            let half = t / 2.0;
            let r = (half * half - d).max(0.0).sqrt();
            vec![half + r, half - r]
        }
        3 => {
            // l^3 - c2 l^2 + c1 l - c0.
            let c2 = (a(0, 0) + a(1, 1) + a(2, 2)).re;
            let minor = |i: usize, j: usize| (a(i, i) * a(j, j) - a(i, j) * a(j, i)).re;
            let c1 = minor(0, 1) + minor(0, 2) + minor(1, 2);
            let det: Complex64 = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
                - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
            let c0 = det.re;
            // l = x + c2 / 3 gives x^3 + p x + q.
            let s = c2 / 3.0;
            let p = c1 - c2 * c2 / 3.0;
            let q = -2.0 * c2.powi(3) / 27.0 + c2 * c1 / 3.0 - c0;
            if p >= 0.0 {
                return vec![s, s, s];
            }
            let r = 2.0 * (-p / 3.0).sqrt();
            let arg = ((3.0 * q / (p * r)).clamp(-1.0, 1.0)).acos() / 3.0;
            let mut v: Vec<f64> = (0..3)
                .map(|k| s + r * (arg - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
                .collect();
            v.sort_by(|x, y| y.total_cmp(x));
            v
        }
        _ => panic!("characteristic polynomial oracle covers n <= 3"),
    }
}

/// Singular values as square roots of the eigenvalues of `A* A`.
pub fn char_poly_singular_values(x: &ComplexMatrix) -> Vec<f64> {
    let g = x.adjoint().matmul(x).unwrap();
    char_poly_eigenvalues(&g).into_iter().map(|l| l.max(0.0).sqrt()).collect()
}

/// 2x2 Hermitian eigenvalues `t/2 +- sqrt(t^2/4 - d)`, with the discriminant
/// written as `((a - c)/2)^2 + |b|^2` and the smaller-magnitude root taken
/// from `d / l_big` so neither root suffers cancellation.
pub fn quadratic_eigenvalues(m: &ComplexMatrix) -> [f64; 2] {
    let (a, c, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
    let t = a + c;
    let d = a * c - b.norm_sqr();
    let r = (((a - c) / 2.0).powi(2) + b.norm_sqr()).sqrt();
    let big = t / 2.0 + if t >= 0.0 { r } else { -r };
    let small = if big == 0.0 { 0.0 } else { d / big };
    let mut v = [big, small];
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

/// Number of admissible TF pairs by brute force: all pairs of increasing
/// m-sequences whose gamma positions `i_k + j_k - k` stay in `[1, n]`.
pub fn brute_force_tf_count(n: usize, m: usize) -> usize {
    let seqs = subsets(n, m);
    let mut count = 0;
    for i in &seqs {
        for j in &seqs {
            if (0..m).all(|k| i[k] + j[k] - (k + 1) <= n) {
                count += 1;
            }
        }
    }
    count
}

/// All increasing m-sequences in `[1, n]` via bitmasks.
pub fn subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|mask| mask.count_ones() as usize == m)
        .map(|mask| (0..n).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect())
        .collect()
}

pub fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Relative distance of two sorted spectra, measured against the largest magnitude.
pub fn scaled_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

/// Largest per-value relative distance `|a_i - b_i| / max(|a_i|, |b_i|)`; 0 where both vanish.
pub fn relative_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let m = x.abs().max(y.abs());
            if m == 0.0 {
                0.0
            } else {
                (x - y).abs() / m
            }
        })
        .fold(0.0, f64::max)
}
