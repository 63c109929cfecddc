//! Random index inputs for dimensions too large to enumerate.

use crate::concave::ConcaveFn;
use crate::index::{IndexPartition, IndexSeq, Side, TfPair};
use crate::rng::CounterRng;

pub fn sample_index_seq(rng: &mut CounterRng, n: usize) -> IndexSeq {
    let m = rng.range_inclusive(1, n);
    IndexSeq::new(n, rng.subset(n, m)).expect("subset is strictly increasing")
}

pub fn sample_tf_pair(rng: &mut CounterRng, n: usize) -> TfPair {
    let m = rng.range_inclusive(1, n);
    let i = rng.subset(n, m);
    let j_last_max = (n + m - i[m - 1]).min(n);
    let j_last = rng.range_inclusive(m, j_last_max);
    let mut j = rng.subset(j_last - 1, m - 1);
    j.push(j_last);
    TfPair::from_slices(n, &i, &j).expect("sampled pair is admissible")
}

pub fn sample_partition(rng: &mut CounterRng, n: usize) -> IndexPartition {
    let seq = sample_index_seq(rng, n);
    let m = seq.m();
    let b = rng.range_inclusive(1, m + 1);
    let flags = (0..m).map(|_| if rng.coin() { Side::A } else { Side::C }).collect();
    IndexPartition::new(seq, b, flags).expect("sampled partition is valid")
}

/// Random admissible piecewise-linear function with `1..=max_breakpoints`
/// breakpoints in `(0, x_scale]` and non-increasing slopes in `[0, 2]`;
/// the last slope is zero with probability one half.
pub fn sample_pwl(rng: &mut CounterRng, max_breakpoints: usize, x_scale: f64) -> ConcaveFn {
    let count = rng.range_inclusive(1, max_breakpoints.max(1));
    let mut breakpoints: Vec<f64> = (0..count).map(|_| rng.uniform_in(0.01, 1.0) * x_scale).collect();
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();
    let mut slopes: Vec<f64> = (0..=breakpoints.len()).map(|_| 2.0 * rng.uniform()).collect();
    slopes.sort_by(|a, b| b.total_cmp(a));
    if rng.coin() {
        *slopes.last_mut().expect("at least one slope") = 0.0;
    }
    ConcaveFn::pwl(breakpoints, slopes)
}
