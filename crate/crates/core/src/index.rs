//! Strictly increasing index sequences and the index sets built from them.
//!
//! All indices are one-based, matching the way spectra are indexed
//! (`sigma_1 >= sigma_2 >= ...`).

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `1 <= i_1 < i_2 < ... < i_m <= n`. The empty sequence is allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "IndexSeqJson")]
pub struct IndexSeq {
    n: usize,
    indices: Vec<usize>,
}

#[derive(Deserialize)]
struct IndexSeqJson {
    n: usize,
    indices: Vec<usize>,
}

impl TryFrom<IndexSeqJson> for IndexSeq {
    type Error = Error;

    fn try_from(raw: IndexSeqJson) -> Result<Self> {
        IndexSeq::new(raw.n, raw.indices)
    }
}

impl IndexSeq {
    pub fn new(n: usize, indices: Vec<usize>) -> Result<Self> {
        if let Some(&first) = indices.first() {
            if first < 1 {
                return Err(Error::InvalidIndex("indices are one-based".into()));
            }
        }
        if let Some(&last) = indices.last() {
            if last > n {
                return Err(Error::InvalidIndex(format!("index {last} exceeds n = {n}")));
            }
        }
        if let Some(p) = indices.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidIndex(format!(
                "not strictly increasing at position {}",
                p + 2
            )));
        }
        Ok(IndexSeq { n, indices })
    }

    /// `(1, 2, ..., m)`.
    pub fn prefix(n: usize, m: usize) -> Result<Self> {
        Self::new(n, (1..=m).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// One-based access: `i_k`.
    #[inline]
    pub fn at(&self, k: usize) -> usize {
        self.indices[k - 1]
    }

    /// Drops the first `count` indices.
    pub fn skip_front(&self, count: usize) -> IndexSeq {
        IndexSeq {
            n: self.n,
            indices: self.indices[count.min(self.m())..].to_vec(),
        }
    }
}

/// Every strictly increasing sequence of length `m` in `[1, n]`, lexicographic.
pub fn enumerate_index_seqs(n: usize, m: usize) -> impl Iterator<Item = IndexSeq> {
    (1..=n)
        .combinations(m)
        .map(move |indices| IndexSeq { n, indices })
}

/// A pair of equal-length sequences with `i_m + j_m <= n + m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TfPairJson")]
pub struct TfPair {
    i_seq: IndexSeq,
    j_seq: IndexSeq,
}

#[derive(Deserialize)]
struct TfPairJson {
    i_seq: IndexSeq,
    j_seq: IndexSeq,
}

impl TryFrom<TfPairJson> for TfPair {
    type Error = Error;

    fn try_from(raw: TfPairJson) -> Result<Self> {
        TfPair::new(raw.i_seq, raw.j_seq)
    }
}

impl TfPair {
    pub fn new(i_seq: IndexSeq, j_seq: IndexSeq) -> Result<Self> {
        if i_seq.n != j_seq.n || i_seq.m() != j_seq.m() {
            return Err(Error::DimMismatch(format!(
                "TF sequences differ in shape: (n={}, m={}) vs (n={}, m={})",
                i_seq.n,
                i_seq.m(),
                j_seq.n,
                j_seq.m()
            )));
        }
        let pair = TfPair { i_seq, j_seq };
        if !pair.is_admissible() {
            return Err(Error::TfViolation(Box::new(pair)));
        }
        Ok(pair)
    }

    pub fn from_slices(n: usize, i: &[usize], j: &[usize]) -> Result<Self> {
        Self::new(IndexSeq::new(n, i.to_vec())?, IndexSeq::new(n, j.to_vec())?)
    }

    fn is_admissible(&self) -> bool {
        match (self.i_seq.indices.last(), self.j_seq.indices.last()) {
            (Some(&i), Some(&j)) => i + j <= self.n() + self.m(),
            _ => true,
        }
    }

    pub fn n(&self) -> usize {
        self.i_seq.n
    }

    pub fn m(&self) -> usize {
        self.i_seq.m()
    }

    pub fn i(&self) -> &IndexSeq {
        &self.i_seq
    }

    pub fn j(&self) -> &IndexSeq {
        &self.j_seq
    }

    /// `i_k + j_k - k` for `k = 1..m`: the gamma positions of the inequality.
    pub fn gamma_positions(&self) -> Vec<usize> {
        (1..=self.m())
            .map(|k| self.i_seq.at(k) + self.j_seq.at(k) - k)
            .collect()
    }
}

/// Every admissible pair for `(n, m)`, lexicographic in `(i, j)`.
pub fn enumerate_tf_pairs(n: usize, m: usize) -> Result<impl Iterator<Item = TfPair>> {
    if m < 1 || m > n {
        return Err(Error::InvalidDims { n, m });
    }
    let seqs: Vec<IndexSeq> = enumerate_index_seqs(n, m).collect();
    let js = seqs.clone();
    Ok(seqs.into_iter().flat_map(move |i_seq| {
        let i_last = i_seq.indices[m - 1];
        js.clone()
            .into_iter()
            .filter(move |j| i_last + j.indices[m - 1] <= n + m)
            .map(move |j_seq| TfPair {
                i_seq: i_seq.clone(),
                j_seq,
            })
    }))
}

/// Which side of the split an element of `I` belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    C,
    A,
}

/// A split `I = I_C ∪ I_A` together with the window parameter `b`.
///
/// JSON: `{"n", "indices", "b", "flags": ["C"|"A", ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PartitionJson", into = "PartitionJson")]
pub struct IndexPartition {
    seq: IndexSeq,
    b: usize,
    flags: Vec<Side>,
}

#[derive(Serialize, Deserialize)]
struct PartitionJson {
    n: usize,
    indices: Vec<usize>,
    b: usize,
    flags: Vec<Side>,
}

impl TryFrom<PartitionJson> for IndexPartition {
    type Error = Error;

    fn try_from(raw: PartitionJson) -> Result<Self> {
        IndexPartition::new(IndexSeq::new(raw.n, raw.indices)?, raw.b, raw.flags)
    }
}

impl From<IndexPartition> for PartitionJson {
    fn from(p: IndexPartition) -> Self {
        PartitionJson {
            n: p.seq.n,
            indices: p.seq.indices,
            b: p.b,
            flags: p.flags,
        }
    }
}

impl IndexPartition {
    pub fn new(seq: IndexSeq, b: usize, flags: Vec<Side>) -> Result<Self> {
        if flags.len() != seq.m() {
            return Err(Error::InvalidIndex(format!(
                "{} flags for {} indices",
                flags.len(),
                seq.m()
            )));
        }
        if b < 1 || b > seq.m() + 1 {
            return Err(Error::InvalidIndex(format!(
                "b = {b} outside [1, {}]",
                seq.m() + 1
            )));
        }
        Ok(IndexPartition { seq, b, flags })
    }

    pub fn seq(&self) -> &IndexSeq {
        &self.seq
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn m(&self) -> usize {
        self.seq.m()
    }

    pub fn flags(&self) -> &[Side] {
        &self.flags
    }

    /// Flag of `i_k` (one-based `k`).
    pub fn side(&self, k: usize) -> Side {
        self.flags[k - 1]
    }

    fn select(&self, positions: std::ops::RangeInclusive<usize>, side: Option<Side>) -> Vec<usize> {
        positions
            .filter(|&k| side.is_none_or(|s| self.side(k) == s))
            .map(|k| self.seq.at(k))
            .collect()
    }

    fn all(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.m()
    }

    /// Positions `b..=m` (the `I_L` window).
    fn l_window(&self) -> std::ops::RangeInclusive<usize> {
        self.b..=self.m()
    }

    /// Positions `1..=b-1`.
    fn lbar_window(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.b - 1
    }

    /// Positions `1..=m-b+1`.
    fn r_window(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.m() + 1 - self.b
    }

    /// Positions `m-b+2..=m`.
    fn rbar_window(&self) -> std::ops::RangeInclusive<usize> {
        self.m() + 2 - self.b..=self.m()
    }

    pub fn i_c(&self) -> Vec<usize> {
        self.select(self.all(), Some(Side::C))
    }
    pub fn i_a(&self) -> Vec<usize> {
        self.select(self.all(), Some(Side::A))
    }
    pub fn i_l(&self) -> Vec<usize> {
        self.select(self.l_window(), None)
    }
    pub fn i_lbar(&self) -> Vec<usize> {
        self.select(self.lbar_window(), None)
    }
    pub fn i_r(&self) -> Vec<usize> {
        self.select(self.r_window(), None)
    }
    pub fn i_rbar(&self) -> Vec<usize> {
        self.select(self.rbar_window(), None)
    }
    pub fn i_cl(&self) -> Vec<usize> {
        self.select(self.l_window(), Some(Side::C))
    }
    pub fn i_al(&self) -> Vec<usize> {
        self.select(self.l_window(), Some(Side::A))
    }
    pub fn i_cr(&self) -> Vec<usize> {
        self.select(self.r_window(), Some(Side::C))
    }
    pub fn i_ar(&self) -> Vec<usize> {
        self.select(self.r_window(), Some(Side::A))
    }
    pub fn i_clbar(&self) -> Vec<usize> {
        self.select(self.lbar_window(), Some(Side::C))
    }
    pub fn i_albar(&self) -> Vec<usize> {
        self.select(self.lbar_window(), Some(Side::A))
    }
    pub fn i_crbar(&self) -> Vec<usize> {
        self.select(self.rbar_window(), Some(Side::C))
    }
    pub fn i_arbar(&self) -> Vec<usize> {
        self.select(self.rbar_window(), Some(Side::A))
    }

    /// `J = {b, ..., m}`: positions into the beta spectrum, not elements of `I`.
    pub fn j_set(&self) -> Vec<usize> {
        self.l_window().collect()
    }
}

/// Every `(flags, b)` configuration over `seq`: `2^m * (m + 1)` partitions.
pub fn enumerate_partitions(seq: &IndexSeq) -> impl Iterator<Item = IndexPartition> + '_ {
    let m = seq.m();
    (1..=m + 1).flat_map(move |b| {
        (0u64..1 << m).map(move |mask| {
            let flags = (0..m)
                .map(|k| if mask >> k & 1 == 1 { Side::A } else { Side::C })
                .collect();
            IndexPartition {
                seq: seq.clone(),
                b,
                flags,
            }
        })
    })
}

/// Which of the four membership patterns a pair `(t_k, s_k)` falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairClass {
    /// `s_k ∈ I_CL`, `t_k ∈ I_AR`.
    K1,
    /// `s_k ∈ I_AL`, `t_k ∈ I_CR`.
    K2,
    /// `s_k ∈ I_CL`, `t_k ∈ I_CR`.
    K3,
    /// `s_k ∈ I_AL`, `t_k ∈ I_AR`.
    K4,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairClassification {
    /// `(t_k, s_k) = (i_k, i_{k+b-1})` for `k = 1..=m-b+1`.
    pub pairs: Vec<(usize, usize)>,
    pub classes: Vec<PairClass>,
}

impl PairClassification {
    /// One-based `k` values in the given class.
    pub fn members(&self, class: PairClass) -> Vec<usize> {
        self.classes
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == class)
            .map(|(k, _)| k + 1)
            .collect()
    }

    /// `r = |K3| + |K4|`.
    pub fn r(&self) -> usize {
        self.classes
            .iter()
            .filter(|c| matches!(c, PairClass::K3 | PairClass::K4))
            .count()
    }

    pub fn t(&self, k: usize) -> usize {
        self.pairs[k - 1].0
    }

    pub fn s(&self, k: usize) -> usize {
        self.pairs[k - 1].1
    }

    pub fn t_of(&self, ks: &[usize]) -> Vec<usize> {
        ks.iter().map(|&k| self.t(k)).collect()
    }

    pub fn s_of(&self, ks: &[usize]) -> Vec<usize> {
        ks.iter().map(|&k| self.s(k)).collect()
    }
}

pub fn classify_pairs(p: &IndexPartition) -> PairClassification {
    let count = p.m() + 1 - p.b();
    let mut pairs = Vec::with_capacity(count);
    let mut classes = Vec::with_capacity(count);
    for k in 1..=count {
        let t_pos = k;
        let s_pos = k + p.b() - 1;
        pairs.push((p.seq().at(t_pos), p.seq().at(s_pos)));
        classes.push(match (p.side(s_pos), p.side(t_pos)) {
            (Side::C, Side::A) => PairClass::K1,
            (Side::A, Side::C) => PairClass::K2,
            (Side::C, Side::C) => PairClass::K3,
            (Side::A, Side::A) => PairClass::K4,
        });
    }
    PairClassification { pairs, classes }
}

/// The TF pair on ambient dimension `2n` used to bound the `K3 ∪ K4` pairs:
/// `i` is `{t_k : k ∈ K3} ∪ {2n + 1 - s_k : k ∈ K4}` sorted increasing, and
/// `j_l = l + b - 1`.
pub fn tfw_index_build(c: &PairClassification, n: usize, b: usize) -> Result<TfPair> {
    let mut i: Vec<usize> = c
        .t_of(&c.members(PairClass::K3))
        .into_iter()
        .chain(
            c.s_of(&c.members(PairClass::K4))
                .into_iter()
                .map(|s| 2 * n + 1 - s),
        )
        .collect();
    i.sort_unstable();
    let r = i.len();
    let j: Vec<usize> = (1..=r).map(|l| l + b - 1).collect();
    let i_seq = IndexSeq::new(2 * n, i)?;
    let j_seq = IndexSeq::new(2 * n, j)?;
    TfPair::new(i_seq, j_seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Side::{A, C};

    #[test]
    fn tf_pair_enumeration_examples() {
        let pairs: Vec<_> = enumerate_tf_pairs(2, 1).unwrap().collect();
        let as_tuples: Vec<_> = pairs.iter().map(|p| (p.i().at(1), p.j().at(1))).collect();
        assert_eq!(as_tuples, vec![(1, 1), (1, 2), (2, 1)]);
        assert_eq!(enumerate_tf_pairs(3, 1).unwrap().count(), 6);
        for n in 1..=5 {
            let all: Vec<_> = enumerate_tf_pairs(n, n).unwrap().collect();
            assert_eq!(all.len(), 1);
            assert_eq!(all[0].i().indices(), (1..=n).collect::<Vec<_>>());
        }
        assert!(matches!(enumerate_tf_pairs(2, 3), Err(Error::InvalidDims { .. })));
        assert!(matches!(enumerate_tf_pairs(2, 0), Err(Error::InvalidDims { .. })));
    }

    #[test]
    fn tf_pair_rejects_inadmissible() {
        assert!(TfPair::from_slices(2, &[2], &[2]).is_err());
        assert!(TfPair::from_slices(3, &[1, 3], &[2, 3]).is_err());
        assert!(TfPair::from_slices(3, &[1, 3], &[1, 2]).is_ok());
    }

    #[test]
    fn index_seq_validation() {
        assert!(IndexSeq::new(3, vec![1, 1]).is_err());
        assert!(IndexSeq::new(3, vec![0, 1]).is_err());
        assert!(IndexSeq::new(3, vec![2, 4]).is_err());
        assert!(IndexSeq::new(3, vec![]).is_ok());
    }

    #[test]
    fn derived_set_sizes() {
        let seq = IndexSeq::new(9, vec![2, 3, 5, 7, 9]).unwrap();
        let p = IndexPartition::new(seq, 3, vec![C, A, C, A, C]).unwrap();
        assert_eq!(p.i_r(), vec![2, 3, 5]);
        assert_eq!(p.i_rbar(), vec![7, 9]);
        assert_eq!(p.i_l(), vec![5, 7, 9]);
        assert_eq!(p.i_lbar(), vec![2, 3]);
        assert_eq!(p.j_set(), vec![3, 4, 5]);
        assert_eq!(p.i_cl(), vec![5, 9]);
        assert_eq!(p.i_al(), vec![7]);
        assert_eq!(p.i_cr(), vec![2, 5]);
        assert_eq!(p.i_ar(), vec![3]);
        assert_eq!(p.i_clbar(), vec![2]);
        assert_eq!(p.i_albar(), vec![3]);
        assert_eq!(p.i_crbar(), vec![9]);
        assert_eq!(p.i_arbar(), vec![7]);
    }

    #[test]
    fn degenerate_b() {
        let seq = IndexSeq::new(3, vec![1, 3]).unwrap();
        let p = IndexPartition::new(seq.clone(), 3, vec![C, A]).unwrap();
        assert!(p.i_l().is_empty() && p.i_r().is_empty() && p.j_set().is_empty());
        assert_eq!(p.i_lbar(), vec![1, 3]);
        assert_eq!(p.i_rbar(), vec![1, 3]);
        assert!(IndexPartition::new(seq.clone(), 4, vec![C, A]).is_err());
        assert!(IndexPartition::new(seq, 0, vec![C, A]).is_err());
    }

    #[test]
    fn classify_examples() {
        let p = IndexPartition::new(IndexSeq::new(2, vec![1, 2]).unwrap(), 1, vec![C, C]).unwrap();
        let c = classify_pairs(&p);
        assert_eq!(c.pairs, vec![(1, 1), (2, 2)]);
        assert_eq!(c.members(PairClass::K3), vec![1, 2]);
        assert_eq!(c.r(), 2);

        let p = IndexPartition::new(IndexSeq::new(3, vec![1, 2, 3]).unwrap(), 2, vec![A, C, A]).unwrap();
        let c = classify_pairs(&p);
        assert_eq!(c.pairs, vec![(1, 2), (2, 3)]);
        assert_eq!(c.classes, vec![PairClass::K1, PairClass::K2]);
        assert_eq!(c.r(), 0);

        let p = IndexPartition::new(IndexSeq::new(9, vec![2, 5, 9]).unwrap(), 3, vec![C, A, C]).unwrap();
        let c = classify_pairs(&p);
        assert_eq!(c.pairs, vec![(2, 9)]);
        assert!(c.s(1) - c.t(1) >= 2);
    }

    #[test]
    fn tfw_examples() {
        let c = PairClassification {
            pairs: vec![(1, 1)],
            classes: vec![PairClass::K3],
        };
        let pair = tfw_index_build(&c, 2, 1).unwrap();
        assert_eq!((pair.i().indices(), pair.j().indices()), (&[1][..], &[1][..]));
        assert_eq!(pair.n(), 4);

        let c = PairClassification {
            pairs: vec![(1, 2)],
            classes: vec![PairClass::K4],
        };
        let pair = tfw_index_build(&c, 2, 1).unwrap();
        assert_eq!(pair.i().indices(), &[3]);
        assert_eq!(pair.j().indices(), &[1]);

        let c = PairClassification {
            pairs: vec![(1, 2), (3, 4)],
            classes: vec![PairClass::K3, PairClass::K4],
        };
        let pair = tfw_index_build(&c, 4, 2).unwrap();
        assert_eq!(pair.i().indices(), &[1, 5]);
        assert_eq!(pair.j().indices(), &[2, 3]);
    }

    #[test]
    fn partition_json() {
        let p = IndexPartition::new(IndexSeq::new(4, vec![1, 3]).unwrap(), 2, vec![C, A]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"n":4,"indices":[1,3],"b":2,"flags":["C","A"]}"#);
        assert_eq!(serde_json::from_str::<IndexPartition>(&s).unwrap(), p);
        assert!(serde_json::from_str::<IndexPartition>(r#"{"n":4,"indices":[1,3],"b":4,"flags":["C","A"]}"#).is_err());
    }

    #[test]
    fn partition_count() {
        let seq = IndexSeq::new(5, vec![1, 2, 4]).unwrap();
        assert_eq!(enumerate_partitions(&seq).count(), 8 * 4);
    }
}
