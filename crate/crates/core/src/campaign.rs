//! Deterministic fuzz campaigns over every checker, with a witness store.
//!
//! Instance `k` uses matrices `X = sample(2k)` and `Y = sample(2k + 1)` of
//! its ensemble, its dimension from stream `(Instance, k)`, sampled index
//! inputs from `(Indices, k)` and hook thresholds from `(Threshold, k)`.
//! Instances run in parallel but are merged in index order, so output does
//! not depend on scheduling.

use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::bounds::{truncate_rank, BoundResult};
use crate::concave::ConcaveFn;
use crate::ensemble::{Ensemble, EnsembleKind};
use crate::error::{Error, Result};
use crate::index::{enumerate_index_seqs, enumerate_partitions, enumerate_tf_pairs, IndexPartition, IndexSeq, TfPair};
use crate::ineq::{Checker, TripleSpectra};
use crate::matrix::ComplexMatrix;
use crate::report::{GapReport, TraceReport, DEFAULT_TOL_REL};
use crate::rng::{CounterRng, Purpose};
use crate::sampling::{sample_index_seq, sample_partition, sample_pwl, sample_tf_pair};
use crate::spectrum::{hermitian_eigenvalues, singular_values, Spectrum, SpectrumKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Tf,
    FTf,
    Mirsky,
    Theorem3,
    Traces,
    Bounds,
}

impl CheckKind {
    pub const ALL: [CheckKind; 6] = [
        CheckKind::Tf,
        CheckKind::FTf,
        CheckKind::Mirsky,
        CheckKind::Theorem3,
        CheckKind::Traces,
        CheckKind::Bounds,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Violation,
    NearTight,
}

/// Everything needed to recompute a single evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Replay {
    /// Plain TF on singular values of `a`, `b`, `a + b`, or on eigenvalues of
    /// the same (then `a`, `b` are Hermitian).
    Tf {
        a: ComplexMatrix,
        b: ComplexMatrix,
        spectrum: SpectrumKind,
        pair: TfPair,
    },
    FTf {
        a: ComplexMatrix,
        b: ComplexMatrix,
        pair: TfPair,
        f: ConcaveFn,
    },
    Mirsky {
        x: ComplexMatrix,
        y: ComplexMatrix,
        idx: IndexSeq,
        f: ConcaveFn,
    },
    Theorem3 {
        a: ComplexMatrix,
        b: ComplexMatrix,
        partition: IndexPartition,
    },
    Bound {
        x: ComplexMatrix,
        y: ComplexMatrix,
        idx: IndexSeq,
        f: ConcaveFn,
    },
    TraceTheorem1 {
        x: ComplexMatrix,
        y: ComplexMatrix,
        idx: IndexSeq,
        t: f64,
    },
    /// On singular values of `a`, `b`, `a + b`.
    TraceTheorem2 {
        a: ComplexMatrix,
        b: ComplexMatrix,
        pair: TfPair,
        t: f64,
    },
    TraceTheorem3 {
        a: ComplexMatrix,
        b: ComplexMatrix,
        partition: IndexPartition,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "report", rename_all = "snake_case")]
pub enum Outcome {
    Gap(GapReport),
    Trace(TraceReport),
    Bound(BoundResult),
}

impl Outcome {
    pub fn holds(&self) -> bool {
        match self {
            Outcome::Gap(g) => g.holds,
            Outcome::Trace(t) => t.all_hold,
            Outcome::Bound(b) => b.holds,
        }
    }

    /// `lhs / rhs` of the deciding inequality, when `rhs > 0`.
    pub fn tightness(&self) -> Option<f64> {
        let g = match self {
            Outcome::Gap(g) => g,
            Outcome::Trace(t) => t.final_step(),
            Outcome::Bound(b) => return (b.bound > 0.0).then_some(b.tightness),
        };
        (g.rhs > 0.0).then(|| g.lhs / g.rhs)
    }
}

/// Test hook for the violation path: the right-hand side is negated.
fn corrupt(g: GapReport) -> GapReport {
    GapReport::new(g.name, g.lhs, -g.rhs, g.tol_rel)
}

fn bound_from_gap(g: &GapReport, f: &ConcaveFn, idx: &IndexSeq) -> BoundResult {
    let tightness = if g.rhs > 0.0 {
        g.lhs / g.rhs
    } else if g.lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    BoundResult {
        bound: g.rhs,
        actual: g.lhs,
        tightness,
        holds: g.holds,
        f: f.clone(),
        idx: idx.clone(),
    }
}

impl Replay {
    pub fn check(&self) -> CheckKind {
        match self {
            Replay::Tf { .. } => CheckKind::Tf,
            Replay::FTf { .. } => CheckKind::FTf,
            Replay::Mirsky { .. } => CheckKind::Mirsky,
            Replay::Theorem3 { .. } => CheckKind::Theorem3,
            Replay::Bound { .. } => CheckKind::Bounds,
            Replay::TraceTheorem1 { .. } | Replay::TraceTheorem2 { .. } | Replay::TraceTheorem3 { .. } => {
                CheckKind::Traces
            }
        }
    }

    /// Recomputes the evaluation from the stored inputs alone.
    pub fn evaluate(&self, checker: &Checker, corrupted: bool) -> Result<Outcome> {
        let gap = |g: GapReport| Outcome::Gap(if corrupted { corrupt(g) } else { g });
        Ok(match self {
            Replay::Tf { a, b, spectrum, pair } => {
                let s = match spectrum {
                    SpectrumKind::Singular => TripleSpectra::of_sum(a, b)?,
                    SpectrumKind::HermitianEigen => hermitian_triple(a, b)?,
                };
                gap(checker.tf_gap(&s.alpha, &s.beta, &s.gamma, pair)?)
            }
            Replay::FTf { a, b, pair, f } => {
                let s = TripleSpectra::of_sum(a, b)?;
                gap(checker.f_tf_gap(&s.alpha, &s.beta, &s.gamma, pair, f)?)
            }
            Replay::Mirsky { x, y, idx, f } => gap(checker.mirsky_f_gap(x, y, idx, f)?),
            Replay::Theorem3 { a, b, partition } => gap(checker.theorem3_gap_matrices(a, b, partition)?),
            Replay::Bound { x, y, idx, f } => {
                let mut g = checker.mirsky_f_gap(x, y, idx, f)?;
                if corrupted {
                    g = corrupt(g);
                }
                Outcome::Bound(bound_from_gap(&g, f, idx))
            }
            Replay::TraceTheorem1 { x, y, idx, t } => Outcome::Trace(checker.trace_theorem1(x, y, idx, *t, None)?),
            Replay::TraceTheorem2 { a, b, pair, t } => {
                let s = TripleSpectra::of_sum(a, b)?;
                Outcome::Trace(checker.trace_theorem2(&s.alpha, &s.beta, &s.gamma, pair, *t)?)
            }
            Replay::TraceTheorem3 { a, b, partition } => Outcome::Trace(checker.trace_theorem3(a, b, partition)?),
        })
    }
}

fn hermitian_triple(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<TripleSpectra> {
    Ok(TripleSpectra {
        alpha: hermitian_eigenvalues(a)?,
        beta: hermitian_eigenvalues(b)?,
        gamma: hermitian_eigenvalues(&(a + b))?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub check: CheckKind,
    pub instance: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ensemble: Option<EnsembleKind>,
    pub tol_rel: f64,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub corrupted: bool,
    pub replay: Replay,
    pub outcome: Outcome,
}

impl Witness {
    pub fn replay(&self) -> Result<Outcome> {
        self.replay.evaluate(&Checker::new(self.tol_rel), self.corrupted)
    }

    /// Largest absolute difference between the stored and the replayed
    /// outcome over all numeric fields; infinite if their shapes differ.
    pub fn replay_deviation(&self) -> Result<f64> {
        let fresh = serde_json::to_value(self.replay()?)?;
        let stored = serde_json::to_value(&self.outcome)?;
        Ok(numeric_deviation(&stored, &fresh))
    }

    /// SHA-256 of the canonical JSON of `(kind, corrupted, replay)`.
    pub fn input_hash(&self) -> String {
        let key = serde_json::to_string(&(self.kind, self.corrupted, &self.replay)).expect("witness serializes");
        hex::encode(Sha256::digest(key.as_bytes()))
    }
}

/// Max absolute difference of numeric leaves of two JSON trees of the same
/// shape. Non-numeric leaves must be equal; `null` only matches `null`.
pub fn numeric_deviation(a: &Value, b: &Value) -> f64 {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            let d = (x - y).abs();
            if d.is_nan() {
                f64::INFINITY
            } else {
                d
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            x.iter().zip(y).map(|(p, q)| numeric_deviation(p, q)).fold(0.0, f64::max)
        }
        (Value::Object(x), Value::Object(y)) if x.len() == y.len() => x
            .iter()
            .map(|(k, v)| y.get(k).map_or(f64::INFINITY, |w| numeric_deviation(v, w)))
            .fold(0.0, f64::max),
        _ if a == b => 0.0,
        _ => f64::INFINITY,
    }
}

pub fn default_f_family() -> Vec<ConcaveFn> {
    let mut fs: Vec<ConcaveFn> = [0.25, 0.5, 1.0, 2.0, 4.0].into_iter().map(ConcaveFn::hook).collect();
    fs.extend([0.25, 0.5, 1.0].into_iter().map(ConcaveFn::power));
    fs.push(sample_pwl(&mut CounterRng::for_purpose(0, Purpose::Function, 0), 5, 3.0));
    fs
}

fn default_ensembles() -> Vec<EnsembleKind> {
    vec![
        EnsembleKind::GinibreComplex,
        EnsembleKind::HermitianGaussian,
        EnsembleKind::DiagonalNonNegative,
        EnsembleKind::LowRankPlusNoise {
            rank: 2,
            noise_scale: 0.01,
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub seed: u64,
    pub ensembles: Vec<EnsembleKind>,
    /// Inclusive dimension range `[min, max]`.
    pub n_range: (usize, usize),
    pub instance_count: u64,
    pub f_family: Vec<ConcaveFn>,
    pub tol_rel: f64,
    pub checks: Vec<CheckKind>,
    /// Holding evaluations with `lhs / rhs >= tight_threshold` are near-tight.
    pub tight_threshold: f64,
    /// Index inputs are enumerated up to this `n` and sampled above it.
    pub enumerate_max_n: usize,
    /// Sampled TF pairs, index sequences and partitions per instance.
    pub samples_per_instance: usize,
    /// Configurations traced per theorem per instance.
    pub trace_samples: usize,
    /// Cap on stored witnesses per check and kind; counts are never capped.
    pub max_violations_per_check: usize,
    pub max_near_tight_per_check: usize,
    pub witness_path: Option<PathBuf>,
    pub summary_path: Option<PathBuf>,
    /// Test hook: negate every right-hand side before judging it.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub corrupt_rhs: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            seed: 0,
            ensembles: default_ensembles(),
            n_range: (2, 8),
            instance_count: 100,
            f_family: default_f_family(),
            tol_rel: DEFAULT_TOL_REL,
            checks: CheckKind::ALL.to_vec(),
            tight_threshold: 0.999,
            enumerate_max_n: 6,
            samples_per_instance: 16,
            trace_samples: 1,
            max_violations_per_check: 100,
            max_near_tight_per_check: 8,
            witness_path: None,
            summary_path: None,
            corrupt_rhs: false,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.tol_rel > 0.0 && self.tol_rel.is_finite()) {
            return bad(format!("tol_rel must be positive, got {}", self.tol_rel));
        }
        if !(self.tight_threshold > 0.0 && self.tight_threshold <= 1.0) {
            return bad(format!("tight_threshold must be in (0, 1], got {}", self.tight_threshold));
        }
        let (lo, hi) = self.n_range;
        if lo == 0 || lo > hi {
            return bad(format!("invalid n_range [{lo}, {hi}]"));
        }
        if self.ensembles.is_empty() && self.instance_count > 0 {
            return bad("no ensembles configured".into());
        }
        for kind in &self.ensembles {
            Ensemble::new(clamp_rank(kind, lo), lo, self.seed)?;
        }
        for f in &self.f_family {
            f.ensure_valid()?;
        }
        Ok(())
    }

    fn has(&self, c: CheckKind) -> bool {
        self.checks.contains(&c)
    }
}

/// Low-rank ensembles keep their rank within each instance's dimension.
fn clamp_rank(kind: &EnsembleKind, n: usize) -> EnsembleKind {
    match *kind {
        EnsembleKind::LowRankPlusNoise { rank, noise_scale } => EnsembleKind::LowRankPlusNoise {
            rank: rank.min(n),
            noise_scale,
        },
        ref k => k.clone(),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckCounts {
    pub checked: u64,
    pub held: u64,
    pub violated: u64,
    pub near_tight: u64,
    /// Largest finite `lhs / rhs` among holding evaluations.
    pub max_tightness: f64,
}

impl CheckCounts {
    fn merge(&mut self, o: &CheckCounts) {
        self.checked += o.checked;
        self.held += o.held;
        self.violated += o.violated;
        self.near_tight += o.near_tight;
        self.max_tightness = self.max_tightness.max(o.max_tightness);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub seed: u64,
    pub instances: u64,
    pub instances_with_violation: u64,
    pub checks: BTreeMap<CheckKind, CheckCounts>,
    pub witnesses_stored: u64,
}

impl CampaignSummary {
    pub fn total_violations(&self) -> u64 {
        self.checks.values().map(|c| c.violated).sum()
    }

    /// 0 when clean, 1 when any inequality was violated.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.total_violations() > 0)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check", "checked", "held", "violated", "near_tight", "max_tightness"])
            .expect("in-memory write");
        for (k, c) in &self.checks {
            let name = serde_json::to_value(k).expect("serializes");
            w.write_record([
                name.as_str().unwrap_or_default().to_owned(),
                c.checked.to_string(),
                c.held.to_string(),
                c.violated.to_string(),
                c.near_tight.to_string(),
                c.max_tightness.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub summary: CampaignSummary,
    pub witnesses: Vec<Witness>,
}

/// Evaluation accumulator for one instance (or one oracle run).
pub(crate) struct Tally {
    pub counts: BTreeMap<CheckKind, CheckCounts>,
    pub violations: Vec<Witness>,
    pub near_tight: Vec<Witness>,
    stored: BTreeMap<(CheckKind, bool), usize>,
    instance: u64,
    ensemble: Option<EnsembleKind>,
    tol_rel: f64,
    tight_threshold: f64,
    corrupted: bool,
    max_violations: usize,
    max_near_tight: usize,
}

impl Tally {
    pub(crate) fn new(
        instance: u64,
        ensemble: Option<EnsembleKind>,
        tol_rel: f64,
        tight_threshold: f64,
        corrupted: bool,
        max_violations: usize,
        max_near_tight: usize,
    ) -> Self {
        Tally {
            counts: BTreeMap::new(),
            violations: Vec::new(),
            near_tight: Vec::new(),
            stored: BTreeMap::new(),
            instance,
            ensemble,
            tol_rel,
            tight_threshold,
            corrupted,
            max_violations,
            max_near_tight,
        }
    }

    fn gap(&self, g: GapReport) -> Outcome {
        Outcome::Gap(if self.corrupted { corrupt(g) } else { g })
    }

    fn record(&mut self, check: CheckKind, outcome: Outcome, replay: impl FnOnce() -> Replay) {
        let c = self.counts.entry(check).or_default();
        c.checked += 1;
        let holds = outcome.holds();
        let tight = outcome.tightness().filter(|t| t.is_finite());
        let kind = if holds {
            c.held += 1;
            if let Some(t) = tight {
                c.max_tightness = c.max_tightness.max(t);
            }
            if tight.is_some_and(|t| t >= self.tight_threshold) {
                c.near_tight += 1;
                WitnessKind::NearTight
            } else {
                return;
            }
        } else {
            c.violated += 1;
            WitnessKind::Violation
        };
        let violation = kind == WitnessKind::Violation;
        let cap = if violation { self.max_violations } else { self.max_near_tight };
        let n = self.stored.entry((check, violation)).or_default();
        if *n >= cap {
            return;
        }
        *n += 1;
        let w = Witness {
            kind,
            check,
            instance: self.instance,
            ensemble: self.ensemble.clone(),
            tol_rel: self.tol_rel,
            corrupted: self.corrupted,
            replay: replay(),
            outcome,
        };
        if violation {
            self.violations.push(w);
        } else {
            self.near_tight.push(w);
        }
    }
}

/// Matrices of one instance with their spectra, computed once.
pub(crate) struct Instance<'a> {
    pub x: &'a ComplexMatrix,
    pub y: &'a ComplexMatrix,
    pub sum: TripleSpectra,
    pub sd: Spectrum,
    herm: Option<(ComplexMatrix, ComplexMatrix, TripleSpectra)>,
}

impl<'a> Instance<'a> {
    pub(crate) fn new(x: &'a ComplexMatrix, y: &'a ComplexMatrix, hermitian: bool) -> Result<Self> {
        let herm = if hermitian {
            let (xh, yh) = (x.hermitian_part(), y.hermitian_part());
            let t = hermitian_triple(&xh, &yh)?;
            Some((xh, yh, t))
        } else {
            None
        };
        Ok(Instance {
            x,
            y,
            sum: TripleSpectra::of_sum(x, y)?,
            sd: singular_values(&(x - y))?,
            herm,
        })
    }

    pub(crate) fn tf(&self, chk: &Checker, tally: &mut Tally, pair: &TfPair) -> Result<()> {
        let s = &self.sum;
        let g = tally.gap(chk.tf_gap(&s.alpha, &s.beta, &s.gamma, pair)?);
        tally.record(CheckKind::Tf, g, || Replay::Tf {
            a: self.x.clone(),
            b: self.y.clone(),
            spectrum: SpectrumKind::Singular,
            pair: pair.clone(),
        });
        if let Some((xh, yh, h)) = &self.herm {
            let g = tally.gap(chk.tf_gap(&h.alpha, &h.beta, &h.gamma, pair)?);
            tally.record(CheckKind::Tf, g, || Replay::Tf {
                a: xh.clone(),
                b: yh.clone(),
                spectrum: SpectrumKind::HermitianEigen,
                pair: pair.clone(),
            });
        }
        Ok(())
    }

    pub(crate) fn f_tf(&self, chk: &Checker, tally: &mut Tally, pair: &TfPair, f: &ConcaveFn) -> Result<()> {
        let s = &self.sum;
        let g = tally.gap(chk.f_tf_gap(&s.alpha, &s.beta, &s.gamma, pair, f)?);
        tally.record(CheckKind::FTf, g, || Replay::FTf {
            a: self.x.clone(),
            b: self.y.clone(),
            pair: pair.clone(),
            f: f.clone(),
        });
        Ok(())
    }

    pub(crate) fn mirsky(&self, chk: &Checker, tally: &mut Tally, idx: &IndexSeq, f: &ConcaveFn) -> Result<()> {
        let g = chk.mirsky_f_gap_spectra(&self.sum.alpha, &self.sum.beta, &self.sd, idx, f)?;
        let g = tally.gap(g);
        tally.record(CheckKind::Mirsky, g, || Replay::Mirsky {
            x: self.x.clone(),
            y: self.y.clone(),
            idx: idx.clone(),
            f: f.clone(),
        });
        Ok(())
    }

    pub(crate) fn theorem3(&self, chk: &Checker, tally: &mut Tally, p: &IndexPartition) -> Result<()> {
        let s = &self.sum;
        let g = tally.gap(chk.theorem3_gap(&s.alpha, &s.beta, &s.gamma, p)?);
        tally.record(CheckKind::Theorem3, g, || Replay::Theorem3 {
            a: self.x.clone(),
            b: self.y.clone(),
            partition: p.clone(),
        });
        Ok(())
    }

    fn bound(&self, chk: &Checker, tally: &mut Tally, idx: &IndexSeq, f: &ConcaveFn) -> Result<()> {
        let g = chk.mirsky_f_gap_spectra(&self.sum.alpha, &self.sum.beta, &self.sd, idx, f)?;
        let g = if tally.corrupted { corrupt(g) } else { g };
        tally.record(CheckKind::Bounds, Outcome::Bound(bound_from_gap(&g, f, idx)), || Replay::Bound {
            x: self.x.clone(),
            y: self.y.clone(),
            idx: idx.clone(),
            f: f.clone(),
        });
        Ok(())
    }
}

/// Index inputs for one instance: all of them, or a sample plus the full ones.
struct IndexInputs {
    pairs: Vec<TfPair>,
    seqs: Vec<IndexSeq>,
    partitions: Vec<IndexPartition>,
}

fn all_tf_pairs(n: usize) -> Vec<TfPair> {
    (1..=n)
        .flat_map(|m| enumerate_tf_pairs(n, m).expect("1 <= m <= n"))
        .collect()
}

fn all_index_seqs(n: usize) -> Vec<IndexSeq> {
    (1..=n).flat_map(|m| enumerate_index_seqs(n, m)).collect()
}

fn all_partitions(n: usize) -> Vec<IndexPartition> {
    all_index_seqs(n)
        .iter()
        .flat_map(|s| enumerate_partitions(s).collect::<Vec<_>>())
        .collect()
}

impl IndexInputs {
    fn enumerate(n: usize) -> Self {
        IndexInputs {
            pairs: all_tf_pairs(n),
            seqs: all_index_seqs(n),
            partitions: all_partitions(n),
        }
    }

    fn sample(rng: &mut CounterRng, n: usize, count: usize) -> Self {
        let full = IndexSeq::prefix(n, n).expect("valid prefix");
        let mut pairs = vec![TfPair::new(full.clone(), full.clone()).expect("diagonal pair is admissible")];
        let mut seqs = vec![full];
        let mut partitions = Vec::with_capacity(count);
        for _ in 0..count {
            pairs.push(sample_tf_pair(rng, n));
            seqs.push(sample_index_seq(rng, n));
            partitions.push(sample_partition(rng, n));
        }
        IndexInputs {
            pairs,
            seqs,
            partitions,
        }
    }
}

struct InstanceOutcome {
    counts: BTreeMap<CheckKind, CheckCounts>,
    violations: Vec<Witness>,
    near_tight: Vec<Witness>,
}

fn run_instance(cfg: &CampaignConfig, k: u64) -> Result<InstanceOutcome> {
    let chk = Checker::new(cfg.tol_rel);
    let (lo, hi) = cfg.n_range;
    let mut inst_rng = CounterRng::for_purpose(cfg.seed, Purpose::Instance, k);
    let n = inst_rng.range_inclusive(lo, hi);
    let kind = clamp_rank(&cfg.ensembles[(k % cfg.ensembles.len() as u64) as usize], n);
    let ens = Ensemble::new(kind.clone(), n, cfg.seed)?;
    let x = ens.sample(2 * k);
    let y = ens.sample(2 * k + 1);
    let inst = Instance::new(&x, &y, cfg.has(CheckKind::Tf))?;

    let mut idx_rng = CounterRng::for_purpose(cfg.seed, Purpose::Indices, k);
    let inputs = if n <= cfg.enumerate_max_n {
        IndexInputs::enumerate(n)
    } else {
        IndexInputs::sample(&mut idx_rng, n, cfg.samples_per_instance)
    };
    let mut tally = Tally::new(
        k,
        Some(kind),
        cfg.tol_rel,
        cfg.tight_threshold,
        cfg.corrupt_rhs,
        cfg.max_violations_per_check,
        cfg.max_near_tight_per_check,
    );

    if cfg.has(CheckKind::Tf) {
        for p in &inputs.pairs {
            inst.tf(&chk, &mut tally, p)?;
        }
    }
    if cfg.has(CheckKind::FTf) {
        for f in &cfg.f_family {
            for p in &inputs.pairs {
                inst.f_tf(&chk, &mut tally, p, f)?;
            }
        }
    }
    if cfg.has(CheckKind::Mirsky) {
        for f in &cfg.f_family {
            for s in &inputs.seqs {
                inst.mirsky(&chk, &mut tally, s, f)?;
            }
        }
    }
    if cfg.has(CheckKind::Theorem3) {
        for p in &inputs.partitions {
            inst.theorem3(&chk, &mut tally, p)?;
        }
    }
    if cfg.has(CheckKind::Bounds) {
        for f in &cfg.f_family {
            for s in &inputs.seqs {
                inst.bound(&chk, &mut tally, s, f)?;
            }
        }
        // Best low-rank approximation as the perturbed matrix.
        let r = idx_rng.below(n);
        let xr = truncate_rank(&x, r)?;
        let trunc = Instance::new(&x, &xr, false)?;
        let full = IndexSeq::prefix(n, n)?;
        for f in &cfg.f_family {
            trunc.bound(&chk, &mut tally, &full, f)?;
        }
    }
    if cfg.has(CheckKind::Traces) {
        let mut t_rng = CounterRng::for_purpose(cfg.seed, Purpose::Threshold, k);
        let top = inst.sum.alpha.at(1).max(inst.sum.beta.at(1)).max(f64::MIN_POSITIVE);
        for _ in 0..cfg.trace_samples {
            let idx = sample_index_seq(&mut idx_rng, n);
            let t = t_rng.uniform_in(0.05, 1.2) * top;
            let r = chk.trace_theorem1(&x, &y, &idx, t, None)?;
            tally.record(CheckKind::Traces, Outcome::Trace(r), || Replay::TraceTheorem1 {
                x: x.clone(),
                y: y.clone(),
                idx,
                t,
            });

            let pair = sample_tf_pair(&mut idx_rng, n);
            let t = t_rng.uniform_in(0.05, 1.2) * top;
            let s = &inst.sum;
            let r = chk.trace_theorem2(&s.alpha, &s.beta, &s.gamma, &pair, t)?;
            tally.record(CheckKind::Traces, Outcome::Trace(r), || Replay::TraceTheorem2 {
                a: x.clone(),
                b: y.clone(),
                pair,
                t,
            });

            let partition = sample_partition(&mut idx_rng, n);
            let r = chk.trace_theorem3(&x, &y, &partition)?;
            tally.record(CheckKind::Traces, Outcome::Trace(r), || Replay::TraceTheorem3 {
                a: x.clone(),
                b: y.clone(),
                partition,
            });
        }
    }
    Ok(InstanceOutcome {
        counts: tally.counts,
        violations: tally.violations,
        near_tight: tally.near_tight,
    })
}

const BLOCK: u64 = 256;

/// Runs a campaign; witnesses are appended to `witness_path` and the summary
/// written to `summary_path` when configured.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignResult> {
    cfg.validate()?;
    let mut summary = CampaignSummary {
        seed: cfg.seed,
        instances: cfg.instance_count,
        ..CampaignSummary::default()
    };
    for c in &cfg.checks {
        summary.checks.entry(*c).or_default();
    }
    let mut stored: BTreeMap<(CheckKind, WitnessKind), usize> = BTreeMap::new();
    let mut witnesses = Vec::new();
    let mut start = 0;
    while start < cfg.instance_count {
        let end = (start + BLOCK).min(cfg.instance_count);
        let outcomes: Vec<Result<InstanceOutcome>> = (start..end).into_par_iter().map(|k| run_instance(cfg, k)).collect();
        for o in outcomes {
            let o = o?;
            if o.counts.values().any(|c| c.violated > 0) {
                summary.instances_with_violation += 1;
            }
            for (k, c) in &o.counts {
                summary.checks.entry(*k).or_default().merge(c);
            }
            for w in o.violations.into_iter().chain(o.near_tight) {
                let cap = match w.kind {
                    WitnessKind::Violation => cfg.max_violations_per_check,
                    WitnessKind::NearTight => cfg.max_near_tight_per_check,
                };
                let n = stored.entry((w.check, w.kind)).or_default();
                if *n < cap {
                    *n += 1;
                    witnesses.push(w);
                }
            }
        }
        start = end;
    }
    summary.witnesses_stored = witnesses.len() as u64;
    if let Some(p) = &cfg.witness_path {
        append_witnesses(p, &witnesses)?;
    }
    if let Some(p) = &cfg.summary_path {
        std::fs::write(p, serde_json::to_string_pretty(&summary)? + "\n")?;
    }
    Ok(CampaignResult { summary, witnesses })
}

/// Appends witnesses as JSON lines through a single buffered writer.
pub fn append_witnesses(path: &Path, witnesses: &[Witness]) -> Result<()> {
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = BufWriter::new(file);
    for wit in witnesses {
        serde_json::to_writer(&mut w, wit)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_witnesses(path: &Path) -> Result<Vec<Witness>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompactStats {
    pub read: usize,
    pub kept: usize,
}

/// Rewrites a witness store keeping the first witness per input hash.
/// `input` and `output` may be the same file.
pub fn compact_witnesses(input: &Path, output: &Path) -> Result<CompactStats> {
    let all = load_witnesses(input)?;
    let mut seen = HashSet::new();
    let kept: Vec<Witness> = all.iter().filter(|w| seen.insert(w.input_hash())).cloned().collect();
    let mut w = BufWriter::new(File::create(output)?);
    for wit in &kept {
        serde_json::to_writer(&mut w, wit)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(CompactStats {
        read: all.len(),
        kept: kept.len(),
    })
}
