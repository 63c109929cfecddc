//! Step-by-step replays of the three proofs on concrete instances.
//!
//! Every intermediate inequality is evaluated numerically and reported as a
//! named [`TraceStep`]. Degenerate branches (empty index ranges) still emit
//! their step with `lhs = rhs = 0`, so each theorem always yields the same
//! list of step names. Traces recompute spectra from their inputs.

use crate::concave::ConcaveFn;
use crate::error::{Error, Result};
use crate::index::{classify_pairs, enumerate_tf_pairs, tfw_index_build, IndexPartition, IndexSeq, PairClass, Side, TfPair};
use crate::ineq::{first_below, tf_sides, Checker};
use crate::matrix::ComplexMatrix;
use crate::report::{GapReport, ThresholdIndices, TraceContext, TraceReport, TraceStep};
use crate::rng::{CounterRng, Purpose};
use crate::sampling::sample_tf_pair;
use crate::spectrum::{hermitian_eigenvalues, singular_values, wielandt_embed, Spectrum};

/// Largest dimension for which the TF premise is checked exhaustively.
pub const PREMISE_EXHAUSTIVE_MAX_N: usize = 6;
const PREMISE_SAMPLES: u64 = 512;

pub const THEOREM1_STEPS: [&str; 7] = [
    "stripped_hook_mirsky",
    "threshold_split",
    "partition_bound",
    "head_bound",
    "tail_nonnegative",
    "exchange",
    "hook_mirsky",
];

pub const THEOREM2_STEPS: [&str; 7] = [
    "tf_premise",
    "shifted_tf",
    "gamma_monotone",
    "tail_bound",
    "tail_hook_bound",
    "head_hook_bound",
    "hook_tf",
];

pub const THEOREM3_STEPS: [&str; 9] = [
    "k1_monotone",
    "k2_monotone",
    "embedded_tf",
    "embedded_weakening",
    "embedded_weak_tf",
    "embedding_identities",
    "exchange_core_rearranged",
    "exchange_core",
    "exchange",
];

fn sum_range(lo: usize, hi: usize, term: impl Fn(usize) -> f64) -> f64 {
    if lo > hi {
        return 0.0;
    }
    (lo..=hi).map(term).sum()
}

struct Steps<'a> {
    checker: &'a Checker,
    steps: Vec<TraceStep>,
}

impl Steps<'_> {
    fn push(&mut self, step: &str, lhs: f64, rhs: f64) -> GapReport {
        let report = self.checker.gap(step, lhs, rhs);
        self.steps.push(TraceStep {
            step: step.to_owned(),
            report: report.clone(),
        });
        report
    }

    fn push_report(&mut self, step: &str, report: GapReport) {
        self.steps.push(TraceStep {
            step: step.to_owned(),
            report: report.renamed(step),
        });
    }
}

/// Natural split for the hook-reduced inequality: `C` where `gamma(i) >= alpha(i)`.
pub fn natural_flags(alpha: &Spectrum, gamma: &Spectrum, idx: &IndexSeq) -> Vec<Side> {
    idx.indices()
        .iter()
        .map(|&i| if gamma.at(i) >= alpha.at(i) { Side::C } else { Side::A })
        .collect()
}

/// Frame used by the single-hook Mirsky trace after the `a <= c` swap.
#[derive(Debug, Clone)]
pub struct HookFrame {
    pub alpha: Spectrum,
    pub beta: Spectrum,
    pub gamma: Spectrum,
    pub swapped: bool,
    pub a: usize,
    pub c: usize,
}

/// `gamma = sigma(X)`, `alpha = sigma(Y)`, `beta = sigma(X - Y)`, with alpha
/// and gamma exchanged when the threshold index of alpha exceeds gamma's.
pub fn hook_frame(x: &ComplexMatrix, y: &ComplexMatrix, idx: &IndexSeq, t: f64) -> Result<HookFrame> {
    x.same_dim(y)?;
    if idx.n() != x.n() {
        return Err(Error::DimMismatch(format!(
            "index sequence is over [1, {}] but matrices are {}x{}",
            idx.n(),
            x.n(),
            x.n()
        )));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidFunction(format!("hook threshold {t} is not positive")));
    }
    let gamma = singular_values(x)?;
    let alpha = singular_values(y)?;
    let beta = singular_values(&(x - y))?;
    let a = first_below(idx.indices().iter().map(|&i| alpha.at(i)), t);
    let c = first_below(idx.indices().iter().map(|&i| gamma.at(i)), t);
    Ok(if a > c {
        HookFrame {
            alpha: gamma,
            beta,
            gamma: alpha,
            swapped: true,
            a: c,
            c: a,
        }
    } else {
        HookFrame {
            alpha,
            beta,
            gamma,
            swapped: false,
            a,
            c,
        }
    })
}

impl Checker {
    /// Replays the reduction of the concave Mirsky inequality to a single hook
    /// `h(x) = min(x, t)`, then to the exchange inequality.
    ///
    /// `flags` split `I` in the post-swap frame (see [`hook_frame`]); `None`
    /// takes the natural split. Positions `a <= k < c` must be flagged `C`.
    pub fn trace_theorem1(
        &self,
        x: &ComplexMatrix,
        y: &ComplexMatrix,
        idx: &IndexSeq,
        t: f64,
        flags: Option<&[Side]>,
    ) -> Result<TraceReport> {
        let frame = hook_frame(x, y, idx, t)?;
        let HookFrame {
            ref alpha,
            ref beta,
            ref gamma,
            a,
            c,
            ..
        } = frame;
        let m = idx.m();
        let flags: Vec<Side> = match flags {
            Some(f) if f.len() != m => {
                return Err(Error::InvalidIndex(format!("{} flags for {m} indices", f.len())))
            }
            Some(f) => f.to_vec(),
            None => natural_flags(alpha, gamma, idx),
        };
        for k in a..c {
            if flags[k - 1] != Side::C {
                return Err(Error::FlagConflict { position: k, c });
            }
        }
        let h = |v: f64| v.min(t);

        // Leading indices with both values at or above t contribute nothing.
        let strip = a - 1;
        let sub = idx.skip_front(strip);
        let m1 = sub.m();
        let sub_flags = flags[strip..].to_vec();
        let c1 = c - strip;
        let b1 = first_below((1..=m1).map(|k| beta.at(k)), t);
        let partition = IndexPartition::new(sub.clone(), b1, sub_flags)?;

        let mut s = Steps {
            checker: self,
            steps: Vec::with_capacity(THEOREM1_STEPS.len()),
        };
        let beta_hook_rhs = t * (b1 - 1) as f64 + sum_range(b1, m1, |k| beta.at(k));

        let lhs = sub.indices().iter().map(|&i| (h(gamma.at(i)) - h(alpha.at(i))).abs()).sum();
        let rhs = (1..=m1).map(|k| h(beta.at(k))).sum();
        s.push(THEOREM1_STEPS[0], lhs, rhs);

        let lhs = sum_range(1, c1 - 1, |k| t - alpha.at(sub.at(k)))
            + sum_range(c1, m1, |k| (gamma.at(sub.at(k)) - alpha.at(sub.at(k))).abs());
        s.push(THEOREM1_STEPS[1], lhs, beta_hook_rhs);

        let i_c = partition.i_c();
        let i_a = partition.i_a();
        let lhs = i_c.iter().map(|&i| h(gamma.at(i))).sum::<f64>() + alpha.sum_at(&i_a);
        let rhs = alpha.sum_at(&i_c) + gamma.sum_at(&i_a) + beta_hook_rhs;
        s.push(THEOREM1_STEPS[2], lhs, rhs);

        let lhs = partition.i_clbar().iter().map(|&i| h(gamma.at(i))).sum::<f64>() + alpha.sum_at(&partition.i_albar());
        s.push(THEOREM1_STEPS[3], lhs, t * (b1 - 1) as f64);

        let rhs = alpha.sum_at(&partition.i_crbar()) + gamma.sum_at(&partition.i_arbar());
        s.push(THEOREM1_STEPS[4], 0.0, rhs);

        s.push_report(THEOREM1_STEPS[5], self.theorem3_gap(alpha, beta, gamma, &partition)?);

        // Final step in the caller's frame: X, Y, X - Y.
        let (sx, sy) = if frame.swapped { (alpha, gamma) } else { (gamma, alpha) };
        s.push_report(
            THEOREM1_STEPS[6],
            self.mirsky_f_gap_spectra(sx, sy, beta, idx, &ConcaveFn::hook(t))?,
        );

        let context = TraceContext {
            alpha: alpha.values().to_vec(),
            beta: beta.values().to_vec(),
            gamma: gamma.values().to_vec(),
            idx: Some(idx.clone()),
            partition: Some(partition),
            thresholds: Some(ThresholdIndices { a, b: b1, c, t }),
            flags: Some(flags),
            swapped: frame.swapped,
            stripped: Some(strip),
            notes: vec!["gamma = sigma(X), alpha = sigma(Y), beta = sigma(X - Y) before any swap".into()],
            ..TraceContext::default()
        };
        Ok(TraceReport::new("theorem1", s.steps, context))
    }

    /// Replays the derivation of the hook version `h(x) = min(x, t)` of a TF
    /// inequality from plain TF inequalities on non-negative sequences.
    pub fn trace_theorem2(
        &self,
        alpha: &Spectrum,
        beta: &Spectrum,
        gamma: &Spectrum,
        pair: &TfPair,
        t: f64,
    ) -> Result<TraceReport> {
        let n = pair.n();
        for (what, s) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if s.len() != n {
                return Err(Error::DimMismatch(format!("{what} has {} values, pair is over n = {n}", s.len())));
            }
            if let Some(p) = s.values().iter().position(|&v| v < 0.0) {
                return Err(Error::NegativeSpectrum {
                    position: p + 1,
                    value: s.values()[p],
                });
            }
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidFunction(format!("hook threshold {t} is not positive")));
        }
        let h = |v: f64| v.min(t);
        let m = pair.m();
        let i = |k: usize| pair.i().at(k);
        let j = |k: usize| pair.j().at(k);
        let g = |k: usize| gamma.at(i(k) + j(k) - k);

        let (premise, violation) = self.tf_premise(alpha, beta, gamma)?;
        let a = first_below((1..=m).map(|k| alpha.at(i(k))), t);
        let b = first_below((1..=m).map(|k| beta.at(j(k))), t);

        let mut s = Steps {
            checker: self,
            steps: Vec::with_capacity(THEOREM2_STEPS.len()),
        };
        s.push_report(THEOREM2_STEPS[0], premise);

        let mut notes = Vec::new();
        let (shift_lhs, shift_rhs) = if a + b - 1 <= m {
            let m_shift = m + 2 - a - b;
            let lhs = sum_range(1, m_shift, |k| gamma.at(i(k + a - 1) + j(k + b - 1) - k));
            let rhs = sum_range(a, m + 1 - b, |k| alpha.at(i(k))) + sum_range(b, m + 1 - a, |k| beta.at(j(k)));
            (lhs, rhs)
        } else {
            notes.push("a + b - 1 > m: shifted TF inequality is empty".to_owned());
            (0.0, 0.0)
        };
        s.push(THEOREM2_STEPS[1], shift_lhs, shift_rhs);

        let tail = sum_range(a + b - 1, m, g);
        s.push(THEOREM2_STEPS[2], tail, shift_lhs);
        s.push(THEOREM2_STEPS[3], tail, shift_rhs);

        let tail_hook = sum_range(a + b - 1, m, |k| h(g(k)));
        let alpha_tail = sum_range(a, m, |k| alpha.at(i(k)));
        let beta_tail = sum_range(b, m, |k| beta.at(j(k)));
        s.push(THEOREM2_STEPS[4], tail_hook, alpha_tail + beta_tail);

        let head = sum_range(1, (a + b - 2).min(m), |k| h(g(k)));
        s.push(THEOREM2_STEPS[5], head, t * (a + b - 2) as f64);

        let total = sum_range(1, m, |k| h(g(k)));
        let rhs = t * (a - 1) as f64 + alpha_tail + t * (b - 1) as f64 + beta_tail;
        s.push(THEOREM2_STEPS[6], total, rhs);

        let context = TraceContext {
            alpha: alpha.values().to_vec(),
            beta: beta.values().to_vec(),
            gamma: gamma.values().to_vec(),
            pair: Some(pair.clone()),
            thresholds: Some(ThresholdIndices { a, b, c: 0, t }),
            premise_violation: violation,
            notes,
            ..TraceContext::default()
        };
        Ok(TraceReport::new("theorem2", s.steps, context))
    }

    /// Worst-slack TF inequality over all pairs (n <= 6) or a fixed sample.
    fn tf_premise(&self, alpha: &Spectrum, beta: &Spectrum, gamma: &Spectrum) -> Result<(GapReport, Option<TfPair>)> {
        let n = alpha.len();
        let pairs: Vec<TfPair> = if n <= PREMISE_EXHAUSTIVE_MAX_N {
            let mut all = Vec::new();
            for m in 1..=n {
                all.extend(enumerate_tf_pairs(n, m)?);
            }
            all
        } else {
            let mut rng = CounterRng::for_purpose(0, Purpose::Premise, n as u64);
            (0..PREMISE_SAMPLES).map(|_| sample_tf_pair(&mut rng, n)).collect()
        };
        let mut worst: Option<(GapReport, TfPair)> = None;
        for pair in pairs {
            let (lhs, rhs) = tf_sides(alpha, beta, gamma, &pair, |x| x);
            let r = self.gap("tf_premise", lhs, rhs);
            let better = match &worst {
                None => true,
                Some((w, _)) => r.slack / r.scale < w.slack / w.scale,
            };
            if better {
                worst = Some((r, pair));
            }
        }
        let (report, pair) = worst.expect("n >= 1 has at least one TF pair");
        let violation = (!report.holds).then_some(pair);
        Ok((report, violation))
    }

    /// Replays the proof of the exchange inequality for `C = -(A + B)`,
    /// including the TF inequality on the Wielandt embeddings.
    pub fn trace_theorem3(&self, a_mat: &ComplexMatrix, b_mat: &ComplexMatrix, p: &IndexPartition) -> Result<TraceReport> {
        a_mat.same_dim(b_mat)?;
        let n = a_mat.n();
        if p.seq().n() != n {
            return Err(Error::DimMismatch(format!(
                "partition is over [1, {}] but matrices are {n}x{n}",
                p.seq().n()
            )));
        }
        let c_mat = -&(a_mat + b_mat);
        let alpha = singular_values(a_mat)?;
        let beta = singular_values(b_mat)?;
        let gamma = singular_values(&c_mat)?;
        let b = p.b();
        let m = p.m();
        let cls = classify_pairs(p);
        let k1 = cls.members(PairClass::K1);
        let k2 = cls.members(PairClass::K2);
        let k3 = cls.members(PairClass::K3);
        let k4 = cls.members(PairClass::K4);
        let r = cls.r();

        let mut s = Steps {
            checker: self,
            steps: Vec::with_capacity(THEOREM3_STEPS.len()),
        };
        s.push(THEOREM3_STEPS[0], gamma.sum_at(&cls.s_of(&k1)), gamma.sum_at(&cls.t_of(&k1)));
        s.push(THEOREM3_STEPS[1], alpha.sum_at(&cls.s_of(&k2)), alpha.sum_at(&cls.t_of(&k2)));

        let a_hat = wielandt_embed(a_mat);
        let b_hat = wielandt_embed(b_mat);
        let alpha_hat = hermitian_eigenvalues(&a_hat)?;
        let beta_hat = hermitian_eigenvalues(&b_hat)?;
        let gamma_hat = hermitian_eigenvalues(&(&a_hat + &b_hat))?;
        let tfw = tfw_index_build(&cls, n, b)?;
        let embedded = self.tf_gap(&alpha_hat, &beta_hat, &gamma_hat, &tfw)?;
        s.push_report(THEOREM3_STEPS[2], embedded.clone());

        let mirror = |k: usize| 2 * n + 1 - k;
        let weak_lhs = k3.iter().map(|&k| gamma_hat.at(cls.s(k))).sum::<f64>()
            + k4.iter().map(|&k| gamma_hat.at(mirror(cls.t(k)))).sum::<f64>();
        s.push(THEOREM3_STEPS[3], weak_lhs, embedded.lhs);
        let weak_rhs = k3.iter().map(|&k| alpha_hat.at(cls.t(k))).sum::<f64>()
            + k4.iter().map(|&k| alpha_hat.at(mirror(cls.s(k)))).sum::<f64>()
            + sum_range(b, b + r - 1, |l| beta_hat.at(l));
        s.push(THEOREM3_STEPS[4], weak_lhs, weak_rhs);

        // alpha_hat(k) = alpha(k), alpha_hat(2n+1-k) = -alpha(k); same for beta, gamma.
        let mut deviation: f64 = 0.0;
        let mut magnitude: f64 = 0.0;
        for (hat, sv) in [(&alpha_hat, &alpha), (&beta_hat, &beta), (&gamma_hat, &gamma)] {
            for k in 1..=n {
                deviation = deviation
                    .max((hat.at(k) - sv.at(k)).abs())
                    .max((hat.at(mirror(k)) + sv.at(k)).abs());
                magnitude = magnitude.max(sv.at(k));
            }
        }
        s.push(THEOREM3_STEPS[5], deviation / (1.0 + magnitude), 0.0);

        let beta_r = sum_range(b, b + r - 1, |k| beta.at(k));
        let lhs = gamma.sum_at(&cls.s_of(&k3)) - gamma.sum_at(&cls.t_of(&k4));
        let rhs = alpha.sum_at(&cls.t_of(&k3)) - alpha.sum_at(&cls.s_of(&k4)) + beta_r;
        s.push(THEOREM3_STEPS[6], lhs, rhs);

        let lhs = gamma.sum_at(&cls.s_of(&k3)) + alpha.sum_at(&cls.s_of(&k4));
        let rhs = alpha.sum_at(&cls.t_of(&k3)) + gamma.sum_at(&cls.t_of(&k4)) + beta_r;
        s.push(THEOREM3_STEPS[7], lhs, rhs);

        let union = |x: &[usize], y: &[usize]| -> Vec<usize> {
            let mut u: Vec<usize> = x.iter().chain(y).copied().collect();
            u.sort_unstable();
            u
        };
        let k13 = union(&k1, &k3);
        let k24 = union(&k2, &k4);
        let k14 = union(&k1, &k4);
        let k23 = union(&k2, &k3);
        let lhs = gamma.sum_at(&cls.s_of(&k13)) + alpha.sum_at(&cls.s_of(&k24));
        let rhs = gamma.sum_at(&cls.t_of(&k14)) + alpha.sum_at(&cls.t_of(&k23)) + sum_range(b, m, |k| beta.at(k));
        s.push(THEOREM3_STEPS[8], lhs, rhs);

        let context = TraceContext {
            alpha: alpha.values().to_vec(),
            beta: beta.values().to_vec(),
            gamma: gamma.values().to_vec(),
            partition: Some(p.clone()),
            classification: Some(cls),
            tfw_pair: Some(tfw),
            notes: vec!["alpha = sigma(A), beta = sigma(B), gamma = sigma(-(A + B))".into()],
            ..TraceContext::default()
        };
        Ok(TraceReport::new("theorem3", s.steps, context))
    }
}
