use serde::{Deserialize, Serialize};

use crate::index::{IndexPartition, IndexSeq, PairClassification, Side, TfPair};

pub const DEFAULT_TOL_REL: f64 = 1e-9;

/// One evaluated inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    /// `1 + |lhs| + |rhs|`.
    pub scale: f64,
    pub tol_rel: f64,
    /// `slack >= -tol_rel * scale`.
    pub holds: bool,
}

impl GapReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tol_rel: f64) -> Self {
        let slack = rhs - lhs;
        let scale = 1.0 + lhs.abs() + rhs.abs();
        GapReport {
            name: name.into(),
            lhs,
            rhs,
            slack,
            scale,
            tol_rel,
            holds: slack >= -tol_rel * scale,
        }
    }

    /// `lhs / rhs`, with `0/0 = 0`. Infinite when only the bound is zero.
    pub fn tightness(&self) -> f64 {
        if self.rhs > 0.0 {
            self.lhs / self.rhs
        } else if self.lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// Threshold positions for a hook at level `t`: the first index whose value
/// falls below `t`, with `m + 1` when none does.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdIndices {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: String,
    pub report: GapReport,
}

/// Instance data a trace used. Fields not relevant to a theorem stay empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceContext {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub idx: Option<IndexSeq>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pair: Option<TfPair>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub partition: Option<IndexPartition>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub thresholds: Option<ThresholdIndices>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub classification: Option<PairClassification>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tfw_pair: Option<TfPair>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub flags: Option<Vec<Side>>,
    /// Set when alpha and gamma were exchanged to get `a <= c`.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub swapped: bool,
    /// Number of leading indices removed (`a - 1`).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stripped: Option<usize>,
    /// A TF premise that failed, if any.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub premise_violation: Option<TfPair>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub theorem: String,
    pub steps: Vec<TraceStep>,
    pub context: TraceContext,
    pub all_hold: bool,
}

impl TraceReport {
    pub(crate) fn new(theorem: &str, steps: Vec<TraceStep>, context: TraceContext) -> Self {
        let all_hold = steps.iter().all(|s| s.report.holds);
        TraceReport {
            theorem: theorem.to_owned(),
            steps,
            context,
            all_hold,
        }
    }

    pub fn step(&self, name: &str) -> Option<&GapReport> {
        self.steps.iter().find(|s| s.step == name).map(|s| &s.report)
    }

    pub fn final_step(&self) -> &GapReport {
        &self.steps.last().expect("traces always have steps").report
    }

    pub fn failing_steps(&self) -> impl Iterator<Item = &TraceStep> {
        self.steps.iter().filter(|s| !s.report.holds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holds_uses_relative_tolerance() {
        let r = GapReport::new("x", 1.0 + 1e-12, 1.0, 1e-9);
        assert!(r.holds);
        assert_eq!(r.scale, 1.0 + (1.0 + 1e-12) + 1.0);
        let r = GapReport::new("x", 1.1, 1.0, 1e-9);
        assert!(!r.holds);
        assert!((r.slack + 0.1).abs() < 1e-15);
    }

    #[test]
    fn tightness_conventions() {
        assert_eq!(GapReport::new("z", 0.0, 0.0, 1e-9).tightness(), 0.0);
        assert_eq!(GapReport::new("h", 1.0, 2.0, 1e-9).tightness(), 0.5);
        assert!(GapReport::new("v", 1.0, 0.0, 1e-9).tightness().is_infinite());
    }
}
