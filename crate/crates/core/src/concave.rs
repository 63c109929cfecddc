//! Admissible concave functions: `f: [0, inf) -> [0, inf)`, concave, `f(0) = 0`.
//!
//! Every such function is a non-negative combination of hooks
//! `h_t(x) = min(x, t)` plus a linear part. Piecewise-linear functions
//! decompose exactly into finitely many hooks; closed forms are bridged
//! through [`pwl_approximate`], which reports its own sup-error.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum ConcaveFn {
    /// `min(x, t)`.
    Hook { t: f64 },
    /// `x^p`, `0 < p <= 1`.
    Power { p: f64 },
    /// `scale * ln(1 + x / scale)`, unit slope at 0.
    Log1p { scale: f64 },
    /// Slope `slopes[0]` on `[0, breakpoints[0]]`, `slopes[k]` on
    /// `[breakpoints[k-1], breakpoints[k]]`, `slopes[B]` beyond the last breakpoint.
    Pwl {
        breakpoints: Vec<f64>,
        slopes: Vec<f64>,
    },
}

/// Which admissibility hypothesis a function breaks, and where.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFiniteParameter,
    NonPositiveThreshold(f64),
    PowerOutOfRange(f64),
    NonPositiveScale(f64),
    SlopeCountMismatch { breakpoints: usize, slopes: usize },
    BreakpointNotPositive { index: usize },
    BreakpointsNotIncreasing { index: usize },
    NegativeSlope { segment: usize },
    SlopeIncrease { segment: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFiniteParameter => write!(f, "parameter is not finite"),
            Violation::NonPositiveThreshold(t) => write!(f, "hook threshold {t} is not positive"),
            Violation::PowerOutOfRange(p) => write!(f, "power {p} outside (0, 1]"),
            Violation::NonPositiveScale(c) => write!(f, "log1p scale {c} is not positive"),
            Violation::SlopeCountMismatch { breakpoints, slopes } => write!(
                f,
                "{breakpoints} breakpoints need {} slopes, got {slopes}",
                breakpoints + 1
            ),
            Violation::BreakpointNotPositive { index } => {
                write!(f, "breakpoint {index} is not positive")
            }
            Violation::BreakpointsNotIncreasing { index } => {
                write!(f, "breakpoints not increasing at breakpoint {index}")
            }
            Violation::NegativeSlope { segment } => write!(f, "negative slope at segment {segment}"),
            Violation::SlopeIncrease { segment } => {
                write!(f, "slopes not non-increasing at segment {segment}")
            }
        }
    }
}

impl ConcaveFn {
    pub fn hook(t: f64) -> Self {
        ConcaveFn::Hook { t }
    }

    pub fn power(p: f64) -> Self {
        ConcaveFn::Power { p }
    }

    pub fn log1p(scale: f64) -> Self {
        ConcaveFn::Log1p { scale }
    }

    pub fn pwl(breakpoints: Vec<f64>, slopes: Vec<f64>) -> Self {
        ConcaveFn::Pwl { breakpoints, slopes }
    }

    pub fn identity() -> Self {
        ConcaveFn::Power { p: 1.0 }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if x < 0.0 || x.is_nan() {
            return Err(Error::NegativeArgument(x));
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without the sign check; callers guarantee `x >= 0`.
    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        match self {
            ConcaveFn::Hook { t } => x.min(*t),
            ConcaveFn::Power { p } => {
                if *p == 1.0 {
                    x
                } else {
                    x.powf(*p)
                }
            }
            ConcaveFn::Log1p { scale } => scale * (x / scale).ln_1p(),
            ConcaveFn::Pwl { breakpoints, slopes } => {
                let mut acc = 0.0;
                let mut left = 0.0;
                for (k, &bp) in breakpoints.iter().enumerate() {
                    if x <= bp {
                        return acc + slopes[k] * (x - left);
                    }
                    acc += slopes[k] * (bp - left);
                    left = bp;
                }
                acc + slopes[breakpoints.len()] * (x - left)
            }
        }
    }

    /// `f'(0+)`; infinite for `x^p` with `p < 1`.
    pub fn slope_at_zero(&self) -> f64 {
        match self {
            ConcaveFn::Hook { .. } | ConcaveFn::Log1p { .. } => 1.0,
            ConcaveFn::Power { p } => {
                if *p == 1.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
            ConcaveFn::Pwl { slopes, .. } => slopes[0],
        }
    }

    pub fn validate(&self) -> std::result::Result<(), Violation> {
        match self {
            ConcaveFn::Hook { t } => {
                if !t.is_finite() {
                    Err(Violation::NonFiniteParameter)
                } else if *t <= 0.0 {
                    Err(Violation::NonPositiveThreshold(*t))
                } else {
                    Ok(())
                }
            }
            ConcaveFn::Power { p } => {
                if *p > 0.0 && *p <= 1.0 {
                    Ok(())
                } else {
                    Err(Violation::PowerOutOfRange(*p))
                }
            }
            ConcaveFn::Log1p { scale } => {
                if !scale.is_finite() {
                    Err(Violation::NonFiniteParameter)
                } else if *scale <= 0.0 {
                    Err(Violation::NonPositiveScale(*scale))
                } else {
                    Ok(())
                }
            }
            ConcaveFn::Pwl { breakpoints, slopes } => validate_pwl(breakpoints, slopes),
        }
    }

    /// [`validate`](Self::validate) lifted into the crate error type.
    pub fn ensure_valid(&self) -> Result<()> {
        self.validate()
            .map_err(|v| Error::InvalidFunction(v.to_string()))
    }

    /// `c * f` for `c > 0`, staying within the same family where possible.
    pub fn scaled(&self, c: f64) -> Option<Self> {
        match self {
            ConcaveFn::Pwl { breakpoints, slopes } => Some(ConcaveFn::Pwl {
                breakpoints: breakpoints.clone(),
                slopes: slopes.iter().map(|s| s * c).collect(),
            }),
            ConcaveFn::Log1p { .. } | ConcaveFn::Hook { .. } | ConcaveFn::Power { .. } => None,
        }
    }
}

fn validate_pwl(breakpoints: &[f64], slopes: &[f64]) -> std::result::Result<(), Violation> {
    if slopes.len() != breakpoints.len() + 1 {
        return Err(Violation::SlopeCountMismatch {
            breakpoints: breakpoints.len(),
            slopes: slopes.len(),
        });
    }
    if breakpoints.iter().chain(slopes).any(|v| !v.is_finite()) {
        return Err(Violation::NonFiniteParameter);
    }
    for (k, &bp) in breakpoints.iter().enumerate() {
        if bp <= 0.0 {
            return Err(Violation::BreakpointNotPositive { index: k });
        }
        if k > 0 && bp <= breakpoints[k - 1] {
            return Err(Violation::BreakpointsNotIncreasing { index: k });
        }
    }
    for (k, &s) in slopes.iter().enumerate() {
        if k > 0 && s > slopes[k - 1] {
            return Err(Violation::SlopeIncrease { segment: k });
        }
        if s < 0.0 {
            return Err(Violation::NegativeSlope { segment: k });
        }
    }
    Ok(())
}

/// `f(x) = sum_k weight_k * min(x, t_k) + linear_tail * x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HookMeasure {
    pub atoms: Vec<HookAtom>,
    pub linear_tail: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HookAtom {
    pub t: f64,
    pub weight: f64,
}

impl HookMeasure {
    pub fn eval(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * x.min(a.t))
            .sum::<f64>()
            + self.linear_tail * x
    }
}

/// Exact hook decomposition of a piecewise-linear admissible function:
/// one atom per breakpoint with weight equal to the slope drop there, and the
/// final slope as the linear tail.
pub fn hook_decompose(f: &ConcaveFn) -> Result<HookMeasure> {
    let ConcaveFn::Pwl { breakpoints, slopes } = f else {
        return Err(Error::NotPiecewiseLinear);
    };
    f.ensure_valid()?;
    let atoms = breakpoints
        .iter()
        .enumerate()
        .map(|(k, &t)| HookAtom {
            t,
            weight: slopes[k] - slopes[k + 1],
        })
        .collect();
    Ok(HookMeasure {
        atoms,
        linear_tail: slopes[breakpoints.len()],
    })
}

/// Result of [`pwl_approximate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PwlApproximation {
    pub function: ConcaveFn,
    pub nodes: Vec<f64>,
    /// Certified upper bound on `sup |f - interpolant|` over `[0, x_max]`.
    pub sup_error: f64,
}

/// Ratio between the largest and smallest interpolation node, capped so that
/// small `B` gives power-of-two spacing.
const MAX_DYNAMIC_RANGE: f64 = (1u64 << 20) as f64;

/// Chord interpolant of `f` at `B + 1` geometric nodes ending at `x_max`.
///
/// The interpolant is linear on `[0, x_0]` through the origin and continues with
/// its last chord slope beyond `x_max`. On `[0, x_max]` it lies below `f`; the
/// reported error bounds each chord's deviation by the triangle formed with the
/// neighbouring chord slopes, which enclose the one-sided derivatives of `f`.
pub fn pwl_approximate(f: &ConcaveFn, x_max: f64, b: usize) -> Result<PwlApproximation> {
    f.ensure_valid()?;
    if !(x_max > 0.0 && x_max.is_finite()) || b == 0 {
        return Err(Error::InvalidConfig(format!(
            "pwl_approximate needs x_max > 0 and B >= 1 (got {x_max}, {b})"
        )));
    }
    let range = 2f64.powi(b.min(20) as i32).min(MAX_DYNAMIC_RANGE);
    let ratio = range.powf(1.0 / b as f64);
    let mut nodes: Vec<f64> = (0..=b)
        .map(|k| x_max / range * ratio.powi(k as i32))
        .collect();
    nodes[b] = x_max;
    // An extra chord beyond x_max bounds the left derivative at x_max.
    let beyond = x_max * ratio;

    let values: Vec<f64> = nodes.iter().map(|&x| f.eval_unchecked(x)).collect();
    let mut slopes = Vec::with_capacity(b + 1);
    slopes.push(values[0] / nodes[0]);
    for k in 1..=b {
        let s = (values[k] - values[k - 1]) / (nodes[k] - nodes[k - 1]);
        let prev = slopes[k - 1];
        slopes.push(s.clamp(0.0, prev));
    }
    let after = ((f.eval_unchecked(beyond) - values[b]) / (beyond - x_max)).clamp(0.0, slopes[b]);

    let mut sup_error: f64 = 0.0;
    for k in 0..=b {
        let width = if k == 0 { nodes[0] } else { nodes[k] - nodes[k - 1] };
        let left = if k == 0 { f.slope_at_zero() } else { slopes[k - 1] };
        let right = if k == b { after } else { slopes[k + 1] };
        sup_error = sup_error.max(chord_gap_bound(width, left, slopes[k], right));
    }

    Ok(PwlApproximation {
        function: ConcaveFn::Pwl {
            breakpoints: nodes[..b].to_vec(),
            slopes,
        },
        nodes,
        sup_error,
    })
}

/// Height of the triangle between a chord of slope `mid` and tangents of slopes
/// `left >= mid >= right` at its ends.
fn chord_gap_bound(width: f64, left: f64, mid: f64, right: f64) -> f64 {
    if left.is_infinite() {
        return width * (mid - right).max(0.0);
    }
    let spread = left - right;
    if spread <= 0.0 {
        return 0.0;
    }
    width * (left - mid).max(0.0) * (mid - right).max(0.0) / spread
}
