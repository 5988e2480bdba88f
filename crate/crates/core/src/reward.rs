//! Reward functions, effort grids and target features.
//!
//! A target's expected detection probability is a monotone piecewise-linear
//! function of the patrol effort spent on it, anchored at zero effort.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used when comparing effort values.
pub const EFFORT_TOL: f64 = 1e-9;

/// Default effort step for [`reward_sup_distance`].
pub const DEFAULT_SUP_GRID_STEP: f64 = 0.01;

/// Static per-target covariates, normalized per dimension to `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Self {
        FeatureVector(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Euclidean distance between two feature vectors.
pub fn feature_distance(a: &FeatureVector, b: &FeatureVector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "feature length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.0
        .iter()
        .zip(&b.0)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Expected reward of a single target as a function of effort.
///
/// Knots are `(effort, value)` pairs. A valid function starts at `(0, 0)`,
/// ends at effort 1, has strictly increasing efforts and non-decreasing
/// values in `[0, 1]`. Values between knots are linearly interpolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PiecewiseLinearReward {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinearReward {
    /// Builds a reward function, rejecting knots that break any invariant.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        let f = PiecewiseLinearReward { knots };
        let problems = f.violations();
        if problems.is_empty() {
            Ok(f)
        } else {
            Err(Error::InvalidArgument(problems.join("; ")))
        }
    }

    /// Builds a reward function without checking it. Used when loading
    /// instance files so that [`crate::instance::validate_instance`] can
    /// report every problem at once.
    pub fn from_knots_unchecked(knots: Vec<(f64, f64)>) -> Self {
        PiecewiseLinearReward { knots }
    }

    /// Straight line through the origin reaching `value_at_one` at full effort.
    pub fn linear(value_at_one: f64) -> Result<Self> {
        Self::new(vec![(0.0, 0.0), (1.0, value_at_one)])
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Every invariant this function breaks, as human-readable messages.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let Some(&(e0, v0)) = self.knots.first() else {
            out.push("reward has no knots".to_string());
            return out;
        };
        if self.knots.len() < 2 {
            out.push("reward needs at least two knots".to_string());
        }
        if e0.abs() > EFFORT_TOL || v0.abs() > EFFORT_TOL {
            out.push(format!("μ(0) ≠ 0: first knot is ({e0}, {v0})"));
        }
        let (e_last, _) = *self.knots.last().unwrap();
        if (e_last - 1.0).abs() > EFFORT_TOL {
            out.push(format!("last knot effort is {e_last}, expected 1"));
        }
        for (k, &(e, v)) in self.knots.iter().enumerate() {
            if !e.is_finite() || !v.is_finite() {
                out.push(format!("knot {k} is not finite"));
                continue;
            }
            if !(-EFFORT_TOL..=1.0 + EFFORT_TOL).contains(&e) {
                out.push(format!("knot {k} effort {e} outside [0, 1]"));
            }
            if !(-EFFORT_TOL..=1.0 + EFFORT_TOL).contains(&v) {
                out.push(format!("knot {k} value {v} outside [0, 1]"));
            }
        }
        for (k, w) in self.knots.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                out.push(format!(
                    "knot efforts not strictly increasing at knot {}",
                    k + 1
                ));
            }
            if w[1].1 < w[0].1 {
                out.push(format!(
                    "monotonicity: value decreases from {} to {} at knot {}",
                    w[0].1,
                    w[1].1,
                    k + 1
                ));
            }
        }
        out
    }

    /// Expected reward at `effort`, which must lie in `[0, 1]`.
    pub fn evaluate(&self, effort: f64) -> Result<f64> {
        if !(-EFFORT_TOL..=1.0 + EFFORT_TOL).contains(&effort) {
            return Err(Error::Domain(format!("effort {effort} outside [0, 1]")));
        }
        Ok(self.eval_clamped(effort.clamp(0.0, 1.0)))
    }

    pub(crate) fn eval_clamped(&self, effort: f64) -> f64 {
        let knots = &self.knots;
        // first knot with effort strictly above the query
        let idx = knots.partition_point(|&(e, _)| e <= effort);
        if idx > 0 && (effort - knots[idx - 1].0).abs() <= EFFORT_TOL {
            return knots[idx - 1].1;
        }
        if idx < knots.len() && (knots[idx].0 - effort).abs() <= EFFORT_TOL {
            return knots[idx].1;
        }
        if idx == 0 {
            return knots[0].1;
        }
        if idx == knots.len() {
            return knots[idx - 1].1;
        }
        let (e0, v0) = knots[idx - 1];
        let (e1, v1) = knots[idx];
        v0 + (v1 - v0) * (effort - e0) / (e1 - e0)
    }

    /// Largest slope among the linear pieces.
    pub fn max_slope(&self) -> f64 {
        self.knots
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .fold(0.0, f64::max)
    }
}

/// Maximum absolute difference between two reward functions over the effort
/// grid `{0, step, 2·step, …, 1}` together with every knot of either function.
///
/// Both functions are linear between consecutive points of that set, so the
/// scan is exact.
pub fn reward_sup_distance(
    f: &PiecewiseLinearReward,
    g: &PiecewiseLinearReward,
    grid_step: f64,
) -> Result<f64> {
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "grid step must be positive, got {grid_step}"
        )));
    }
    let steps = (1.0 / grid_step + EFFORT_TOL).floor() as usize;
    let grid = (0..=steps)
        .map(|k| (k as f64 * grid_step).min(1.0))
        .chain(std::iter::once(1.0));
    let knots = f.knots.iter().chain(&g.knots).map(|&(e, _)| e.clamp(0.0, 1.0));
    Ok(grid
        .chain(knots)
        .map(|b| (f.eval_clamped(b) - g.eval_clamped(b)).abs())
        .fold(0.0, f64::max))
}

/// The set of effort levels a policy may assign to one target.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    levels: Vec<f64>,
}

impl Discretization {
    /// Uniform dyadic grid `{0, gap, 2·gap, …, 1}` where `gap = 2^-k`.
    pub fn from_gap(gap: f64) -> Result<Self> {
        let k = dyadic_exponent(gap)?;
        let count = 1usize << k;
        let levels = (0..=count).map(|j| j as f64 / count as f64).collect();
        Ok(Discretization { levels })
    }

    /// Arbitrary grid; must contain 0 and 1 and be strictly increasing.
    pub fn from_levels(levels: Vec<f64>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::InvalidArgument(
                "discretization needs at least the levels 0 and 1".into(),
            ));
        }
        if levels[0].abs() > EFFORT_TOL || (levels[levels.len() - 1] - 1.0).abs() > EFFORT_TOL {
            return Err(Error::InvalidArgument(
                "discretization must start at 0 and end at 1".into(),
            ));
        }
        if levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "discretization levels must be strictly increasing".into(),
            ));
        }
        Ok(Discretization { levels })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Number of levels including zero.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn value(&self, level: usize) -> f64 {
        self.levels[level]
    }

    /// Smallest spacing between consecutive levels.
    pub fn min_gap(&self) -> f64 {
        self.levels
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Index of the level equal to `effort` (within [`EFFORT_TOL`]).
    pub fn index_of(&self, effort: f64) -> Option<usize> {
        self.levels
            .iter()
            .position(|&l| (l - effort).abs() <= EFFORT_TOL)
    }
}

/// Returns `k` such that `gap == 2^-k`.
pub fn dyadic_exponent(gap: f64) -> Result<u32> {
    if !(gap > 0.0 && gap <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "gap {gap} is not a dyadic fraction of 1"
        )));
    }
    let k = (1.0 / gap).log2().round();
    if k > 30.0 || (gap - 2f64.powi(-(k as i32))).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "gap {gap} is not a dyadic fraction of 1"
        )));
    }
    Ok(k as u32)
}
