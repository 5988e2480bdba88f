//! Stochastic patrol simulator.
//!
//! Patrolling target `i` with effort `β_i` detects an attack with
//! probability `μ_i(β_i)`, independently across targets. The expected reward
//! of a whole assignment is the sum of the per-target expectations.

mod history;
mod optimal;
mod synthetic;

pub use history::{generate_historical_data, HistoryLog};
pub use optimal::{compute_optimal, default_optimal_grid_step, OptimalPlan};
pub use synthetic::{generate_synthetic_instance, SyntheticSpec, DEFAULT_GAP};

use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::ProblemInstance;
use crate::reward::{Discretization, EFFORT_TOL};

/// One effort value per target (a super arm).
///
/// Grid-based policies also record the level index of each effort in the
/// grid they planned on; continuous policies leave `levels` empty.
#[derive(Debug, Clone, PartialEq)]
pub struct EffortAssignment {
    efforts: Vec<f64>,
    levels: Option<Vec<usize>>,
}

impl EffortAssignment {
    pub fn from_levels(levels: Vec<usize>, grid: &Discretization) -> Self {
        EffortAssignment {
            efforts: levels.iter().map(|&j| grid.value(j)).collect(),
            levels: Some(levels),
        }
    }

    pub fn continuous(efforts: Vec<f64>) -> Self {
        EffortAssignment {
            efforts,
            levels: None,
        }
    }

    /// No effort anywhere.
    pub fn idle(n_targets: usize) -> Self {
        EffortAssignment {
            efforts: vec![0.0; n_targets],
            levels: Some(vec![0; n_targets]),
        }
    }

    pub fn efforts(&self) -> &[f64] {
        &self.efforts
    }

    pub fn levels(&self) -> Option<&[usize]> {
        self.levels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.efforts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.efforts.is_empty()
    }

    pub fn total_effort(&self) -> f64 {
        self.efforts.iter().sum()
    }

    /// Every effort in `[0, 1]` and the total within `budget`.
    pub fn is_feasible(&self, budget: f64) -> bool {
        self.efforts
            .iter()
            .all(|&e| (-EFFORT_TOL..=1.0 + EFFORT_TOL).contains(&e))
            && self.total_effort() <= budget + EFFORT_TOL
    }

    fn check(&self, inst: &ProblemInstance) -> Result<()> {
        if self.len() != inst.n_targets() {
            return Err(Error::ContractViolation(format!(
                "assignment covers {} targets, instance has {}",
                self.len(),
                inst.n_targets()
            )));
        }
        if !self.is_feasible(inst.budget()) {
            return Err(Error::ContractViolation(format!(
                "assignment uses effort {} over budget {}",
                self.total_effort(),
                inst.budget()
            )));
        }
        Ok(())
    }
}

/// A single Bernoulli patrol outcome.
///
/// Records carry the effort value itself rather than a grid index, so logs
/// stay meaningful when the planning grid changes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationRecord {
    /// Online rounds start at 1; historical records use negative timesteps.
    pub timestep: i64,
    pub target: usize,
    pub effort: f64,
    pub outcome: bool,
}

/// Draws one outcome per target for the given assignment.
///
/// Exactly one uniform draw is consumed per target regardless of effort, so
/// the random stream stays aligned across policies.
pub fn sample_round<R: Rng + ?Sized>(
    inst: &ProblemInstance,
    assignment: &EffortAssignment,
    rng: &mut R,
    timestep: i64,
) -> Result<Vec<ObservationRecord>> {
    assignment.check(inst)?;
    Ok(assignment
        .efforts
        .iter()
        .enumerate()
        .map(|(target, &effort)| {
            let p = inst.reward(target).eval_clamped(effort.clamp(0.0, 1.0));
            let u: f64 = rng.random();
            ObservationRecord {
                timestep,
                target,
                effort,
                outcome: u < p,
            }
        })
        .collect())
}

/// Exact expected reward `Σ_i μ_i(β_i)`.
pub fn expected_reward(inst: &ProblemInstance, assignment: &EffortAssignment) -> f64 {
    debug_assert_eq!(assignment.len(), inst.n_targets());
    assignment
        .efforts
        .iter()
        .enumerate()
        .map(|(i, &e)| inst.reward(i).eval_clamped(e.clamp(0.0, 1.0)))
        .sum()
}
