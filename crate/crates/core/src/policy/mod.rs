//! Patrol policies behind a common select/observe interface.

mod adaptive;
mod cucb;
mod exploit;
mod lizard;
mod zooming;

pub use adaptive::{adaptive_schedule, optimal_fixed_gap, snap_to_dyadic, AdaptiveLizard, AdaptiveSchedule};
pub use cucb::Cucb;
pub use exploit::{exploit_strategy, Exploit};
pub use lizard::Lizard;
pub use zooming::{Zooming, ZOOMING_CANDIDATES};

use std::fmt;
use std::str::FromStr;

use crate::bandit::{UcbGrid, UcbParams};
use crate::env::{EffortAssignment, HistoryLog, ObservationRecord};
use crate::error::{Error, Result};
use crate::instance::{DistanceMatrix, ProblemInstance};
use crate::mckp::{solve_mckp, MckpInstance};
use crate::reward::Discretization;

/// What a policy may know about the problem: everything except the true
/// reward functions.
#[derive(Debug, Clone)]
pub struct Planning {
    pub n_targets: usize,
    pub budget: f64,
    pub discretization: Discretization,
    pub distances: DistanceMatrix,
}

impl Planning {
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        Planning {
            n_targets: inst.n_targets(),
            budget: inst.budget(),
            discretization: inst.discretization().clone(),
            distances: inst.distances(),
        }
    }
}

pub trait Policy: Send {
    fn name(&self) -> &'static str;

    /// Effort assignment for round `t` (`t ≥ 1`).
    fn select(&mut self, t: u64) -> Result<EffortAssignment>;

    /// Feedback for the assignment returned by the last `select`.
    fn observe(
        &mut self,
        t: u64,
        assignment: &EffortAssignment,
        records: &[ObservationRecord],
    ) -> Result<()>;

    /// Bound table used for the last selection, if the policy keeps one.
    fn ucb_snapshot(&self) -> Option<&UcbGrid> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    Lizard,
    LizardAdaptive,
    Cucb,
    Zooming,
    Exploit,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] = [
        PolicyKind::Lizard,
        PolicyKind::LizardAdaptive,
        PolicyKind::Cucb,
        PolicyKind::Zooming,
        PolicyKind::Exploit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Lizard => "lizard",
            PolicyKind::LizardAdaptive => "lizard-adaptive",
            PolicyKind::Cucb => "cucb",
            PolicyKind::Zooming => "zooming",
            PolicyKind::Exploit => "exploit",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown policy `{s}`")))
    }
}

/// Everything needed to instantiate any policy.
#[derive(Debug, Clone)]
pub struct PolicySetup<'a> {
    pub planning: &'a Planning,
    pub params: UcbParams,
    pub history: &'a HistoryLog,
    /// Horizon, used to cap the adaptive schedule.
    pub horizon: u64,
    /// Seed for policies that randomize (zooming).
    pub seed: u64,
}

pub fn build_policy(kind: PolicyKind, setup: &PolicySetup<'_>) -> Result<Box<dyn Policy>> {
    setup.params.validate()?;
    Ok(match kind {
        PolicyKind::Lizard => Box::new(Lizard::new(
            setup.planning.clone(),
            setup.params,
            setup.history,
        )?),
        PolicyKind::LizardAdaptive => Box::new(AdaptiveLizard::new(
            setup.planning.clone(),
            setup.params,
            setup.history,
            setup.horizon,
        )),
        PolicyKind::Cucb => Box::new(Cucb::new(
            setup.planning.clone(),
            setup.params.radius,
            setup.params.history_counting,
            setup.history,
        )?),
        PolicyKind::Zooming => Box::new(Zooming::new(
            setup.planning.n_targets,
            setup.planning.budget,
            setup.params.lipschitz_constant,
            setup.params.radius,
            setup.seed,
        )),
        PolicyKind::Exploit => Box::new(Exploit::new(exploit_strategy(
            setup.history,
            setup.planning,
        )?)),
    })
}

/// Solves the knapsack over a bound table and maps levels back to efforts.
pub(crate) fn select_super_arm(
    values: &UcbGrid,
    grid: &Discretization,
    budget: f64,
) -> Result<EffortAssignment> {
    let m = MckpInstance::from_grid(values.rows(), grid.levels(), budget)?;
    Ok(EffortAssignment::from_levels(solve_mckp(&m).levels, grid))
}
