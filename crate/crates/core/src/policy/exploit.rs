use super::{select_super_arm, Planning, Policy};
use crate::bandit::UcbGrid;
use crate::env::{EffortAssignment, HistoryLog, ObservationRecord};
use crate::error::{Error, Result};
use crate::reward::EFFORT_TOL;

/// Static plan built once from historical means; arms never seen in the
/// history are valued at zero.
pub fn exploit_strategy(history: &HistoryLog, planning: &Planning) -> Result<EffortAssignment> {
    let grid = &planning.discretization;
    let levels = grid.len();
    let mut counts = vec![(0u64, 0u64); planning.n_targets * levels];
    for r in &history.records {
        if r.target >= planning.n_targets {
            return Err(Error::ContractViolation(format!(
                "history record for unknown target {}",
                r.target
            )));
        }
        if r.effort <= EFFORT_TOL {
            continue;
        }
        let level = grid.index_of(r.effort).ok_or_else(|| {
            Error::ContractViolation(format!("history effort {} is off the grid", r.effort))
        })?;
        let c = &mut counts[r.target * levels + level];
        c.0 += 1;
        c.1 += r.outcome as u64;
    }
    let rows = counts
        .chunks(levels)
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, &(n, hits))| if j == 0 || n == 0 { 0.0 } else { hits as f64 / n as f64 })
                .collect()
        })
        .collect();
    select_super_arm(&UcbGrid::from_rows(rows), grid, planning.budget)
}

/// Plays the same assignment every round.
#[derive(Debug, Clone)]
pub struct Exploit {
    assignment: EffortAssignment,
}

impl Exploit {
    pub fn new(assignment: EffortAssignment) -> Self {
        Exploit { assignment }
    }

    pub fn assignment(&self) -> &EffortAssignment {
        &self.assignment
    }
}

impl Policy for Exploit {
    fn name(&self) -> &'static str {
        "exploit"
    }

    fn select(&mut self, _t: u64) -> Result<EffortAssignment> {
        Ok(self.assignment.clone())
    }

    fn observe(&mut self, _t: u64, _a: &EffortAssignment, _records: &[ObservationRecord]) -> Result<()> {
        Ok(())
    }
}
