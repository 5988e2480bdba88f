use super::{select_super_arm, Planning, Policy};
use crate::bandit::{ucb_table, StatTable, UcbGrid, UcbParams};
use crate::env::{EffortAssignment, HistoryLog, ObservationRecord};
use crate::error::Result;

/// Fixed-grid LIZARD: Lipschitz UCB table, then an exact knapsack over it.
#[derive(Debug, Clone)]
pub struct Lizard {
    planning: Planning,
    params: UcbParams,
    table: StatTable,
    last_ucb: Option<UcbGrid>,
}

impl Lizard {
    pub fn new(planning: Planning, params: UcbParams, history: &HistoryLog) -> Result<Self> {
        let mut table = StatTable::new(planning.n_targets, planning.discretization.clone());
        table.warm_start(history)?;
        Ok(Lizard {
            planning,
            params,
            table,
            last_ucb: None,
        })
    }

    pub fn table(&self) -> &StatTable {
        &self.table
    }

    pub fn params(&self) -> &UcbParams {
        &self.params
    }

    /// Computes the bound table for round `t` and picks the best super arm.
    pub fn lizard_step(&mut self, t: u64) -> Result<EffortAssignment> {
        let ucb = ucb_table(&self.table, &self.planning.distances, t, &self.params);
        let choice = select_super_arm(&ucb, self.table.grid(), self.planning.budget)?;
        self.last_ucb = Some(ucb);
        Ok(choice)
    }
}

impl Policy for Lizard {
    fn name(&self) -> &'static str {
        "lizard"
    }

    fn select(&mut self, t: u64) -> Result<EffortAssignment> {
        self.lizard_step(t)
    }

    fn observe(&mut self, _t: u64, _a: &EffortAssignment, records: &[ObservationRecord]) -> Result<()> {
        self.table.update(records)
    }

    fn ucb_snapshot(&self) -> Option<&UcbGrid> {
        self.last_ucb.as_ref()
    }
}
