use super::{select_super_arm, Planning, Policy};
use crate::bandit::{self_ucb, HistoryCounting, RadiusMode, StatTable, UcbGrid, UcbParams};
use crate::env::{EffortAssignment, HistoryLog, ObservationRecord};
use crate::error::Result;

/// Combinatorial UCB: every arm is scored by its own bound only.
#[derive(Debug, Clone)]
pub struct Cucb {
    planning: Planning,
    params: UcbParams,
    table: StatTable,
    last_ucb: Option<UcbGrid>,
}

impl Cucb {
    pub fn new(
        planning: Planning,
        radius: RadiusMode,
        history_counting: HistoryCounting,
        history: &HistoryLog,
    ) -> Result<Self> {
        let mut table = StatTable::new(planning.n_targets, planning.discretization.clone());
        table.warm_start(history)?;
        let params = UcbParams {
            history_counting,
            ..UcbParams::independent(radius)
        };
        Ok(Cucb {
            planning,
            params,
            table,
            last_ucb: None,
        })
    }

    pub fn table(&self) -> &StatTable {
        &self.table
    }

    pub fn cucb_step(&mut self, t: u64) -> Result<EffortAssignment> {
        let n = self.table.n_targets();
        let levels = self.table.grid().len();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                std::iter::once(0.0)
                    .chain((1..levels).map(|j| self_ucb(self.table.arm(i, j), t, &self.params)))
                    .collect()
            })
            .collect();
        let ucb = UcbGrid::from_rows(rows);
        let choice = select_super_arm(&ucb, self.table.grid(), self.planning.budget)?;
        self.last_ucb = Some(ucb);
        Ok(choice)
    }
}

impl Policy for Cucb {
    fn name(&self) -> &'static str {
        "cucb"
    }

    fn select(&mut self, t: u64) -> Result<EffortAssignment> {
        self.cucb_step(t)
    }

    fn observe(&mut self, _t: u64, _a: &EffortAssignment, records: &[ObservationRecord]) -> Result<()> {
        self.table.update(records)
    }

    fn ucb_snapshot(&self) -> Option<&UcbGrid> {
        self.last_ucb.as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{generate_synthetic_instance, sample_round, SyntheticSpec};
    use crate::instance::ProblemInstance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_target_instance() -> ProblemInstance {
        let spec = SyntheticSpec {
            n_targets: 2,
            budget: 1.0,
            gap: 0.5,
            ..SyntheticSpec::default()
        };
        generate_synthetic_instance(&spec, 21).unwrap()
    }

    #[test]
    fn unpulled_arms_are_tried_first() {
        let inst = two_target_instance();
        let mut p = Cucb::new(
            Planning::from_instance(&inst),
            RadiusMode::Epsilon(0.1),
            HistoryCounting::SinglePull,
            &HistoryLog::default(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // four arms; each round can hold two half-effort arms or one full-effort arm
        for t in 1..=3 {
            let a = p.select(t).unwrap();
            let obs = sample_round(&inst, &a, &mut rng, t as i64).unwrap();
            p.observe(t, &a, &obs).unwrap();
        }
        for i in 0..2 {
            for j in 1..3 {
                assert_eq!(p.table().arm(i, j).online_pulls, 1, "arm ({i}, {j})");
            }
        }
    }

    #[test]
    fn long_run_means_are_consistent() {
        let inst = two_target_instance();
        let mut p = Cucb::new(
            Planning::from_instance(&inst),
            RadiusMode::Epsilon(0.1),
            HistoryCounting::SinglePull,
            &HistoryLog::default(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for t in 1..=10_000 {
            let a = p.select(t).unwrap();
            let obs = sample_round(&inst, &a, &mut rng, t as i64).unwrap();
            p.observe(t, &a, &obs).unwrap();
        }
        let grid = inst.discretization();
        let mut checked = 0;
        for i in 0..2 {
            for j in 1..grid.len() {
                let arm = p.table().arm(i, j);
                if arm.online_pulls >= 100 {
                    let truth = inst.reward(i).evaluate(grid.value(j)).unwrap();
                    let mean = arm.mean(HistoryCounting::SinglePull).unwrap();
                    assert!((mean - truth).abs() < 0.05, "arm ({i}, {j}): {mean} vs {truth}");
                    checked += 1;
                }
            }
        }
        assert!(checked >= 1);
    }
}
