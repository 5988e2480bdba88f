use super::{select_super_arm, Planning, Policy};
use crate::bandit::{ucb_table, StatTable, UcbGrid, UcbParams};
use crate::env::{EffortAssignment, HistoryLog, ObservationRecord};
use crate::error::Result;
use crate::reward::Discretization;

/// Phase lengths `T_k` and grid gaps `2^-k` for adaptive refinement.
///
/// Phase `k` covers rounds `(Σ_{j<k} T_j, Σ_{j≤k} T_j]`. After the last
/// phase the final gap stays in force.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveSchedule {
    pub phase_lengths: Vec<u64>,
    pub gaps: Vec<f64>,
}

impl AdaptiveSchedule {
    /// Gap in force at round `t` (`t ≥ 1`).
    pub fn gap_at(&self, t: u64) -> f64 {
        let mut end = 0u64;
        for (k, &len) in self.phase_lengths.iter().enumerate() {
            end += len;
            if t <= end {
                return self.gaps[k];
            }
        }
        *self.gaps.last().expect("schedule has at least one gap")
    }

    pub fn final_gap(&self) -> f64 {
        *self.gaps.last().expect("schedule has at least one gap")
    }
}

/// `T_k = ceil(x ln x)` with `x = N / (L² 2^{3k})`, for every `k` with
/// `x > e`, stopping early once the phases cover `max_t` rounds.
pub fn adaptive_schedule(n_targets: usize, lipschitz: f64, max_t: u64) -> AdaptiveSchedule {
    let mut phase_lengths = Vec::new();
    let mut gaps = Vec::new();
    let mut covered = 0u64;
    for k in 0..30 {
        let x = n_targets as f64 / (lipschitz * lipschitz * 2f64.powi(3 * k));
        if !(x > std::f64::consts::E) {
            break;
        }
        let len = (x * x.ln()).ceil() as u64;
        phase_lengths.push(len);
        gaps.push(0.5f64.powi(k));
        covered += len;
        if covered >= max_t {
            break;
        }
    }
    if gaps.is_empty() {
        gaps.push(1.0);
    }
    AdaptiveSchedule {
        phase_lengths,
        gaps,
    }
}

/// Gap balancing discretization error against selection error for a
/// fixed horizon: `(ln T / T)^{1/3} N^{1/3} L^{-2/3}`.
pub fn optimal_fixed_gap(n_targets: usize, lipschitz: f64, horizon: u64) -> f64 {
    let t = horizon.max(2) as f64;
    (t.ln() / t).cbrt() * (n_targets as f64).cbrt() * lipschitz.powf(-2.0 / 3.0)
}

/// Nearest dyadic gap `2^-k ≤ 1` in log scale.
pub fn snap_to_dyadic(gap: f64) -> f64 {
    let k = (-gap.log2()).round().clamp(0.0, 30.0);
    0.5f64.powi(k as i32)
}

/// LIZARD on a grid that is refined on a fixed schedule.
///
/// Statistics survive refinement because each dyadic grid contains the
/// previous one; new levels start without online pulls. The confidence
/// radius uses the global round counter.
#[derive(Debug, Clone)]
pub struct AdaptiveLizard {
    planning: Planning,
    params: UcbParams,
    schedule: AdaptiveSchedule,
    history: HistoryLog,
    table: StatTable,
    phase: usize,
    last_ucb: Option<UcbGrid>,
}

impl AdaptiveLizard {
    pub fn new(planning: Planning, params: UcbParams, history: &HistoryLog, horizon: u64) -> Self {
        let schedule = adaptive_schedule(planning.n_targets, params.lipschitz_constant, horizon);
        let grid = Discretization::from_gap(schedule.gaps[0]).expect("schedule gaps are dyadic");
        let mut table = StatTable::new(planning.n_targets, grid);
        table.warm_start_on_grid(history);
        AdaptiveLizard {
            planning,
            params,
            schedule,
            history: history.clone(),
            table,
            phase: 0,
            last_ucb: None,
        }
    }

    pub fn schedule(&self) -> &AdaptiveSchedule {
        &self.schedule
    }

    pub fn table(&self) -> &StatTable {
        &self.table
    }

    pub fn phase(&self) -> usize {
        self.phase
    }

    pub fn lizard_adaptive_step(&mut self, t: u64) -> Result<EffortAssignment> {
        let gap = self.schedule.gap_at(t);
        if (gap - self.table.grid().min_gap()).abs() > 1e-12 {
            let grid = Discretization::from_gap(gap)?;
            self.table = self.table.refined(grid, &self.history);
            self.phase = self
                .schedule
                .gaps
                .iter()
                .position(|&g| g == gap)
                .unwrap_or(self.phase);
        }
        let ucb = ucb_table(&self.table, &self.planning.distances, t, &self.params);
        let choice = select_super_arm(&ucb, self.table.grid(), self.planning.budget)?;
        self.last_ucb = Some(ucb);
        Ok(choice)
    }
}

impl Policy for AdaptiveLizard {
    fn name(&self) -> &'static str {
        "lizard-adaptive"
    }

    fn select(&mut self, t: u64) -> Result<EffortAssignment> {
        self.lizard_adaptive_step(t)
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
    use crate::bandit::RadiusMode;
    use crate::env::{generate_synthetic_instance, sample_round, SyntheticSpec};
    use crate::policy::Lizard;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn schedule_values() {
        let s = adaptive_schedule(25, 1.0, 10_000);
        // ceil(25 ln 25) and ceil(3.125 ln 3.125)
        assert_eq!(s.phase_lengths, vec![81, 4]);
        assert_eq!(s.gaps, vec![1.0, 0.5]);
        assert_eq!(s.gap_at(1), 1.0);
        assert_eq!(s.gap_at(81), 1.0);
        assert_eq!(s.gap_at(82), 0.5);
        assert_eq!(s.gap_at(500), 0.5);
    }

    #[test]
    fn degenerate_schedule_keeps_unit_gap() {
        let s = adaptive_schedule(1, 1.0, 100);
        assert!(s.phase_lengths.is_empty());
        assert_eq!(s.gaps, vec![1.0]);
        assert_eq!(s.gap_at(57), 1.0);
    }

    #[test]
    fn schedule_stops_at_horizon() {
        let s = adaptive_schedule(10_000, 1.0, 50);
        assert_eq!(s.phase_lengths.len(), 1);
        let s = adaptive_schedule(10_000, 1.0, 1_000_000);
        assert!(s.phase_lengths.len() >= 3);
        assert!(s.phase_lengths.windows(2).all(|w| w[1] < w[0]));
        assert!(s.gaps.windows(2).all(|w| w[1] == w[0] / 2.0));
    }

    #[test]
    fn fixed_gap_formula() {
        let g = optimal_fixed_gap(25, 1.0, 500);
        let expect = (500f64.ln() / 500.0).cbrt() * 25f64.cbrt();
        assert!((g - expect).abs() < 1e-12);
        assert_eq!(snap_to_dyadic(g), 0.5);
        assert_eq!(snap_to_dyadic(0.3), 0.25);
        assert_eq!(snap_to_dyadic(3.0), 1.0);
    }

    #[test]
    fn phases_refine_grid_and_keep_stats() {
        let spec = SyntheticSpec::default();
        let inst = generate_synthetic_instance(&spec, 8).unwrap();
        let planning = Planning::from_instance(&inst);
        let params = UcbParams::lizard(RadiusMode::Epsilon(0.1), 1.0);
        let mut adaptive = AdaptiveLizard::new(planning.clone(), params, &HistoryLog::default(), 500);
        let mut fixed = Lizard::new(
            Planning {
                discretization: Discretization::from_gap(1.0).unwrap(),
                ..planning
            },
            params,
            &HistoryLog::default(),
        )
        .unwrap();
        let mut rng_a = ChaCha8Rng::seed_from_u64(8);
        let mut rng_b = ChaCha8Rng::seed_from_u64(8);
        for t in 1..=81 {
            let a = adaptive.select(t).unwrap();
            let b = fixed.select(t).unwrap();
            assert_eq!(a, b, "round {t}");
            let oa = sample_round(&inst, &a, &mut rng_a, t as i64).unwrap();
            let ob = sample_round(&inst, &b, &mut rng_b, t as i64).unwrap();
            adaptive.observe(t, &a, &oa).unwrap();
            fixed.observe(t, &b, &ob).unwrap();
        }
        assert_eq!(adaptive.phase(), 0);
        let a = adaptive.select(82).unwrap();
        assert!(a.total_effort() <= inst.budget() + 1e-9);
        assert_eq!(adaptive.phase(), 1);
        assert_eq!(adaptive.table().grid().levels(), &[0.0, 0.5, 1.0]);
        for i in 0..inst.n_targets() {
            assert_eq!(adaptive.table().arm(i, 2), fixed.table().arm(i, 1));
            assert_eq!(adaptive.table().arm(i, 1).online_pulls, 0);
        }
    }
}
