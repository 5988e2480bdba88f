//! Arm statistics and upper confidence bounds.
//!
//! An arm is a `(target, nonzero effort level)` pair. Each arm has its own
//! optimistic estimate (`self_ucb`). The Lipschitz table then tightens every
//! arm's bound with the bounds of all other arms:
//!
//! ```text
//! UCB(i, j) = min over (u, v) of  selfUCB(u, v) + L · slack(v → j) + L · D(i, u)
//! ```
//!
//! where `slack` measures how far apart the two effort levels are and `D` is
//! the distance between targets. Zero effort always has a bound of zero.

use crate::env::{HistoryLog, ObservationRecord};
use crate::error::{Error, Result};
use crate::instance::DistanceMatrix;
use crate::reward::{Discretization, EFFORT_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusMode {
    /// `sqrt(3 ln t / 2n)`
    Theory,
    /// `sqrt(ε / 2n)`, independent of `t`.
    Epsilon(f64),
}

/// Direction of the zero-slack bound under monotonicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SlackDirection {
    /// `max(0, ψ_j − ψ_v)`: an arm caps every lower-effort arm of the same
    /// target at no extra cost. Sound for non-decreasing rewards.
    #[default]
    Monotone,
    /// `max(0, ψ_v − ψ_j)`: the reversed form, kept for comparison only.
    Reversed,
}

/// How historical pulls enter an arm's pull count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HistoryCounting {
    /// All history for an arm counts as one pull returning its average.
    #[default]
    SinglePull,
    /// Every historical pull counts as if it were online. Exists to
    /// reproduce the short-term failure mode of naive warm starts.
    AllPulls,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UcbParams {
    pub radius: RadiusMode,
    pub lipschitz_constant: f64,
    pub use_monotonicity: bool,
    pub use_zero_anchor: bool,
    pub use_cross_target: bool,
    pub slack_direction: SlackDirection,
    pub history_counting: HistoryCounting,
}

impl UcbParams {
    /// Every structural assumption switched on.
    pub fn lizard(radius: RadiusMode, lipschitz_constant: f64) -> Self {
        UcbParams {
            radius,
            lipschitz_constant,
            use_monotonicity: true,
            use_zero_anchor: true,
            use_cross_target: true,
            slack_direction: SlackDirection::Monotone,
            history_counting: HistoryCounting::SinglePull,
        }
    }

    /// No sharing between arms at all: the table reduces to the self bounds.
    pub fn independent(radius: RadiusMode) -> Self {
        UcbParams {
            radius,
            lipschitz_constant: f64::INFINITY,
            use_monotonicity: false,
            use_zero_anchor: false,
            use_cross_target: false,
            slack_direction: SlackDirection::Monotone,
            history_counting: HistoryCounting::SinglePull,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let RadiusMode::Epsilon(eps) = self.radius {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "epsilon must be finite and positive, got {eps}"
                )));
            }
        }
        if !(self.lipschitz_constant > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lipschitz constant must be positive, got {}",
                self.lipschitz_constant
            )));
        }
        Ok(())
    }
}

/// Historical summary attached to an arm by [`StatTable::warm_start`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarmStart {
    pub mean: f64,
    pub pulls: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ArmStats {
    pub online_pulls: u64,
    pub cumulative_reward: f64,
    pub warm: Option<WarmStart>,
}

impl ArmStats {
    /// Pull count used by the confidence radius.
    pub fn radius_pulls(&self, counting: HistoryCounting) -> u64 {
        self.online_pulls
            + match (self.warm, counting) {
                (None, _) => 0,
                (Some(_), HistoryCounting::SinglePull) => 1,
                (Some(w), HistoryCounting::AllPulls) => w.pulls,
            }
    }

    /// Empirical mean, or `None` for an arm with no data at all.
    pub fn mean(&self, counting: HistoryCounting) -> Option<f64> {
        let pulls = self.radius_pulls(counting);
        if pulls == 0 {
            return None;
        }
        let warm_total = match (self.warm, counting) {
            (None, _) => 0.0,
            (Some(w), HistoryCounting::SinglePull) => w.mean,
            (Some(w), HistoryCounting::AllPulls) => w.mean * w.pulls as f64,
        };
        Some((self.cumulative_reward + warm_total) / pulls as f64)
    }
}

/// Confidence radius of an arm at round `t` (`t ≥ 1`); `+inf` when unpulled.
pub fn confidence_radius(stats: &ArmStats, t: u64, params: &UcbParams) -> f64 {
    radius_value(
        params.radius,
        t.max(1) as f64,
        stats.radius_pulls(params.history_counting),
    )
}

pub(crate) fn radius_value(mode: RadiusMode, t: f64, pulls: u64) -> f64 {
    if pulls == 0 {
        return f64::INFINITY;
    }
    let n = pulls as f64;
    match mode {
        RadiusMode::Theory => (3.0 * t.ln() / (2.0 * n)).sqrt(),
        RadiusMode::Epsilon(eps) => (eps / (2.0 * n)).sqrt(),
    }
}

/// Mean plus radius, from the arm's own observations only.
pub fn self_ucb(stats: &ArmStats, t: u64, params: &UcbParams) -> f64 {
    match stats.mean(params.history_counting) {
        None => f64::INFINITY,
        Some(mean) => mean + confidence_radius(stats, t, params),
    }
}

/// Per-arm statistics for `N` targets and the nonzero levels of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StatTable {
    n_targets: usize,
    grid: Discretization,
    stats: Vec<ArmStats>,
}

impl StatTable {
    pub fn new(n_targets: usize, grid: Discretization) -> Self {
        let tracked = grid.len() - 1;
        StatTable {
            n_targets,
            grid,
            stats: vec![ArmStats::default(); n_targets * tracked],
        }
    }

    pub fn n_targets(&self) -> usize {
        self.n_targets
    }

    pub fn grid(&self) -> &Discretization {
        &self.grid
    }

    /// Number of tracked (nonzero) levels.
    pub fn tracked_levels(&self) -> usize {
        self.grid.len() - 1
    }

    /// Statistics of `(target, level)`; `level` indexes the grid and must be ≥ 1.
    pub fn arm(&self, target: usize, level: usize) -> &ArmStats {
        assert!(level >= 1, "level 0 is not tracked");
        &self.stats[target * self.tracked_levels() + level - 1]
    }

    fn arm_mut(&mut self, target: usize, level: usize) -> &mut ArmStats {
        let idx = target * self.tracked_levels() + level - 1;
        &mut self.stats[idx]
    }

    /// Grid level of a record, `Ok(None)` for zero effort.
    fn locate(&self, r: &ObservationRecord) -> Result<Option<usize>> {
        if r.target >= self.n_targets {
            return Err(Error::ContractViolation(format!(
                "record for unknown target {}",
                r.target
            )));
        }
        if r.effort.abs() <= EFFORT_TOL {
            return Ok(None);
        }
        match self.grid.index_of(r.effort) {
            Some(level) => Ok(Some(level)),
            None => Err(Error::ContractViolation(format!(
                "effort {} is not a level of the current grid",
                r.effort
            ))),
        }
    }

    /// Adds one online round of observations. Zero-effort records are ignored.
    pub fn update(&mut self, records: &[ObservationRecord]) -> Result<()> {
        let located = records
            .iter()
            .map(|r| self.locate(r))
            .collect::<Result<Vec<_>>>()?;
        for (r, level) in records.iter().zip(located) {
            if let Some(level) = level {
                let arm = self.arm_mut(r.target, level);
                arm.online_pulls += 1;
                arm.cumulative_reward += r.outcome as u8 as f64;
            }
        }
        Ok(())
    }

    /// Seeds arm means from history without touching online pull counts.
    pub fn warm_start(&mut self, history: &HistoryLog) -> Result<()> {
        let located = history
            .records
            .iter()
            .map(|r| self.locate(r))
            .collect::<Result<Vec<_>>>()?;
        self.absorb(history.records.iter().zip(located));
        Ok(())
    }

    /// Like [`StatTable::warm_start`] but silently skips records whose
    /// effort is not on this table's grid.
    pub fn warm_start_on_grid(&mut self, history: &HistoryLog) {
        let located: Vec<_> = history
            .records
            .iter()
            .map(|r| self.locate(r).ok().flatten())
            .collect();
        self.absorb(history.records.iter().zip(located));
    }

    fn absorb<'a>(&mut self, records: impl Iterator<Item = (&'a ObservationRecord, Option<usize>)>) {
        let mut counts = vec![(0u64, 0u64); self.stats.len()];
        let tracked = self.tracked_levels();
        for (r, level) in records {
            if let Some(level) = level {
                let c = &mut counts[r.target * tracked + level - 1];
                c.0 += 1;
                c.1 += r.outcome as u64;
            }
        }
        for (arm, (pulls, hits)) in self.stats.iter_mut().zip(counts) {
            if pulls == 0 {
                continue;
            }
            let (prev_pulls, prev_hits) = arm
                .warm
                .map_or((0.0, 0.0), |w| (w.pulls as f64, w.mean * w.pulls as f64));
            let total = prev_pulls + pulls as f64;
            arm.warm = Some(WarmStart {
                mean: (prev_hits + hits as f64) / total,
                pulls: total as u64,
            });
        }
    }

    /// Moves to a new grid, carrying over statistics of levels present in
    /// both. Levels new to the table start without online pulls and are
    /// warm-started from `history` records that fall on them.
    pub fn refined(&self, grid: Discretization, history: &HistoryLog) -> StatTable {
        let mut fresh = StatTable::new(self.n_targets, grid);
        fresh.warm_start_on_grid(history);
        let mut next = fresh.clone();
        for level in 1..next.grid.len() {
            match self.grid.index_of(next.grid.value(level)) {
                Some(old) if old > 0 => {
                    for i in 0..self.n_targets {
                        *next.arm_mut(i, level) = *self.arm(i, old);
                    }
                }
                _ => {}
            }
        }
        next
    }
}

/// `N × (J + 1)` grid of bounds; column 0 is the zero-effort level.
#[derive(Debug, Clone, PartialEq)]
pub struct UcbGrid {
    n_targets: usize,
    n_levels: usize,
    values: Vec<f64>,
}

impl UcbGrid {
    fn zeros(n_targets: usize, n_levels: usize) -> Self {
        UcbGrid {
            n_targets,
            n_levels,
            values: vec![0.0; n_targets * n_levels],
        }
    }

    /// Builds a grid from equally long rows (column 0 is zero effort).
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n_levels = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == n_levels), "ragged rows");
        UcbGrid {
            n_targets: rows.len(),
            n_levels,
            values: rows.into_iter().flatten().collect(),
        }
    }

    #[inline]
    pub fn get(&self, target: usize, level: usize) -> f64 {
        self.values[target * self.n_levels + level]
    }

    fn set(&mut self, target: usize, level: usize, v: f64) {
        self.values[target * self.n_levels + level] = v;
    }

    pub fn n_targets(&self) -> usize {
        self.n_targets
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values
            .chunks(self.n_levels)
            .map(|r| r.to_vec())
            .collect()
    }
}

/// `selfUCB` for every tracked arm; column 0 is fixed at zero.
pub fn self_ucb_grid(table: &StatTable, t: u64, params: &UcbParams) -> UcbGrid {
    let levels = table.grid.len();
    let mut grid = UcbGrid::zeros(table.n_targets, levels);
    for i in 0..table.n_targets {
        for j in 1..levels {
            grid.set(i, j, self_ucb(table.arm(i, j), t, params));
        }
    }
    grid
}

/// `L · x` with `L · 0 = 0` even for infinite `L`.
#[inline]
fn scaled(l: f64, x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        l * x
    }
}

/// The Lipschitz UCB table.
///
/// Source arms are all tracked arms, plus the zero-effort arm of each target
/// (self bound 0) when `use_zero_anchor` is set; only the arm's own target
/// is used unless `use_cross_target` is set.
pub fn ucb_table(table: &StatTable, distances: &DistanceMatrix, t: u64, params: &UcbParams) -> UcbGrid {
    let n = table.n_targets;
    let grid = &table.grid;
    let levels = grid.len();
    let l = params.lipschitz_constant;
    let own = self_ucb_grid(table, t, params);

    let first_source = if params.use_zero_anchor { 0 } else { 1 };
    let slack = |v: usize, j: usize| -> f64 {
        let (pv, pj) = (grid.value(v), grid.value(j));
        if !params.use_monotonicity {
            (pj - pv).abs()
        } else {
            match params.slack_direction {
                SlackDirection::Monotone => (pj - pv).max(0.0),
                SlackDirection::Reversed => (pv - pj).max(0.0),
            }
        }
    };

    // within-target bound for every (u, j)
    let mut inner = UcbGrid::zeros(n, levels);
    for u in 0..n {
        for j in 1..levels {
            let mut best = own.get(u, j);
            for v in first_source..levels {
                if v == j {
                    continue;
                }
                best = best.min(own.get(u, v) + scaled(l, slack(v, j)));
            }
            inner.set(u, j, best);
        }
    }

    if !params.use_cross_target {
        return inner;
    }
    let mut out = inner.clone();
    for i in 0..n {
        for u in 0..n {
            if u == i {
                continue;
            }
            let shift = scaled(l, distances.get(i, u));
            if shift == f64::INFINITY {
                continue;
            }
            for j in 1..levels {
                let candidate = inner.get(u, j) + shift;
                if candidate < out.get(i, j) {
                    out.set(i, j, candidate);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::ObservationRecord;
    use proptest::prelude::*;

    fn eps() -> UcbParams {
        UcbParams::lizard(RadiusMode::Epsilon(0.1), 1.0)
    }

    fn pulled(n: u64, hits: f64) -> ArmStats {
        ArmStats {
            online_pulls: n,
            cumulative_reward: hits,
            warm: None,
        }
    }

    fn obs(target: usize, effort: f64, outcome: bool) -> ObservationRecord {
        ObservationRecord {
            timestep: 1,
            target,
            effort,
            outcome,
        }
    }

    #[test]
    fn radius_examples() {
        assert!((confidence_radius(&pulled(5, 1.0), 10, &eps()) - 0.1).abs() < 1e-15);
        let theory = UcbParams::lizard(RadiusMode::Theory, 1.0);
        let e2 = std::f64::consts::E * std::f64::consts::E;
        assert!((radius_value(RadiusMode::Theory, e2, 3) - 1.0).abs() < 1e-15);
        let expect = (3.0 * 7f64.ln() / 6.0).sqrt();
        assert!((confidence_radius(&pulled(3, 0.0), 7, &theory) - expect).abs() < 1e-15);
        assert_eq!(confidence_radius(&pulled(0, 0.0), 10, &eps()), f64::INFINITY);
        assert_eq!(confidence_radius(&pulled(4, 2.0), 1, &theory), 0.0);
    }

    #[test]
    fn self_ucb_examples() {
        // mean 0.5, radius 0.1
        assert!((self_ucb(&pulled(5, 2.5), 3, &eps()) - 0.6).abs() < 1e-15);
        assert_eq!(self_ucb(&ArmStats::default(), 3, &eps()), f64::INFINITY);
        let warm = ArmStats {
            warm: Some(WarmStart { mean: 0.7, pulls: 40 }),
            ..ArmStats::default()
        };
        assert!((self_ucb(&warm, 3, &eps()) - (0.7 + 0.05f64.sqrt())).abs() < 1e-15);
        assert!((self_ucb(&warm, 3, &eps()) - 0.9236).abs() < 1e-4);
    }

    #[test]
    fn warm_start_counts_history_once() {
        let grid = Discretization::from_gap(0.5).unwrap();
        let mut table = StatTable::new(2, grid);
        let history = HistoryLog {
            records: (0..10)
                .map(|k| obs(1, 1.0, k < 7))
                .chain((0..5).map(|_| obs(0, 0.0, false)))
                .collect(),
        };
        table.warm_start(&history).unwrap();
        let arm = table.arm(1, 2);
        assert_eq!(arm.online_pulls, 0);
        assert_eq!(arm.warm, Some(WarmStart { mean: 0.7, pulls: 10 }));
        assert_eq!(arm.radius_pulls(HistoryCounting::SinglePull), 1);
        assert_eq!(arm.radius_pulls(HistoryCounting::AllPulls), 10);
        assert_eq!(*table.arm(0, 1), ArmStats::default());
        assert_eq!(*table.arm(0, 2), ArmStats::default());

        let before = table.clone();
        table.warm_start(&HistoryLog::default()).unwrap();
        assert_eq!(table, before);
    }

    #[test]
    fn warm_mean_mixes_with_online_pulls() {
        let arm = ArmStats {
            online_pulls: 3,
            cumulative_reward: 0.0,
            warm: Some(WarmStart { mean: 0.8, pulls: 100 }),
        };
        assert!((arm.mean(HistoryCounting::SinglePull).unwrap() - 0.2).abs() < 1e-15);
        assert!((arm.mean(HistoryCounting::AllPulls).unwrap() - 80.0 / 103.0).abs() < 1e-15);
    }

    #[test]
    fn update_examples() {
        let grid = Discretization::from_gap(0.5).unwrap();
        let mut table = StatTable::new(1, grid);
        table.update(&[obs(0, 0.5, true)]).unwrap();
        assert_eq!(table.arm(0, 1).mean(HistoryCounting::SinglePull), Some(1.0));
        assert_eq!(table.arm(0, 1).online_pulls, 1);
        table.update(&[obs(0, 0.5, false)]).unwrap();
        assert_eq!(table.arm(0, 1).mean(HistoryCounting::SinglePull), Some(0.5));
        let before = table.clone();
        table.update(&[obs(0, 0.0, true)]).unwrap();
        assert_eq!(table, before);
        assert!(matches!(
            table.update(&[obs(3, 0.5, true)]),
            Err(Error::ContractViolation(_))
        ));
        assert!(matches!(
            table.update(&[obs(0, 0.3, true)]),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn refinement_keeps_shared_levels() {
        let mut table = StatTable::new(2, Discretization::from_gap(1.0).unwrap());
        table.update(&[obs(0, 1.0, true), obs(1, 1.0, false)]).unwrap();
        let history = HistoryLog {
            records: vec![obs(1, 0.5, true), obs(1, 1.0, true), obs(0, 0.0, false)],
        };
        let fine = table.refined(Discretization::from_gap(0.5).unwrap(), &history);
        assert_eq!(fine.tracked_levels(), 2);
        assert_eq!(fine.arm(0, 2), table.arm(0, 1));
        assert_eq!(fine.arm(1, 2), table.arm(1, 1));
        assert_eq!(*fine.arm(0, 1), ArmStats::default());
        assert_eq!(fine.arm(1, 1).online_pulls, 0);
        assert_eq!(fine.arm(1, 1).warm, Some(WarmStart { mean: 1.0, pulls: 1 }));
    }

    /// Table for one target on {0, 0.5, 1} with given self bounds.
    fn single_target(ucb_half: f64, ucb_full: f64) -> StatTable {
        let mut table = StatTable::new(1, Discretization::from_gap(0.5).unwrap());
        // eps radius 0.1 at n = 5
        *table.arm_mut(0, 1) = pulled(5, (ucb_half - 0.1) * 5.0);
        *table.arm_mut(0, 2) = pulled(5, (ucb_full - 0.1) * 5.0);
        table
    }

    #[test]
    fn monotone_cap_examples() {
        let table = single_target(0.9, 0.3);
        let d = DistanceMatrix::from_fn(1, |_, _| 0.0);
        let params = UcbParams {
            use_zero_anchor: false,
            ..eps()
        };
        let ucb = ucb_table(&table, &d, 10, &params);
        assert_eq!(ucb.get(0, 0), 0.0);
        assert!((ucb.get(0, 1) - 0.3).abs() < 1e-12);
        assert!((ucb.get(0, 2) - 0.3).abs() < 1e-12);

        let reversed = UcbParams {
            slack_direction: SlackDirection::Reversed,
            ..params
        };
        let ucb = ucb_table(&table, &d, 10, &reversed);
        // full effort bounded by half effort at zero slack; half effort by full + 0.5
        assert!((ucb.get(0, 2) - 0.3).abs() < 1e-12);
        assert!((ucb.get(0, 1) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn zero_anchor_caps_by_effort() {
        let table = single_target(0.9, 0.95);
        let d = DistanceMatrix::from_fn(1, |_, _| 0.0);
        let ucb = ucb_table(&table, &d, 10, &eps());
        assert!((ucb.get(0, 1) - 0.5).abs() < 1e-12);
        assert!((ucb.get(0, 2) - 0.95).abs() < 1e-12);
        let no_mono = UcbParams {
            use_monotonicity: false,
            ..eps()
        };
        let ucb = ucb_table(&StatTable::new(1, Discretization::from_gap(0.5).unwrap()), &d, 10, &no_mono);
        assert!((ucb.get(0, 1) - 0.5).abs() < 1e-12);
        assert!((ucb.get(0, 2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cross_target_transfer() {
        let mut table = StatTable::new(2, Discretization::from_gap(0.5).unwrap());
        *table.arm_mut(0, 1) = pulled(5, 1.0); // selfUCB 0.2 + 0.1
        let d = DistanceMatrix::from_fn(2, |_, _| 0.2);
        let params = UcbParams {
            use_zero_anchor: false,
            ..eps()
        };
        let ucb = ucb_table(&table, &d, 10, &params);
        assert!((ucb.get(1, 1) - 0.5).abs() < 1e-12);
        assert!((ucb.get(0, 1) - 0.3).abs() < 1e-12);
        // target 0's full level still has nothing finite to lean on except via L·0.5
        assert!((ucb.get(0, 2) - 0.8).abs() < 1e-12);
        let isolated = UcbParams {
            use_cross_target: false,
            ..params
        };
        assert_eq!(ucb_table(&table, &d, 10, &isolated).get(1, 1), f64::INFINITY);
    }

    #[test]
    fn independent_params_reduce_to_self_bounds() {
        let mut table = StatTable::new(3, Discretization::from_gap(0.25).unwrap());
        table
            .update(&[obs(0, 0.25, true), obs(1, 1.0, false), obs(2, 0.5, true)])
            .unwrap();
        let d = DistanceMatrix::from_fn(3, |_, _| 0.1);
        let params = UcbParams::independent(RadiusMode::Theory);
        assert_eq!(
            ucb_table(&table, &d, 5, &params),
            self_ucb_grid(&table, 5, &params)
        );
    }

    #[test]
    fn params_validation() {
        assert!(eps().validate().is_ok());
        assert!(UcbParams::lizard(RadiusMode::Epsilon(0.0), 1.0).validate().is_err());
        assert!(UcbParams::lizard(RadiusMode::Epsilon(f64::NAN), 1.0).validate().is_err());
        assert!(UcbParams::lizard(RadiusMode::Theory, 0.0).validate().is_err());
        assert!(UcbParams::independent(RadiusMode::Theory).validate().is_ok());
    }

    fn arb_table() -> impl Strategy<Value = (StatTable, DistanceMatrix, u64)> {
        (1usize..5, 0u32..3, 1u64..500).prop_flat_map(|(n, k, t)| {
            let grid = Discretization::from_gap(0.5f64.powi(k as i32)).unwrap();
            let arms = n * (grid.len() - 1);
            (
                prop::collection::vec((0u64..20, 0.0f64..1.0, prop::option::of((0.0f64..1.0, 1u64..50))), arms),
                prop::collection::vec(0.0f64..1.0, n * n),
            )
                .prop_map(move |(raw, dist)| {
                    let mut table = StatTable::new(n, grid.clone());
                    for (idx, (pulls, frac, warm)) in raw.into_iter().enumerate() {
                        table.stats[idx] = ArmStats {
                            online_pulls: pulls,
                            cumulative_reward: (pulls as f64 * frac).floor(),
                            warm: warm.map(|(mean, pulls)| WarmStart { mean, pulls }),
                        };
                    }
                    let d = DistanceMatrix::from_fn(n, |i, j| dist[i * n + j]);
                    (table, d, t)
                })
        })
    }

    proptest! {
        #[test]
        fn ucb_bounded_by_self_and_anchored((table, d, t) in arb_table(), theory in any::<bool>()) {
            let radius = if theory { RadiusMode::Theory } else { RadiusMode::Epsilon(0.1) };
            let params = UcbParams::lizard(radius, 1.0);
            let ucb = ucb_table(&table, &d, t, &params);
            let own = self_ucb_grid(&table, t, &params);
            for i in 0..table.n_targets() {
                prop_assert_eq!(ucb.get(i, 0), 0.0);
                for j in 1..table.grid().len() {
                    prop_assert!(ucb.get(i, j) <= own.get(i, j));
                    for jj in (j + 1)..table.grid().len() {
                        prop_assert!(ucb.get(i, j) <= own.get(i, jj));
                    }
                }
            }
        }
    }
}
