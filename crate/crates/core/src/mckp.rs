//! Exact super-arm selection as a multiple-choice knapsack.
//!
//! Every target (class) takes exactly one effort level (item). Level costs
//! are integer multiples of the grid unit, so a dynamic program over
//! `(target, remaining budget units)` is exact.
//!
//! Ties are broken lexicographically: among optimal assignments the one with
//! the smallest level vector (target 0 first, lowest level first) wins.

use crate::error::{Error, Result};
use crate::reward::EFFORT_TOL;

/// Largest number of assignments [`brute_force_mckp`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct MckpInstance {
    values: Vec<Vec<f64>>,
    level_costs: Vec<usize>,
    budget_units: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MckpSolution {
    /// Total value of the chosen levels, with `+inf` entries counted at the
    /// optimism sentinel (see [`MckpInstance::effective_values`]).
    pub objective: f64,
    /// Chosen level index per target.
    pub levels: Vec<usize>,
}

impl MckpInstance {
    /// `values[i][j]` is the value of putting target `i` at level `j`.
    pub fn new(values: Vec<Vec<f64>>, level_costs: Vec<usize>, budget_units: usize) -> Result<Self> {
        if level_costs.first() != Some(&0) {
            return Err(Error::InvalidArgument("level 0 must cost 0".into()));
        }
        if level_costs.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument(
                "level costs must be non-decreasing".into(),
            ));
        }
        for (i, row) in values.iter().enumerate() {
            if row.len() != level_costs.len() {
                return Err(Error::InvalidArgument(format!(
                    "target {i} has {} values for {} levels",
                    row.len(),
                    level_costs.len()
                )));
            }
            if row.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
                return Err(Error::InvalidArgument(format!(
                    "target {i} has a NaN or -inf value"
                )));
            }
        }
        Ok(MckpInstance {
            values,
            level_costs,
            budget_units,
        })
    }

    /// Converts effort levels and a real budget into integer units of the
    /// smallest level spacing.
    pub fn from_grid(values: Vec<Vec<f64>>, levels: &[f64], budget: f64) -> Result<Self> {
        let unit = levels
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        if !(unit > 0.0 && unit.is_finite()) {
            return Err(Error::InvalidArgument(
                "levels must be strictly increasing".into(),
            ));
        }
        let mut costs = Vec::with_capacity(levels.len());
        for &l in levels {
            let units = l / unit;
            let rounded = units.round();
            if (units - rounded).abs() > 1e-6 {
                return Err(Error::InvalidArgument(format!(
                    "level {l} is not an integer multiple of the grid unit {unit}"
                )));
            }
            costs.push(rounded as usize);
        }
        if !(budget >= 0.0) {
            return Err(Error::InvalidArgument(format!("budget {budget} is negative")));
        }
        let budget_units = (budget / unit + EFFORT_TOL).floor() as usize;
        Self::new(values, costs, budget_units)
    }

    pub fn n_targets(&self) -> usize {
        self.values.len()
    }

    pub fn n_levels(&self) -> usize {
        self.level_costs.len()
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn level_costs(&self) -> &[usize] {
        &self.level_costs
    }

    pub fn budget_units(&self) -> usize {
        self.budget_units
    }

    /// Values with every `+inf` replaced by `1 + N + Σ|finite values|`, so
    /// any assignment with more unexplored arms beats one with fewer.
    pub fn effective_values(&self) -> Vec<Vec<f64>> {
        let finite_total: f64 = self
            .values
            .iter()
            .flatten()
            .filter(|v| v.is_finite())
            .map(|v| v.abs())
            .sum();
        let sentinel = 1.0 + self.values.len() as f64 + finite_total;
        self.values
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| if v == f64::INFINITY { sentinel } else { v })
                    .collect()
            })
            .collect()
    }

    pub fn cost(&self, levels: &[usize]) -> usize {
        levels.iter().map(|&j| self.level_costs[j]).sum()
    }
}

/// Exact solution by dynamic programming over remaining budget units.
pub fn solve_mckp(m: &MckpInstance) -> MckpSolution {
    let values = m.effective_values();
    let n = values.len();
    let cap = m.budget_units;
    let costs = &m.level_costs;

    // best[i][b]: best value for targets i.. using at most b units
    let width = cap + 1;
    let mut best = vec![0.0f64; (n + 1) * width];
    for i in (0..n).rev() {
        for b in 0..=cap {
            let mut top = f64::NEG_INFINITY;
            for (j, &c) in costs.iter().enumerate() {
                if c > b {
                    break;
                }
                let v = values[i][j] + best[(i + 1) * width + b - c];
                if v > top {
                    top = v;
                }
            }
            best[i * width + b] = top;
        }
    }

    let mut levels = Vec::with_capacity(n);
    let mut b = cap;
    for i in 0..n {
        let target = best[i * width + b];
        let j = costs
            .iter()
            .enumerate()
            .take_while(|&(_, &c)| c <= b)
            .find(|&(j, &c)| values[i][j] + best[(i + 1) * width + b - c] == target)
            .map(|(j, _)| j)
            .expect("optimal level exists");
        levels.push(j);
        b -= costs[j];
    }
    MckpSolution {
        objective: if n == 0 { 0.0 } else { best[cap] },
        levels,
    }
}

/// Exhaustive enumeration with the same tie-break as [`solve_mckp`].
///
/// Refuses instances with more than [`BRUTE_FORCE_LIMIT`] assignments.
pub fn brute_force_mckp(m: &MckpInstance) -> Result<MckpSolution> {
    let n = m.n_targets();
    let k = m.n_levels();
    let total = (k as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    if total > BRUTE_FORCE_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "{total} assignments exceed the brute-force limit"
        )));
    }
    let values = m.effective_values();
    let mut current = vec![0usize; n];
    let mut best: Option<MckpSolution> = None;
    loop {
        if m.cost(&current) <= m.budget_units {
            // summed from the last target, matching the DP's association
            let objective = current
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (i, &j)| values[i][j] + acc);
            if best.as_ref().is_none_or(|b| objective > b.objective) {
                best = Some(MckpSolution {
                    objective,
                    levels: current.clone(),
                });
            }
        }
        // lexicographic odometer, last target fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(best.unwrap_or(MckpSolution {
                    objective: 0.0,
                    levels: Vec::new(),
                }));
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < k {
                break;
            }
            current[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(values: Vec<Vec<f64>>, budget: f64) -> MckpInstance {
        MckpInstance::from_grid(values, &[0.0, 0.5, 1.0], budget).unwrap()
    }

    #[test]
    fn zero_budget_takes_level_zero() {
        let m = grid(vec![vec![0.1, 0.6, 0.7], vec![0.2, 0.5, 0.9]], 0.0);
        let s = solve_mckp(&m);
        assert_eq!(s.levels, vec![0, 0]);
        assert!((s.objective - 0.3).abs() < 1e-15);
    }

    #[test]
    fn two_target_example() {
        let m = grid(vec![vec![0.0, 0.6, 0.7], vec![0.0, 0.5, 0.9]], 1.0);
        let s = solve_mckp(&m);
        assert_eq!(s.levels, vec![1, 1]);
        assert!((s.objective - 1.1).abs() < 1e-15);
        assert_eq!(brute_force_mckp(&m).unwrap(), s);
    }

    #[test]
    fn slack_budget_takes_argmax() {
        let m = grid(vec![vec![0.0, 0.8, 0.7], vec![0.0, 0.5, 0.9]], 2.0);
        let s = solve_mckp(&m);
        assert_eq!(s.levels, vec![1, 2]);
        assert!((s.objective - 1.7).abs() < 1e-15);
    }

    #[test]
    fn ties_pick_lowest_indices() {
        let m = grid(vec![vec![0.5; 3]; 3], 1.0);
        assert_eq!(solve_mckp(&m).levels, vec![0, 0, 0]);
        assert_eq!(brute_force_mckp(&m).unwrap().levels, vec![0, 0, 0]);
        // two optimal assignments: (1, 0) and (0, 1)
        let m = grid(vec![vec![0.0, 0.5, 0.5], vec![0.0, 0.5, 0.5]], 0.5);
        assert_eq!(solve_mckp(&m).levels, vec![0, 1]);
        assert_eq!(brute_force_mckp(&m).unwrap().levels, vec![0, 1]);
    }

    #[test]
    fn single_target_is_feasible_argmax() {
        let m = grid(vec![vec![0.0, 0.3, 0.9]], 0.5);
        assert_eq!(solve_mckp(&m).levels, vec![1]);
        assert_eq!(brute_force_mckp(&m).unwrap().levels, vec![1]);
    }

    #[test]
    fn infinite_values_dominate() {
        // two unexplored arms at level 1 beat one unexplored full-effort arm
        let inf = f64::INFINITY;
        let m = grid(vec![vec![0.0, inf, inf], vec![0.0, inf, 0.9]], 1.0);
        let s = solve_mckp(&m);
        assert_eq!(s.levels, vec![1, 1]);
        assert!(s.objective.is_finite());
    }

    #[test]
    fn rejects_non_integral_grid() {
        let e = MckpInstance::from_grid(vec![vec![0.0, 0.1, 0.2]], &[0.0, 0.3, 1.0], 1.0);
        assert!(matches!(e, Err(Error::InvalidArgument(_))));
        assert!(MckpInstance::new(vec![vec![0.0, 1.0]], vec![1, 2], 1).is_err());
        assert!(MckpInstance::new(vec![vec![0.0, f64::NAN]], vec![0, 1], 1).is_err());
    }

    #[test]
    fn brute_force_refuses_large_instances() {
        let m = MckpInstance::new(vec![vec![0.0; 11]; 7], (0..11).collect(), 10).unwrap();
        assert!(brute_force_mckp(&m).is_err());
    }

    fn arb_instance() -> impl Strategy<Value = MckpInstance> {
        (1usize..=6, 1usize..=4).prop_flat_map(|(n, j)| {
            (
                prop::collection::vec(prop::collection::vec(0.0f64..1.0, j + 1), n),
                0usize..=(n * j),
            )
                .prop_map(move |(values, budget)| {
                    MckpInstance::new(values, (0..=j).collect(), budget).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn assignment_is_feasible(m in arb_instance()) {
            let s = solve_mckp(&m);
            prop_assert_eq!(s.levels.len(), m.n_targets());
            prop_assert!(m.cost(&s.levels) <= m.budget_units());
        }

        #[test]
        fn objective_monotone_in_budget(m in arb_instance()) {
            let s = solve_mckp(&m);
            let more = MckpInstance::new(m.values().to_vec(), m.level_costs().to_vec(), m.budget_units() + 1).unwrap();
            prop_assert!(solve_mckp(&more).objective >= s.objective);
        }

        #[test]
        fn scaling_keeps_assignment(m in arb_instance(), c in 0.1f64..10.0) {
            let scaled: Vec<Vec<f64>> = m.values().iter().map(|r| r.iter().map(|v| v * c).collect()).collect();
            let sm = MckpInstance::new(scaled, m.level_costs().to_vec(), m.budget_units()).unwrap();
            prop_assert_eq!(solve_mckp(&sm).levels, solve_mckp(&m).levels);
        }
    }
}
