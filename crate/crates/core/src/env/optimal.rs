use crate::error::{Error, Result};
use crate::instance::ProblemInstance;
use crate::mckp::{solve_mckp, MckpInstance};

/// Best fixed assignment over a uniform effort grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalPlan {
    pub value: f64,
    pub efforts: Vec<f64>,
    pub grid_step: f64,
    /// `N · L · grid_step`: how far `value` may sit below the continuous optimum.
    pub error_bound: f64,
}

/// A quarter of the instance's discretization gap.
pub fn default_optimal_grid_step(inst: &ProblemInstance) -> f64 {
    inst.discretization().min_gap() / 4.0
}

/// Maximizes the true expected reward over efforts on the grid
/// `{0, grid_step, …, 1}` subject to the budget, exactly.
pub fn compute_optimal(inst: &ProblemInstance, grid_step: f64) -> Result<OptimalPlan> {
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "grid step {grid_step} must lie in (0, 1]"
        )));
    }
    let per_unit = 1.0 / grid_step;
    let units = per_unit.round();
    if (per_unit - units).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!(
            "grid step {grid_step} does not divide 1"
        )));
    }
    let budget_ratio = inst.budget() / grid_step;
    if (budget_ratio - budget_ratio.round()).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!(
            "grid step {grid_step} does not divide the budget {}",
            inst.budget()
        )));
    }
    let units = units as usize;
    let efforts: Vec<f64> = (0..=units).map(|k| k as f64 / units as f64).collect();
    let values = (0..inst.n_targets())
        .map(|i| {
            let f = inst.reward(i);
            efforts.iter().map(|&e| f.eval_clamped(e)).collect()
        })
        .collect();
    let m = MckpInstance::new(values, (0..=units).collect(), budget_ratio.round() as usize)?;
    let solution = solve_mckp(&m);
    Ok(OptimalPlan {
        value: solution.objective,
        efforts: solution.levels.iter().map(|&k| efforts[k]).collect(),
        grid_step,
        error_bound: inst.n_targets() as f64 * inst.lipschitz_constant() * grid_step,
    })
}
