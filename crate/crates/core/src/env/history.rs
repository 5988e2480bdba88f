use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{sample_round, EffortAssignment, ObservationRecord};
use crate::error::{Error, Result};
use crate::instance::ProblemInstance;
use crate::reward::EFFORT_TOL;

/// Observations gathered before deployment (timesteps `-horizon ..= -1`).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HistoryLog {
    pub records: Vec<ObservationRecord>,
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    timestep: i64,
    target: usize,
    effort: f64,
    outcome: u8,
}

impl HistoryLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Writes `timestep,target,effort,outcome` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)
            .map_err(|e| Error::parse(path, e))?;
        for r in &self.records {
            w.serialize(CsvRow {
                timestep: r.timestep,
                target: r.target,
                effort: r.effort,
                outcome: r.outcome as u8,
            })
            .map_err(|e| Error::parse(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path).map_err(|e| Error::parse(path, e))?;
        let mut records = Vec::new();
        for row in r.deserialize::<CsvRow>() {
            let row = row.map_err(|e| Error::parse(path, e))?;
            if row.outcome > 1 {
                return Err(Error::parse(path, format!("outcome {} is not 0 or 1", row.outcome)));
            }
            records.push(ObservationRecord {
                timestep: row.timestep,
                target: row.target,
                effort: row.effort,
                outcome: row.outcome == 1,
            });
        }
        Ok(HistoryLog { records })
    }
}

/// Simulates `horizon` pre-deployment patrols biased towards accessible targets.
///
/// Each pseudo-step visits targets in an order drawn without replacement
/// with probability proportional to `exp(bias_weight · accessibility)`,
/// where accessibility is feature 0. Each visited target gets a uniformly
/// drawn nonzero grid level that still fits in the remaining budget, until
/// no level fits. Every target yields one record per step; zero-effort
/// records always have outcome 0.
pub fn generate_historical_data<R: Rng + ?Sized>(
    inst: &ProblemInstance,
    horizon: usize,
    bias_weight: f64,
    rng: &mut R,
) -> HistoryLog {
    let n = inst.n_targets();
    let grid = inst.discretization();
    let weights: Vec<f64> = inst
        .targets()
        .iter()
        .map(|t| (bias_weight * t.features.values().first().copied().unwrap_or(0.0)).exp())
        .collect();

    let mut records = Vec::with_capacity(horizon * n);
    for step in 0..horizon {
        let mut levels = vec![0usize; n];
        let mut remaining = inst.budget();
        let mut open: Vec<usize> = (0..n).collect();
        while !open.is_empty() {
            let fitting = (1..grid.len())
                .filter(|&j| grid.value(j) <= remaining + EFFORT_TOL)
                .count();
            if fitting == 0 {
                break;
            }
            let total: f64 = open.iter().map(|&i| weights[i]).sum();
            let mut u = rng.random::<f64>() * total;
            let mut pick = open.len() - 1;
            for (k, &i) in open.iter().enumerate() {
                if u < weights[i] {
                    pick = k;
                    break;
                }
                u -= weights[i];
            }
            let target = open.swap_remove(pick);
            // levels are increasing, so the fitting ones are 1..=fitting
            let level = rng.random_range(1..=fitting);
            levels[target] = level;
            remaining -= grid.value(level);
        }
        let assignment = EffortAssignment::from_levels(levels, grid);
        let timestep = step as i64 - horizon as i64;
        let round = sample_round(inst, &assignment, rng, timestep)
            .expect("history assignments fit the budget");
        records.extend(round.into_iter().map(|mut r| {
            if r.effort <= EFFORT_TOL {
                r.outcome = false;
            }
            r
        }));
    }
    HistoryLog { records }
}
