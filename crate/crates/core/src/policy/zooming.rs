use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Policy;
use crate::bandit::{radius_value, RadiusMode};
use crate::env::{EffortAssignment, ObservationRecord};
use crate::error::Result;

/// Candidate points drawn per round for the covering check.
pub const ZOOMING_CANDIDATES: usize = 64;

#[derive(Debug, Clone)]
struct ActiveArm {
    efforts: Vec<f64>,
    pulls: u64,
    total: f64,
}

/// Zooming over whole effort vectors in `{β ∈ [0,1]^N : Σβ ≤ B}`.
///
/// Observes only the composite reward, scaled by `1/N` into `[0, 1]`.
/// Arms are compared with the mean absolute effort difference, under
/// which the scaled reward is `L`-Lipschitz. A candidate is covered when
/// it lies within `radius / L` of some active arm.
#[derive(Debug, Clone)]
pub struct Zooming {
    n_targets: usize,
    budget: f64,
    lipschitz: f64,
    radius: RadiusMode,
    rng: ChaCha8Rng,
    arms: Vec<ActiveArm>,
    last: Option<usize>,
}

impl Zooming {
    pub fn new(n_targets: usize, budget: f64, lipschitz: f64, radius: RadiusMode, seed: u64) -> Self {
        Zooming {
            n_targets,
            budget,
            lipschitz,
            radius,
            rng: ChaCha8Rng::seed_from_u64(seed),
            arms: Vec::new(),
            last: None,
        }
    }

    pub fn active_arms(&self) -> usize {
        self.arms.len()
    }

    fn arm_radius(&self, arm: &ActiveArm, t: u64) -> f64 {
        radius_value(self.radius, t.max(1) as f64, arm.pulls)
    }

    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / self.n_targets as f64
    }

    /// Uniform on the unit cube, pulled back onto the budget face when over.
    fn draw_candidate(&mut self) -> Vec<f64> {
        let mut beta: Vec<f64> = (0..self.n_targets).map(|_| self.rng.random::<f64>()).collect();
        let total: f64 = beta.iter().sum();
        if total > self.budget {
            let scale = self.budget / total;
            beta.iter_mut().for_each(|b| *b *= scale);
        }
        beta
    }

    fn covered(&self, beta: &[f64], t: u64) -> bool {
        self.arms
            .iter()
            .any(|a| self.distance(beta, &a.efforts) <= self.arm_radius(a, t) / self.lipschitz)
    }

    pub fn zooming_step(&mut self, t: u64) -> EffortAssignment {
        for _ in 0..ZOOMING_CANDIDATES {
            let beta = self.draw_candidate();
            if !self.covered(&beta, t) {
                self.arms.push(ActiveArm {
                    efforts: beta,
                    pulls: 0,
                    total: 0.0,
                });
                break;
            }
        }
        let mut best = 0;
        let mut best_index = f64::NEG_INFINITY;
        for (k, arm) in self.arms.iter().enumerate() {
            let index = if arm.pulls == 0 {
                f64::INFINITY
            } else {
                arm.total / arm.pulls as f64 + 2.0 * self.arm_radius(arm, t)
            };
            if index > best_index {
                best = k;
                best_index = index;
            }
        }
        self.last = Some(best);
        EffortAssignment::continuous(self.arms[best].efforts.clone())
    }
}

impl Policy for Zooming {
    fn name(&self) -> &'static str {
        "zooming"
    }

    fn select(&mut self, t: u64) -> Result<EffortAssignment> {
        Ok(self.zooming_step(t))
    }

    fn observe(&mut self, _t: u64, _a: &EffortAssignment, records: &[ObservationRecord]) -> Result<()> {
        if let Some(k) = self.last.take() {
            let reward = records.iter().filter(|r| r.outcome).count() as f64 / self.n_targets as f64;
            let arm = &mut self.arms[k];
            arm.pulls += 1;
            arm.total += reward;
        }
        Ok(())
    }
}
