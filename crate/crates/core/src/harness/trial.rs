use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, GapSetting, ORACLE_POLICY};
use crate::bandit::UcbGrid;
use crate::env::{
    compute_optimal, default_optimal_grid_step, expected_reward, generate_historical_data,
    generate_synthetic_instance, sample_round, EffortAssignment, HistoryLog, ObservationRecord,
};
use crate::error::{Error, Result};
use crate::instance::ProblemInstance;
use crate::policy::{build_policy, exploit_strategy, Planning, Policy, PolicyKind, PolicySetup};

/// Environment variable holding the worker count for trial execution.
pub const WORKERS_ENV: &str = "LIZARD_WORKERS";

/// Per-round record of one policy on one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub policy: String,
    pub seed: u64,
    /// `Σ_i μ_i(β_i)` of the played assignment, per round.
    pub expected: Vec<f64>,
    /// Number of detections actually drawn, per round.
    pub realized: Vec<f64>,
    pub assignments: Vec<EffortAssignment>,
    pub optimal_value: f64,
    pub exploit_value: f64,
    /// Bound tables behind each selection; filled only in verbose mode.
    pub ucb_trace: Vec<Option<UcbGrid>>,
}

/// Instance, history and baselines derived from one trial seed.
#[derive(Debug, Clone)]
pub struct TrialWorld {
    pub instance: ProblemInstance,
    pub history: HistoryLog,
    pub exploit: EffortAssignment,
    pub optimal: EffortAssignment,
    observation_seed: u64,
    policy_seed: u64,
}

impl TrialWorld {
    /// Splits the trial seed into independent streams for the instance,
    /// the history, the observations and the policy.
    pub fn build(config: &ExperimentConfig, seed: u64) -> Result<Self> {
        let mut master = ChaCha8Rng::seed_from_u64(seed);
        let instance_seed = master.next_u64();
        let history_seed = master.next_u64();
        let observation_seed = master.next_u64();
        let policy_seed = master.next_u64();

        let instance = generate_synthetic_instance(&config.synthetic_spec(), instance_seed)?;
        let history = generate_historical_data(
            &instance,
            config.history_steps,
            config.bias_weight,
            &mut ChaCha8Rng::seed_from_u64(history_seed),
        );
        let planning = Planning::from_instance(&instance);
        let exploit = exploit_strategy(&history, &planning)?;
        let step = config
            .optimal_grid_step
            .unwrap_or_else(|| default_optimal_grid_step(&instance));
        let optimal = EffortAssignment::continuous(compute_optimal(&instance, step)?.efforts);
        Ok(TrialWorld {
            instance,
            history,
            exploit,
            optimal,
            observation_seed,
            policy_seed,
        })
    }

    pub fn optimal_value(&self) -> f64 {
        expected_reward(&self.instance, &self.optimal)
    }

    pub fn exploit_value(&self) -> f64 {
        expected_reward(&self.instance, &self.exploit)
    }
}

/// Plays the optimal plan every round; available only to the simulator.
struct Oracle(EffortAssignment);

impl Policy for Oracle {
    fn name(&self) -> &'static str {
        ORACLE_POLICY
    }

    fn select(&mut self, _t: u64) -> Result<EffortAssignment> {
        Ok(self.0.clone())
    }

    fn observe(&mut self, _t: u64, _a: &EffortAssignment, _r: &[ObservationRecord]) -> Result<()> {
        Ok(())
    }
}

fn make_policy(config: &ExperimentConfig, name: &str, world: &TrialWorld) -> Result<Box<dyn Policy>> {
    if name == ORACLE_POLICY {
        return Ok(Box::new(Oracle(world.optimal.clone())));
    }
    let mut kind: PolicyKind = name.parse()?;
    if kind == PolicyKind::Lizard && config.gap == GapSetting::Adaptive {
        kind = PolicyKind::LizardAdaptive;
    }
    let planning = Planning::from_instance(&world.instance);
    build_policy(
        kind,
        &PolicySetup {
            planning: &planning,
            params: config.ucb_params(),
            history: &world.history,
            horizon: config.horizon,
            seed: world.policy_seed,
        },
    )
}

/// Runs one policy for `config.horizon` rounds on the world built from `seed`.
pub fn run_trial(config: &ExperimentConfig, policy_name: &str, seed: u64) -> Result<TrialResult> {
    config.validate()?;
    let world = TrialWorld::build(config, seed)?;
    run_trial_in(config, policy_name, seed, &world)
}

/// Like [`run_trial`] but on a prebuilt world.
pub fn run_trial_in(
    config: &ExperimentConfig,
    policy_name: &str,
    seed: u64,
    world: &TrialWorld,
) -> Result<TrialResult> {
    let mut policy = make_policy(config, policy_name, world)?;
    let mut rng = ChaCha8Rng::seed_from_u64(world.observation_seed);
    let horizon = config.horizon as usize;
    let mut result = TrialResult {
        policy: policy_name.to_string(),
        seed,
        expected: Vec::with_capacity(horizon),
        realized: Vec::with_capacity(horizon),
        assignments: Vec::with_capacity(horizon),
        optimal_value: world.optimal_value(),
        exploit_value: world.exploit_value(),
        ucb_trace: Vec::new(),
    };
    for t in 1..=config.horizon {
        let a = policy.select(t)?;
        let records = sample_round(&world.instance, &a, &mut rng, t as i64)?;
        result.expected.push(expected_reward(&world.instance, &a));
        result
            .realized
            .push(records.iter().filter(|r| r.outcome).count() as f64);
        if config.verbose {
            result.ucb_trace.push(policy.ucb_snapshot().cloned());
        }
        policy.observe(t, &a, &records)?;
        result.assignments.push(a);
    }
    Ok(result)
}

fn worker_count() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| Error::Config(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

/// Runs every (policy, seed) pair, seeds `seed .. seed + trials`, sorted by
/// policy order in the config, then seed.
pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    config.validate()?;
    let jobs: Vec<(usize, u64)> = (0..config.policies.len())
        .flat_map(|p| (0..config.trials).map(move |k| (p, config.seed + k)))
        .collect();
    let run = || -> Result<Vec<TrialResult>> {
        let mut out: Vec<(usize, TrialResult)> = jobs
            .par_iter()
            .map(|&(p, seed)| run_trial(config, &config.policies[p], seed).map(|r| (p, r)))
            .collect::<Result<_>>()?;
        out.sort_by_key(|(p, r)| (*p, r.seed));
        Ok(out.into_iter().map(|(_, r)| r).collect())
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    pool.install(run)
}
