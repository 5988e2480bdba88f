use std::time::{Duration, Instant};

use proptest::prelude::*;

use lizard::env::{expected_reward, generate_synthetic_instance, SyntheticSpec};
use lizard::harness::{
    aggregate, cumulative_regret, emit_csv, read_csv, run_trial, run_trials, ExperimentConfig,
    TrialWorld,
};
use lizard::instance::validate_instance;

const ALL_POLICIES: [&str; 6] = ["lizard", "lizard-adaptive", "cucb", "zooming", "exploit", "oracle"];

fn small_config(horizon: u64) -> ExperimentConfig {
    ExperimentConfig {
        n_targets: 8,
        horizon,
        trials: 1,
        policies: ALL_POLICIES.map(String::from).to_vec(),
        ..ExperimentConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_policy_stays_within_budget(seed in 0u64..10_000, quarters in 1u32..12, gap in 0usize..3) {
        let budget = quarters as f64 / 4.0;
        let mut config = small_config(60);
        config.budget = budget;
        config.gap = lizard::harness::GapSetting::Fixed([0.5, 0.25, 0.125][gap]);
        for name in ALL_POLICIES {
            let r = run_trial(&config, name, seed).unwrap();
            for a in &r.assignments {
                prop_assert!(a.is_feasible(budget), "{name}: {:?}", a.efforts());
                prop_assert!(a.efforts().iter().all(|&b| (0.0..=1.0).contains(&b)));
            }
        }
    }

    #[test]
    fn generated_instances_are_valid(seed in any::<u64>(), n in 1usize..40) {
        let spec = SyntheticSpec { n_targets: n, ..SyntheticSpec::default() };
        let inst = generate_synthetic_instance(&spec, seed).unwrap();
        prop_assert!(validate_instance(&inst).is_valid());
    }
}

#[test]
fn exploit_is_static_and_usually_suboptimal() {
    let mut config = ExperimentConfig {
        n_targets: 100,
        horizon: 20,
        ..ExperimentConfig::default()
    };
    config.policies = vec!["exploit".into()];
    let mut strictly_worse = 0;
    for seed in 0..20 {
        let world = TrialWorld::build(&config, seed).unwrap();
        let r = run_trial(&config, "exploit", seed).unwrap();
        assert!(r.assignments.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(r.assignments[0], world.exploit);
        if world.optimal_value() - world.exploit_value() > 1e-9 {
            strictly_worse += 1;
        }
    }
    assert!(strictly_worse >= 18, "{strictly_worse} of 20");
}

#[test]
fn exploit_scores_zero_and_oracle_one_hundred() {
    let mut config = small_config(40);
    config.trials = 3;
    config.policies = vec!["exploit".into(), "oracle".into()];
    let series = aggregate(&run_trials(&config).unwrap());
    for (s, want) in series.iter().zip([0.0, 100.0]) {
        for p in &s.points {
            let got = p.mean_norm_perf.unwrap();
            assert!((got - want).abs() < 1e-9, "{} at t={}: {got}", s.policy, p.t);
        }
    }
}

#[test]
fn lizard_beats_exploit_on_most_seeds() {
    let config = ExperimentConfig::default();
    let wins = (0..30)
        .filter(|&seed| {
            let l = run_trial(&config, "lizard", seed).unwrap();
            let e = run_trial(&config, "exploit", seed).unwrap();
            let opt = l.optimal_value;
            cumulative_regret(&l, opt).last() < cumulative_regret(&e, opt).last()
        })
        .count();
    assert!(wins >= 24, "lizard ahead on {wins} of 30 seeds");
}

#[test]
fn single_lizard_trial_is_fast() {
    let start = Instant::now();
    run_trial(&ExperimentConfig::default(), "lizard", 0).unwrap();
    assert!(start.elapsed() < Duration::from_secs(60));
}

#[test]
fn trials_are_reproducible() {
    let config = small_config(80);
    for name in ALL_POLICIES {
        assert_eq!(run_trial(&config, name, 7).unwrap(), run_trial(&config, name, 7).unwrap());
    }
}

#[test]
fn exploit_without_history_idles() {
    let mut config = small_config(1);
    config.history_steps = 0;
    let world = TrialWorld::build(&config, 3).unwrap();
    let r = run_trial(&config, "exploit", 3).unwrap();
    assert_eq!(r.expected, vec![0.0]);
    assert_eq!(expected_reward(&world.instance, &world.exploit), 0.0);
}

#[test]
fn csv_round_trip() {
    let mut config = small_config(30);
    config.trials = 2;
    let series = aggregate(&run_trials(&config).unwrap());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    emit_csv(&series, &path).unwrap();
    let back = read_csv(&path).unwrap();
    assert_eq!(back.len(), series.len());
    for (a, b) in series.iter().zip(&back) {
        assert_eq!(a.policy, b.policy);
        for (p, q) in a.points.iter().zip(&b.points) {
            assert_eq!(p.t, q.t);
            assert!((p.mean_reward - q.mean_reward).abs() <= 1e-11 * p.mean_reward.abs().max(1.0));
            assert!((p.mean_regret - q.mean_regret).abs() <= 1e-11 * p.mean_regret.abs().max(1.0));
            assert_eq!(p.mean_norm_perf.is_some(), q.mean_norm_perf.is_some());
        }
    }
}
