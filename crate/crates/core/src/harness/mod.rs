//! Experiment runner: seeded trials, aggregation and CSV output.

mod config;
mod metrics;
mod trial;

pub use config::{ExperimentConfig, GapSetting, RadiusKind, FIELD_NAMES, ORACLE_POLICY, SYNTHETIC_LIPSCHITZ};
pub use metrics::{
    aggregate, cumulative_regret, emit_csv, mean_stderr, normalized_performance, read_csv, run_experiment,
    write_ucb_trace, MetricPoint, MetricSeries, CSV_HEADER, NA,
};
pub use trial::{run_trial, run_trial_in, run_trials, TrialResult, TrialWorld, WORKERS_ENV};
