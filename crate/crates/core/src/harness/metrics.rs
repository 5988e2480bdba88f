use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::config::ExperimentConfig;
use super::trial::{run_trials, TrialResult};
use crate::error::{Error, Result};

/// Denominators at or below this count as degenerate.
const DEGENERATE_SPREAD: f64 = 1e-12;

pub const CSV_HEADER: &str =
    "t,policy,mean_reward,stderr_reward,mean_regret,stderr_regret,mean_norm_perf,stderr_norm_perf";

/// Marker for an undefined metric in CSV output.
pub const NA: &str = "NA";

/// Where `reward` sits between the exploit and optimal rewards, in percent.
/// `None` when the two baselines coincide.
pub fn normalized_performance(reward: f64, exploit_reward: f64, optimal_reward: f64) -> Option<f64> {
    let spread = optimal_reward - exploit_reward;
    if spread > DEGENERATE_SPREAD {
        Some(100.0 * (reward - exploit_reward) / spread)
    } else {
        None
    }
}

/// Prefix sums of `optimal_value − expected reward`.
pub fn cumulative_regret(result: &TrialResult, optimal_value: f64) -> Vec<f64> {
    result
        .expected
        .iter()
        .scan(0.0, |acc, &r| {
            *acc += optimal_value - r;
            Some(*acc)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricPoint {
    pub t: u64,
    pub mean_reward: f64,
    pub stderr_reward: f64,
    pub mean_regret: f64,
    pub stderr_regret: f64,
    pub mean_norm_perf: Option<f64>,
    pub stderr_norm_perf: Option<f64>,
}

/// Across-trial mean and standard error per round for one policy.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub policy: String,
    pub points: Vec<MetricPoint>,
}

impl MetricSeries {
    pub fn last(&self) -> Option<&MetricPoint> {
        self.points.last()
    }
}

/// Mean and `sd / sqrt(n)`; a single sample has standard error 0.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Groups trials by policy (in order of first appearance) and aggregates.
/// Undefined normalized values are left out of the mean; a round where
/// every trial is undefined stays undefined.
pub fn aggregate(trials: &[TrialResult]) -> Vec<MetricSeries> {
    let mut names: Vec<&str> = Vec::new();
    for t in trials {
        if !names.contains(&t.policy.as_str()) {
            names.push(&t.policy);
        }
    }
    names
        .into_iter()
        .map(|name| {
            let group: Vec<&TrialResult> = trials.iter().filter(|t| t.policy == name).collect();
            let regrets: Vec<Vec<f64>> = group
                .iter()
                .map(|r| cumulative_regret(r, r.optimal_value))
                .collect();
            let rounds = group.iter().map(|r| r.expected.len()).min().unwrap_or(0);
            let points = (0..rounds)
                .map(|k| {
                    let rewards: Vec<f64> = group.iter().map(|r| r.expected[k]).collect();
                    let regret: Vec<f64> = regrets.iter().map(|r| r[k]).collect();
                    let norm: Vec<f64> = group
                        .iter()
                        .filter_map(|r| normalized_performance(r.expected[k], r.exploit_value, r.optimal_value))
                        .collect();
                    let (mean_reward, stderr_reward) = mean_stderr(&rewards);
                    let (mean_regret, stderr_regret) = mean_stderr(&regret);
                    let (mean_norm_perf, stderr_norm_perf) = if norm.is_empty() {
                        (None, None)
                    } else {
                        let (m, s) = mean_stderr(&norm);
                        (Some(m), Some(s))
                    };
                    MetricPoint {
                        t: k as u64 + 1,
                        mean_reward,
                        stderr_reward,
                        mean_regret,
                        stderr_regret,
                        mean_norm_perf,
                        stderr_norm_perf,
                    }
                })
                .collect();
            MetricSeries {
                policy: name.to_string(),
                points,
            }
        })
        .collect()
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<MetricSeries>> {
    Ok(aggregate(&run_trials(config)?))
}

fn fmt_value(x: f64) -> String {
    format!("{x:.12e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| NA.to_string(), fmt_value)
}

/// Writes the metric CSV; rows are grouped by policy, then ordered by round.
pub fn emit_csv(series: &[MetricSeries], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for s in series {
            for p in &s.points {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    p.t,
                    s.policy,
                    fmt_value(p.mean_reward),
                    fmt_value(p.stderr_reward),
                    fmt_value(p.mean_regret),
                    fmt_value(p.stderr_regret),
                    fmt_opt(p.mean_norm_perf),
                    fmt_opt(p.stderr_norm_perf),
                )?;
            }
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// Parses a file written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<MetricSeries>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::parse(path, e))?;
    let header = reader.headers().map_err(|e| Error::parse(path, e))?.clone();
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(Error::parse(path, "unexpected header"));
    }
    let mut out: Vec<MetricSeries> = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::parse(path, e))?;
        let bad = |what: &str| Error::parse(path, format!("row {}: bad {what}", line + 2));
        let num = |k: usize, what: &str| row[k].parse::<f64>().map_err(|_| bad(what));
        let opt = |k: usize, what: &str| -> Result<Option<f64>> {
            if &row[k] == NA {
                Ok(None)
            } else {
                num(k, what).map(Some)
            }
        };
        let point = MetricPoint {
            t: row[0].parse().map_err(|_| bad("t"))?,
            mean_reward: num(2, "mean_reward")?,
            stderr_reward: num(3, "stderr_reward")?,
            mean_regret: num(4, "mean_regret")?,
            stderr_regret: num(5, "stderr_regret")?,
            mean_norm_perf: opt(6, "mean_norm_perf")?,
            stderr_norm_perf: opt(7, "stderr_norm_perf")?,
        };
        let policy = &row[1];
        match out.iter_mut().find(|s| s.policy == policy) {
            Some(s) => s.points.push(point),
            None => out.push(MetricSeries {
                policy: policy.to_string(),
                points: vec![point],
            }),
        }
    }
    Ok(out)
}

/// Dumps every recorded bound table: one row per (trial, round, target, level).
pub fn write_ucb_trace(trials: &[TrialResult], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "policy,seed,t,target,level,ucb")?;
        for r in trials {
            for (k, grid) in r.ucb_trace.iter().enumerate() {
                let Some(grid) = grid else { continue };
                for i in 0..grid.n_targets() {
                    for j in 0..grid.n_levels() {
                        writeln!(w, "{},{},{},{i},{j},{}", r.policy, r.seed, k + 1, fmt_value(grid.get(i, j)))?;
                    }
                }
            }
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}
