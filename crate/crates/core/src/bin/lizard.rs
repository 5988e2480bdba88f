use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lizard::env::{compute_optimal, default_optimal_grid_step, generate_synthetic_instance};
use lizard::harness::{
    aggregate, emit_csv, run_trials, write_ucb_trace, ExperimentConfig, MetricSeries,
};
use lizard::instance::{validate_instance, InstanceFile, ProblemInstance};
use lizard::Error;

#[derive(Parser)]
#[command(name = "lizard", version, about = "Budgeted patrol effort with combinatorial Lipschitz bandits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write metrics.csv (and ucb_trace.csv when verbose).
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Sweep one configuration key across values; one CSV per value.
    Ablate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Configuration key to vary.
        #[arg(long)]
        param: String,
        /// Values to try, separated by `;` or `,`.
        #[arg(long)]
        values: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the best fixed assignment of an instance file as JSON.
    Optimal {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        grid_step: Option<f64>,
    },
    /// Check an instance file; exits 2 when it is invalid.
    Validate {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Write a synthetic instance file drawn from `--seed`.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

/// `--key value` for every configuration key.
#[derive(Args, Default)]
struct Overrides {
    #[arg(long = "n_targets", alias = "n-targets")]
    n_targets: Option<String>,
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    horizon: Option<String>,
    #[arg(long = "history_steps", alias = "history-steps")]
    history_steps: Option<String>,
    #[arg(long)]
    policies: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long = "radius_mode", alias = "radius-mode")]
    radius_mode: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long = "use_monotonicity", alias = "use-monotonicity")]
    use_monotonicity: Option<String>,
    #[arg(long = "use_zero_anchor", alias = "use-zero-anchor")]
    use_zero_anchor: Option<String>,
    #[arg(long = "use_cross_target", alias = "use-cross-target")]
    use_cross_target: Option<String>,
    #[arg(long = "lipschitz_override", alias = "lipschitz-override")]
    lipschitz_override: Option<String>,
    #[arg(long)]
    gap: Option<String>,
    #[arg(long = "bias_weight", alias = "bias-weight")]
    bias_weight: Option<String>,
    #[arg(long = "segments_min", alias = "segments-min")]
    segments_min: Option<String>,
    #[arg(long = "segments_max", alias = "segments-max")]
    segments_max: Option<String>,
    #[arg(long = "optimal_grid_step", alias = "optimal-grid-step")]
    optimal_grid_step: Option<String>,
    #[arg(long)]
    verbose: Option<String>,
}

impl Overrides {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("n_targets", &self.n_targets),
            ("budget", &self.budget),
            ("horizon", &self.horizon),
            ("history_steps", &self.history_steps),
            ("policies", &self.policies),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("radius_mode", &self.radius_mode),
            ("epsilon", &self.epsilon),
            ("use_monotonicity", &self.use_monotonicity),
            ("use_zero_anchor", &self.use_zero_anchor),
            ("use_cross_target", &self.use_cross_target),
            ("lipschitz_override", &self.lipschitz_override),
            ("gap", &self.gap),
            ("bias_weight", &self.bias_weight),
            ("segments_min", &self.segments_min),
            ("segments_max", &self.segments_max),
            ("optimal_grid_step", &self.optimal_grid_step),
            ("verbose", &self.verbose),
        ]
    }

    fn apply(&self, config: &mut ExperimentConfig) -> lizard::Result<()> {
        for (key, value) in self.pairs() {
            if let Some(v) = value {
                config.set(key, v)?;
            }
        }
        config.validate()
    }
}

fn load_config(path: Option<&Path>, overrides: &Overrides) -> lizard::Result<ExperimentConfig> {
    let mut config = match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    overrides.apply(&mut config)?;
    Ok(config)
}

fn create_dir(dir: &Path) -> lizard::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn summarize(series: &[MetricSeries]) {
    for s in series {
        if let Some(p) = s.last() {
            let norm = p
                .mean_norm_perf
                .map_or("NA".to_string(), |m| format!("{m:.2} ± {:.2}", p.stderr_norm_perf.unwrap_or(0.0)));
            println!(
                "{:<16} t={:<5} reward {:.4}  regret {:.3}  normalized {norm}",
                s.policy, p.t, p.mean_reward, p.mean_regret
            );
        }
    }
}

fn run(config: &ExperimentConfig, out: &Path, stem: &str) -> lizard::Result<()> {
    create_dir(out)?;
    let trials = run_trials(config)?;
    let series = aggregate(&trials);
    let path = out.join(format!("{stem}.csv"));
    emit_csv(&series, &path)?;
    if config.verbose {
        write_ucb_trace(&trials, &out.join(format!("{stem}_ucb_trace.csv")))?;
    }
    println!("wrote {}", path.display());
    summarize(&series);
    Ok(())
}

fn load_instance(path: &Path) -> lizard::Result<ProblemInstance> {
    InstanceFile::load(path)?
        .into_instance()
        .map_err(|msg| Error::Config(format!("{}: {msg}", path.display())))
}

fn execute(command: Command) -> lizard::Result<ExitCode> {
    match command {
        Command::Run {
            config,
            out,
            overrides,
        } => {
            let config = load_config(config.as_deref(), &overrides)?;
            run(&config, &out, "metrics")?;
        }
        Command::Ablate {
            config,
            out,
            param,
            values,
            overrides,
        } => {
            let base = load_config(config.as_deref(), &overrides)?;
            let sep = if values.contains(';') { ';' } else { ',' };
            for value in values.split(sep).map(str::trim).filter(|v| !v.is_empty()) {
                let mut config = base.clone();
                config.set(&param, value)?;
                config.validate()?;
                println!("{param} = {value}");
                run(&config, &out, &format!("ablate_{param}_{value}"))?;
            }
        }
        Command::Optimal { instance, grid_step } => {
            let inst = load_instance(&instance)?;
            let step = grid_step.unwrap_or_else(|| default_optimal_grid_step(&inst));
            let plan = compute_optimal(&inst, step)?;
            let json = serde_json::json!({
                "value": plan.value,
                "efforts": plan.efforts,
                "grid_step": plan.grid_step,
                "error_bound": plan.error_bound,
            });
            println!("{}", serde_json::to_string_pretty(&json).expect("json"));
        }
        Command::Validate { instance } => {
            let inst = match InstanceFile::load(&instance)?.into_instance() {
                Ok(inst) => inst,
                Err(msg) => {
                    println!("invalid: {msg}");
                    return Ok(ExitCode::from(2));
                }
            };
            let report = validate_instance(&inst);
            if report.is_valid() {
                println!("ok: {} targets, budget {}", inst.n_targets(), inst.budget());
            } else {
                println!("{report}");
                return Ok(ExitCode::from(2));
            }
        }
        Command::Generate { out, overrides } => {
            let config = load_config(None, &overrides)?;
            let inst = generate_synthetic_instance(&config.synthetic_spec(), config.seed)?;
            inst.save(&out)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Parse { .. } | Error::InvalidArgument(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
