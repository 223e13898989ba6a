//! Command-line shell around the qstab library: training, evaluation,
//! reward ablations, and artifact inspection.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use qstab::baseline::LyapunovConfig;
use qstab::bench::{
    evaluate_controller, Controller, EvalInitMode, EvalProtocol, EvalReport,
};
use qstab::catalog::{self, SystemCatalogEntry};
use qstab::config::{Checkpoint, ExperimentConfig};
use qstab::ppo::train;
use qstab::qmat::ComplexMatrix;
use qstab::rewards::{default_spec, RewardVariant};
use qstab::QstabError;

#[derive(Parser)]
#[command(name = "qstab", version, about = "Measurement-feedback stabilization lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train an agent from a TOML experiment config.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's root seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Base directory for the timestamped run directory.
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Evaluate a controller over an initial-state/noise grid.
    Eval {
        /// Trained agent; required for --controller policy.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// policy | lyapunov | zero
        #[arg(long, default_value = "policy")]
        controller: String,
        /// Catalog system; defaults to the checkpoint's (or bell2q).
        #[arg(long)]
        system: Option<String>,
        /// Measurement efficiency override.
        #[arg(long)]
        eta: Option<f64>,
        /// Observation delay in steps.
        #[arg(long, default_value_t = 0)]
        delay: usize,
        /// haar | diagonal | fixed:target | fixed:bell | fixed:ghz
        #[arg(long, default_value = "haar")]
        init: String,
        #[arg(long, default_value_t = 20)]
        n_init: usize,
        #[arg(long, default_value_t = 20)]
        n_noise: usize,
        /// Episode horizon in a.u.; defaults to the system's training horizon.
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Train one agent per reward variant and emit a comparison table.
    Ablate {
        #[arg(long)]
        config: PathBuf,
        /// Uniformly scales every variant's total_steps (desk-scale budgets).
        #[arg(long, default_value_t = 1.0)]
        budget_scale: f64,
        #[arg(long, default_value_t = 20)]
        n_init: usize,
        #[arg(long, default_value_t = 20)]
        n_noise: usize,
        /// Evaluation horizon; the ablation protocol default is 100 a.u.
        #[arg(long, default_value_t = 100.0)]
        t_max: f64,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Print a checkpoint's metadata.
    InspectCheckpoint { path: PathBuf },
    /// Print a catalog system's matrices and defaults.
    DumpSystem { name: String },
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("QSTAB_WORKERS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                // Ignore rebuild errors (e.g. pool already initialized).
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: QSTAB_WORKERS must be a positive integer, got '{v}'");
                return ExitCode::from(1);
            }
        }
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                QstabError::IncompatibleCheckpoint(_) => 3,
                QstabError::TrajectoryDiverged { .. } => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<(), QstabError> {
    match cli.command {
        Command::Train { config, seed, out } => cmd_train(&config, seed, &out),
        Command::Eval {
            checkpoint,
            controller,
            system,
            eta,
            delay,
            init,
            n_init,
            n_noise,
            t_max,
            seed,
            out,
        } => cmd_eval(
            checkpoint.as_deref(),
            &controller,
            system.as_deref(),
            eta,
            delay,
            &init,
            n_init,
            n_noise,
            t_max,
            seed,
            &out,
        ),
        Command::Ablate { config, budget_scale, n_init, n_noise, t_max, out } => {
            cmd_ablate(&config, budget_scale, n_init, n_noise, t_max, &out)
        }
        Command::InspectCheckpoint { path } => cmd_inspect(&path),
        Command::DumpSystem { name } => cmd_dump_system(&name),
    }
}

/// Creates runs/<stamp>-<label>/ with a VERSION stamp inside.
fn make_run_dir(base: &Path, label: &str) -> Result<PathBuf, QstabError> {
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    let dir = base.join(format!("{stamp}-{label}"));
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("VERSION"), concat!(env!("CARGO_PKG_VERSION"), "\n"))?;
    Ok(dir)
}

fn write_train_artifacts(
    dir: &Path,
    config: &ExperimentConfig,
    result: &qstab::ppo::TrainResult,
) -> Result<(), QstabError> {
    fs::write(dir.join("config.toml"), config.resolved_toml()?)?;
    let mut log = String::new();
    for entry in &result.logs {
        log.push_str(
            &serde_json::to_string(entry)
                .map_err(|e| QstabError::Config(format!("log serialize: {e}")))?,
        );
        log.push('\n');
    }
    fs::write(dir.join("train_log.jsonl"), log)?;
    Checkpoint::from_result(config, result).save(&dir.join("checkpoint.json"))?;
    Ok(())
}

fn cmd_train(config_path: &Path, seed: Option<u64>, out: &Path) -> Result<(), QstabError> {
    let mut config = ExperimentConfig::load(config_path)?;
    if let Some(s) = seed {
        config.train.seed = s;
    }
    let dir = make_run_dir(out, &format!("train-{}-{}", config.system, config.reward))?;
    println!("run directory: {}", dir.display());

    let envs = config.build_envs()?;
    let result = train(envs, &config.train)?;
    write_train_artifacts(&dir, &config, &result)?;

    if let Some(last) = result.logs.last() {
        println!(
            "trained {} env steps over {} iterations (final mean return {:.3}, final mean distance {:.4})",
            result.env_steps,
            result.logs.len(),
            last.mean_episode_return,
            last.mean_final_distance
        );
    }
    println!("checkpoint: {}", dir.join("checkpoint.json").display());
    Ok(())
}

fn parse_init(init: &str, entry: &SystemCatalogEntry) -> Result<EvalInitMode, QstabError> {
    match init {
        "haar" => Ok(EvalInitMode::HaarPure),
        "diagonal" => Ok(EvalInitMode::RandomDiagonal),
        "fixed:target" => Ok(EvalInitMode::Fixed(entry.target.clone())),
        "fixed:bell" => Ok(EvalInitMode::Fixed(catalog::bell_target())),
        "fixed:ghz" => Ok(EvalInitMode::Fixed(catalog::ghz_target(3))),
        other => Err(QstabError::Config(format!(
            "unknown init '{other}' (haar | diagonal | fixed:target | fixed:bell | fixed:ghz)"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    checkpoint: Option<&Path>,
    controller: &str,
    system: Option<&str>,
    eta: Option<f64>,
    delay: usize,
    init: &str,
    n_init: usize,
    n_noise: usize,
    t_max: Option<f64>,
    seed: u64,
    out: &Path,
) -> Result<(), QstabError> {
    let ckpt = checkpoint.map(Checkpoint::load).transpose()?;
    let system_name = match (system, &ckpt) {
        (Some(s), _) => s.to_string(),
        (None, Some(c)) => c.config.system.clone(),
        // `fixed:ghz` only fits the GHZ system; infer it when unambiguous.
        (None, None) if init == "fixed:ghz" => "ghz3q".to_string(),
        (None, None) => "bell2q".to_string(),
    };
    let entry = catalog::by_name(&system_name)?;
    if let Some(c) = &ckpt {
        if c.config.system != system_name {
            return Err(QstabError::IncompatibleCheckpoint(format!(
                "checkpoint was trained on '{}' but evaluation requested '{system_name}'",
                c.config.system
            )));
        }
    }

    let protocol = EvalProtocol {
        n_initial_states: n_init,
        n_noise_realizations: n_noise,
        t_max: t_max.unwrap_or(entry.default_max_time),
        seed,
        init_mode: parse_init(init, &entry)?,
        eta_override: eta,
        delay_steps: delay,
        ..EvalProtocol::default()
    };

    let lyapunov = LyapunovConfig::default();
    let report = match controller {
        "zero" => evaluate_controller(&Controller::Zero, &entry, &protocol)?,
        "lyapunov" => evaluate_controller(&Controller::Lyapunov(&lyapunov), &entry, &protocol)?,
        "policy" => {
            let c = ckpt.as_ref().ok_or_else(|| {
                QstabError::Config("--controller policy requires --checkpoint".into())
            })?;
            evaluate_controller(&Controller::Policy(&c.policy), &entry, &protocol)?
        }
        other => {
            return Err(QstabError::Config(format!(
                "unknown controller '{other}' (policy | lyapunov | zero)"
            )))
        }
    };

    let dir = make_run_dir(out, &format!("eval-{system_name}-{controller}"))?;
    report.write_csv(&dir)?;
    let json = serde_json::to_string(&report)
        .map_err(|e| QstabError::Config(format!("report serialize: {e}")))?;
    fs::write(dir.join("report.json"), json)?;

    let tags = if report.tags.is_empty() { String::new() } else { format!(" [{}]", report.tags.join(", ")) };
    println!("run directory: {}", dir.display());
    println!(
        "{} on {}{}: success rate {:.4}, mean stabilization time {:.3} a.u., mean final distance {:.4}",
        controller, system_name, tags, report.success_rate, report.mean_time, report.mean_final_distance
    );
    Ok(())
}

fn reward_form(variant: RewardVariant) -> &'static str {
    match variant {
        RewardVariant::Pnr | RewardVariant::Pnr1 | RewardVariant::Npnr => "nonlinear",
        RewardVariant::Plr | RewardVariant::Nplnr | RewardVariant::Nplpr => "linear",
        RewardVariant::Psr => "sparse",
        RewardVariant::Fpr => "fidelity",
    }
}

fn cmd_ablate(
    config_path: &Path,
    budget_scale: f64,
    n_init: usize,
    n_noise: usize,
    t_max: f64,
    out: &Path,
) -> Result<(), QstabError> {
    // Negated so NaN is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(budget_scale > 0.0) {
        return Err(QstabError::Config("--budget-scale must be positive".into()));
    }
    let base = ExperimentConfig::load(config_path)?;
    let dir = make_run_dir(out, &format!("ablate-{}", base.system))?;
    println!("run directory: {}", dir.display());

    let mut csv = String::from(
        "variant,partitioned,slope_e,slope_f,form,proximity_rewards,exploration_rewards,mean_time,success_rate,error\n",
    );
    for variant in RewardVariant::ALL {
        let mut config = base.clone();
        config.reward = variant.name().to_string();
        config.train.total_steps =
            ((base.train.total_steps as f64 * budget_scale).round() as u64).max(1);
        let spec = default_spec(variant);
        let (prox, expl) = if variant.is_partitioned() {
            (
                format!("[{};{}]", spec.proximity.r_lo, spec.proximity.r_hi),
                format!("[{};{}]", spec.exploration.r_lo, spec.exploration.r_hi),
            )
        } else {
            (format!("[{};{}]", spec.full.r_lo, spec.full.r_hi), String::from("-"))
        };

        // Per-variant failures become table rows, not fatal errors.
        let outcome = run_one_ablation(&config, n_init, n_noise, t_max, &dir, variant);
        match outcome {
            Ok(report) => {
                println!(
                    "{:6}: success rate {:.4}, mean time {:.3} a.u.",
                    variant.name(),
                    report.success_rate,
                    report.mean_time
                );
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},\n",
                    variant.name(),
                    variant.is_partitioned(),
                    spec.slope_e,
                    spec.slope_f,
                    reward_form(variant),
                    prox,
                    expl,
                    report.mean_time,
                    report.success_rate
                ));
            }
            Err(e) => {
                println!("{:6}: failed ({e})", variant.name());
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},,,\"{}\"\n",
                    variant.name(),
                    variant.is_partitioned(),
                    spec.slope_e,
                    spec.slope_f,
                    reward_form(variant),
                    prox,
                    expl,
                    e
                ));
            }
        }
    }
    fs::write(dir.join("ablation.csv"), csv)?;
    println!("table: {}", dir.join("ablation.csv").display());
    Ok(())
}

fn run_one_ablation(
    config: &ExperimentConfig,
    n_init: usize,
    n_noise: usize,
    t_max: f64,
    dir: &Path,
    variant: RewardVariant,
) -> Result<EvalReport, QstabError> {
    let envs = config.build_envs()?;
    let result = train(envs, &config.train)?;
    let subdir = dir.join(variant.name().to_lowercase());
    fs::create_dir_all(&subdir)?;
    write_train_artifacts(&subdir, config, &result)?;

    let entry = config.entry()?;
    let protocol = EvalProtocol {
        n_initial_states: n_init,
        n_noise_realizations: n_noise,
        t_max,
        seed: config.train.seed,
        init_mode: EvalInitMode::HaarPure,
        eta_override: config.eta_c,
        delay_steps: config.delay_steps,
        ..EvalProtocol::default()
    };
    let report = evaluate_controller(&Controller::Policy(&result.policy), &entry, &protocol)?;
    report.write_csv(&subdir)?;
    Ok(report)
}

fn cmd_inspect(path: &Path) -> Result<(), QstabError> {
    let ckpt = Checkpoint::load(path)?;
    println!("version:        {}", ckpt.version);
    println!("system:         {}", ckpt.config.system);
    println!("reward:         {}", ckpt.config.reward);
    println!("env steps:      {}", ckpt.env_steps);
    println!("seed:           {}", ckpt.config.train.seed);
    println!(
        "policy:         {:?} ({} params), log_std {:?}",
        ckpt.policy.mean_net.sizes,
        ckpt.policy.mean_net.params.len(),
        ckpt.policy.log_std
    );
    println!(
        "value net:      {:?} ({} params)",
        ckpt.value.net.sizes,
        ckpt.value.net.params.len()
    );
    println!(
        "rng counters:   sample {}, shuffle {}",
        ckpt.sample_rng.counter(),
        ckpt.shuffle_rng.counter()
    );
    Ok(())
}

fn print_matrix(label: &str, m: &ComplexMatrix) {
    println!("{label}:");
    for i in 0..m.dim() {
        let row: Vec<String> = (0..m.dim())
            .map(|j| {
                let v = m.get(i, j);
                if v.im == 0.0 {
                    format!("{:+.3}", v.re)
                } else {
                    format!("{:+.3}{:+.3}i", v.re, v.im)
                }
            })
            .collect();
        println!("  [{}]", row.join(", "));
    }
}

fn cmd_dump_system(name: &str) -> Result<(), QstabError> {
    let entry = catalog::by_name(name)?;
    println!("system:   {}", entry.name);
    println!("dim:      {}", entry.system.dim());
    println!(
        "kappa_c:  {}   eta_c: {}   dt: {}   T: {}",
        entry.system.kappa_c, entry.system.eta_c, entry.system.dt, entry.default_max_time
    );
    println!(
        "actions:  {} channels in [{}, {}]",
        entry.system.n_controls(),
        entry.system.action_low,
        entry.system.action_high
    );
    print_matrix("H0", &entry.system.h0);
    for (j, h) in entry.system.controls.iter().enumerate() {
        print_matrix(&format!("H{}", j + 1), h);
    }
    print_matrix("c", &entry.system.observable);
    print_matrix("target", entry.target.matrix());
    Ok(())
}
