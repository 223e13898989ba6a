//! Evaluation harness: initial-state grids, trajectory ensembles,
//! stabilization-time and success-rate metrics, and report aggregation.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{lyapunov_control, LyapunovConfig};
use crate::catalog::SystemCatalogEntry;
use crate::env::{
    decode_matrix, sample_haar_pure, sample_random_diagonal, EpisodeConfig,
    InitialStateMode, Observation, QuantumEnv, TerminationReason,
};
use crate::error::QstabError;
use crate::ppo::GaussianPolicy;
use crate::qmat::DensityMatrix;
use crate::rewards::{default_spec, RewardVariant};
use crate::rng::{NoiseStream, StreamKind};

/// Which initial states the evaluation grid draws.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalInitMode {
    HaarPure,
    RandomDiagonal,
    /// Every grid cell starts from the same fixed state.
    Fixed(DensityMatrix),
}

/// Grid shape and thresholds of one evaluation run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalProtocol {
    pub n_initial_states: usize,
    pub n_noise_realizations: usize,
    /// Episode horizon in a.u.; non-convergent trajectories contribute this
    /// value to the mean time.
    pub t_max: f64,
    /// Success threshold on the distance.
    pub d: f64,
    pub success_window: usize,
    pub seed: u64,
    pub init_mode: EvalInitMode,
    /// Measurement efficiency override (None keeps the system's own).
    pub eta_override: Option<f64>,
    /// Observation delay in steps.
    pub delay_steps: usize,
    /// Keep every k-th distance sample in reports.
    pub downsample: usize,
}

impl Default for EvalProtocol {
    fn default() -> Self {
        Self {
            n_initial_states: 50,
            n_noise_realizations: 50,
            t_max: 100.0,
            d: 0.001,
            success_window: 10,
            seed: 0,
            init_mode: EvalInitMode::HaarPure,
            eta_override: None,
            delay_steps: 0,
            downsample: 10,
        }
    }
}

/// The controller under evaluation. Policies act deterministically (mean
/// action, no exploration noise).
pub enum Controller<'a> {
    Zero,
    Policy(&'a GaussianPolicy),
    Lyapunov(&'a LyapunovConfig),
}

impl Controller<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            Controller::Zero => "zero",
            Controller::Policy(_) => "policy",
            Controller::Lyapunov(_) => "lyapunov",
        }
    }

    fn act(
        &self,
        obs: &Observation,
        entry: &SystemCatalogEntry,
    ) -> Result<Vec<f64>, QstabError> {
        Ok(match self {
            Controller::Zero => vec![0.0; entry.system.n_controls()],
            Controller::Policy(p) => p.act_deterministic(&obs.values),
            Controller::Lyapunov(cfg) => {
                // The controller sees the same (possibly delayed) state the
                // agent would.
                let m = decode_matrix(obs)?;
                let rho = DensityMatrix::new_unchecked(m);
                lyapunov_control(cfg, &entry.system, &entry.target, &rho)
            }
        })
    }
}

/// One trajectory of the evaluation grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrajectoryOutcome {
    pub initial_state_index: usize,
    pub noise_index: usize,
    pub stabilization_time: f64,
    pub success: bool,
    pub diverged: bool,
    pub final_distance: f64,
    /// Downsampled distance curve, starting at t = 0.
    pub curve: Vec<f64>,
}

/// Aggregated evaluation results.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalReport {
    pub controller: String,
    pub protocol: EvalProtocol,
    /// Integrator step of the evaluated system, for time axes.
    pub dt: f64,
    pub trajectories: Vec<TrajectoryOutcome>,
    pub success_rate: f64,
    /// Mean stabilization time with non-convergent trajectories at t_max.
    pub mean_time: f64,
    /// Mean distance over the grid at the final recorded sample.
    pub mean_final_distance: f64,
    /// Per-initial-state mean curves (padded by holding the last value).
    pub mean_curves: Vec<Vec<f64>>,
    /// Equal-weight mean of the per-initial-state curves.
    pub grand_mean_curve: Vec<f64>,
    /// Tags such as eta=0.8 or delay=0.05.
    pub tags: Vec<String>,
}

/// First time the curve reaches <= d and stays there for a full success
/// window; t_max if that never happens.
pub fn stabilization_time(
    curve: &[f64],
    dt: f64,
    d: f64,
    window: usize,
    t_max: f64,
) -> Result<f64, QstabError> {
    if curve.is_empty() {
        return Err(QstabError::Usage("stabilization_time: empty curve".into()));
    }
    let mut streak = 0usize;
    for (k, &v) in curve.iter().enumerate() {
        if v <= d {
            streak += 1;
            if streak >= window {
                return Ok((k + 1 - window) as f64 * dt);
            }
        } else {
            streak = 0;
        }
    }
    Ok(t_max)
}

fn run_trajectory(
    controller: &Controller,
    entry: &SystemCatalogEntry,
    protocol: &EvalProtocol,
    initial: &DensityMatrix,
    init_index: usize,
    noise_index: usize,
) -> Result<TrajectoryOutcome, QstabError> {
    let mut system = entry.system.clone();
    if let Some(eta) = protocol.eta_override {
        system.eta_c = eta;
    }
    let dt = system.dt;
    let config = EpisodeConfig {
        max_time: protocol.t_max,
        dt,
        success_window: protocol.success_window,
        partition_d: protocol.d,
        delay_steps: protocol.delay_steps,
        initial_state_mode: InitialStateMode::Fixed(initial.clone()),
    };
    let traj_id = (init_index * protocol.n_noise_realizations + noise_index) as u64;
    let noise = NoiseStream::split(protocol.seed, StreamKind::SmeNoise, traj_id);
    // Reward is irrelevant for evaluation; any valid spec will do.
    let mut env = QuantumEnv::new(
        system,
        entry.target.clone(),
        default_spec(RewardVariant::Pnr),
        config,
        noise,
        NoiseStream::split(protocol.seed, StreamKind::InitState, traj_id),
    )?;

    let mut obs = env.reset();
    let mut curve = Vec::new();
    let mut full_index = 0usize;
    let push = |curve: &mut Vec<f64>, idx: usize, v: f64| {
        if idx.is_multiple_of(protocol.downsample) {
            curve.push(v);
        }
    };
    let mut dist = env.true_distance();
    push(&mut curve, full_index, dist);

    let mut streak = 0usize;
    let mut stab_step: Option<usize> = None;
    let diverged;
    loop {
        let action = controller.act(&obs, entry)?;
        let transition = env.step(&action)?;
        full_index += 1;
        dist = transition.distance;
        push(&mut curve, full_index, dist);
        if dist <= protocol.d {
            streak += 1;
            if streak >= protocol.success_window && stab_step.is_none() {
                stab_step = Some(full_index + 1 - protocol.success_window);
            }
        } else {
            streak = 0;
        }
        if transition.done {
            diverged = transition.reason == Some(TerminationReason::Diverged);
            break;
        }
        obs = transition.next_obs;
    }

    let success = stab_step.is_some();
    let stabilization_time = stab_step.map(|s| s as f64 * dt).unwrap_or(protocol.t_max);
    Ok(TrajectoryOutcome {
        initial_state_index: init_index,
        noise_index,
        stabilization_time,
        success,
        diverged,
        final_distance: dist,
        curve,
    })
}

/// Runs the full grid in parallel and aggregates. Deterministic for a fixed
/// protocol seed: every trajectory derives its streams from (seed, cell id).
pub fn evaluate_controller(
    controller: &Controller,
    entry: &SystemCatalogEntry,
    protocol: &EvalProtocol,
) -> Result<EvalReport, QstabError> {
    if protocol.downsample == 0
        || protocol.n_initial_states == 0
        || protocol.n_noise_realizations == 0
    {
        return Err(QstabError::InvalidSpec(
            "evaluation protocol counts and downsample must be >= 1".into(),
        ));
    }
    let initial_states: Vec<DensityMatrix> = (0..protocol.n_initial_states)
        .map(|i| {
            let mut rng = NoiseStream::split(protocol.seed, StreamKind::InitState, i as u64);
            match &protocol.init_mode {
                EvalInitMode::HaarPure => sample_haar_pure(entry.system.dim(), &mut rng),
                EvalInitMode::RandomDiagonal => {
                    sample_random_diagonal(entry.system.dim(), &mut rng)
                }
                EvalInitMode::Fixed(rho) => rho.clone(),
            }
        })
        .collect();

    let cells: Vec<(usize, usize)> = (0..protocol.n_initial_states)
        .flat_map(|i| (0..protocol.n_noise_realizations).map(move |j| (i, j)))
        .collect();
    let trajectories: Vec<TrajectoryOutcome> = cells
        .par_iter()
        .map(|&(i, j)| run_trajectory(controller, entry, protocol, &initial_states[i], i, j))
        .collect::<Result<_, _>>()?;

    let n = trajectories.len() as f64;
    let success_rate = trajectories.iter().filter(|t| t.success).count() as f64 / n;
    let mean_time = trajectories.iter().map(|t| t.stabilization_time).sum::<f64>() / n;
    let mean_final_distance = trajectories.iter().map(|t| t.final_distance).sum::<f64>() / n;

    let max_len = trajectories.iter().map(|t| t.curve.len()).max().unwrap_or(0);
    let mean_curves: Vec<Vec<f64>> = (0..protocol.n_initial_states)
        .map(|i| {
            let group: Vec<&TrajectoryOutcome> =
                trajectories.iter().filter(|t| t.initial_state_index == i).collect();
            (0..max_len)
                .map(|k| {
                    group
                        .iter()
                        .map(|t| *t.curve.get(k).or(t.curve.last()).unwrap_or(&0.0))
                        .sum::<f64>()
                        / group.len() as f64
                })
                .collect()
        })
        .collect();
    let grand_mean_curve: Vec<f64> = (0..max_len)
        .map(|k| mean_curves.iter().map(|c| c[k]).sum::<f64>() / mean_curves.len() as f64)
        .collect();

    let mut tags = Vec::new();
    if let Some(eta) = protocol.eta_override {
        tags.push(format!("eta={eta}"));
    }
    if protocol.delay_steps > 0 {
        tags.push(format!("delay={}", protocol.delay_steps as f64 * entry.system.dt));
    }

    Ok(EvalReport {
        controller: controller.name().to_string(),
        protocol: protocol.clone(),
        dt: entry.system.dt,
        trajectories,
        success_rate,
        mean_time,
        mean_final_distance,
        mean_curves,
        grand_mean_curve,
        tags,
    })
}

/// Relative comparison of two evaluation reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub mean_time_a: f64,
    pub mean_time_b: f64,
    /// Fractional reduction of a's mean time relative to b's.
    pub relative_time_reduction: f64,
    pub success_rate_a: f64,
    pub success_rate_b: f64,
    pub success_rate_delta: f64,
    pub protocols_match: bool,
}

pub fn compare_reports(a: &EvalReport, b: &EvalReport) -> ComparisonSummary {
    let protocols_match = a.protocol.n_initial_states == b.protocol.n_initial_states
        && a.protocol.n_noise_realizations == b.protocol.n_noise_realizations
        && a.protocol.t_max == b.protocol.t_max
        && a.protocol.d == b.protocol.d;
    ComparisonSummary {
        mean_time_a: a.mean_time,
        mean_time_b: b.mean_time,
        relative_time_reduction: if b.mean_time != 0.0 {
            (b.mean_time - a.mean_time) / b.mean_time
        } else {
            0.0
        },
        success_rate_a: a.success_rate,
        success_rate_b: b.success_rate,
        success_rate_delta: a.success_rate - b.success_rate,
        protocols_match,
    }
}

impl EvalReport {
    /// Writes trajectories.csv, summary.csv, and mean_curve.csv into `dir`.
    pub fn write_csv(&self, dir: &Path) -> Result<(), QstabError> {
        fs::create_dir_all(dir)?;
        let mut traj = fs::File::create(dir.join("trajectories.csv"))?;
        writeln!(
            traj,
            "initial_state_index,noise_index,stabilization_time,success,diverged,final_distance"
        )?;
        for t in &self.trajectories {
            writeln!(
                traj,
                "{},{},{},{},{},{}",
                t.initial_state_index,
                t.noise_index,
                t.stabilization_time,
                t.success,
                t.diverged,
                t.final_distance
            )?;
        }

        let mut summary = fs::File::create(dir.join("summary.csv"))?;
        writeln!(summary, "controller,tags,success_rate,mean_time,mean_final_distance")?;
        writeln!(
            summary,
            "{},{},{},{},{}",
            self.controller,
            self.tags.join(";"),
            self.success_rate,
            self.mean_time,
            self.mean_final_distance
        )?;

        let dt = self.protocol.downsample as f64 * self.dt;
        let mut curve = fs::File::create(dir.join("mean_curve.csv"))?;
        writeln!(curve, "t,mean_distance")?;
        for (k, v) in self.grand_mean_curve.iter().enumerate() {
            writeln!(curve, "{},{}", k as f64 * dt, v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
