//! The measurement-feedback MDP: observation encoding, episode lifecycle,
//! early termination, initial-state sampling, and the delay/efficiency
//! imperfection harness.

use std::collections::VecDeque;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::QstabError;
use crate::qmat::{trace_distance_to_target, ComplexMatrix, DensityMatrix};
use crate::rewards::{self, RewardSpec};
use crate::rng::NoiseStream;
use crate::sme::{sme_step, SystemSpec};

/// Flattened state vector: row-major real parts, then row-major imaginary
/// parts, length 2 n^2.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub values: Vec<f64>,
}

/// Flattens a density matrix into an observation vector.
pub fn encode(rho: &DensityMatrix) -> Observation {
    let m = rho.matrix();
    let mut values = Vec::with_capacity(2 * m.entries().len());
    values.extend(m.entries().iter().map(|c| c.re));
    values.extend(m.entries().iter().map(|c| c.im));
    Observation { values }
}

/// Inverse of [`encode`]; validates the result as a physical state.
pub fn decode(obs: &Observation) -> Result<DensityMatrix, QstabError> {
    let m = decode_matrix(obs)?;
    DensityMatrix::try_new(m)
}

/// Inverse of [`encode`] without the physicality check.
pub fn decode_matrix(obs: &Observation) -> Result<ComplexMatrix, QstabError> {
    let len = obs.values.len();
    let n_sq = len / 2;
    let n = (n_sq as f64).sqrt().round() as usize;
    if 2 * n * n != len {
        return Err(QstabError::Shape(format!(
            "observation length {len} is not 2 n^2 for integer n"
        )));
    }
    let data = (0..n_sq)
        .map(|i| Complex64::new(obs.values[i], obs.values[n_sq + i]))
        .collect();
    ComplexMatrix::from_vec(n, data)
}

/// Haar-random pure state via a normalized complex Gaussian ket.
pub fn sample_haar_pure(dim: usize, rng: &mut NoiseStream) -> DensityMatrix {
    let ket: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.next_standard_normal(), rng.next_standard_normal()))
        .collect();
    DensityMatrix::pure_from_ket(&ket)
}

/// Random diagonal (classical) mixed state with Dirichlet-ish weights.
pub fn sample_random_diagonal(dim: usize, rng: &mut NoiseStream) -> DensityMatrix {
    let mut weights: Vec<f64> = (0..dim).map(|_| -rng.next_uniform().ln()).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    DensityMatrix::new_unchecked(ComplexMatrix::diag(&weights))
}

/// How episodes choose their starting state.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialStateMode {
    HaarPure,
    RandomDiagonal,
    Fixed(DensityMatrix),
}

/// Episode-level parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpisodeConfig {
    /// Maximum episode time in a.u.
    pub max_time: f64,
    pub dt: f64,
    /// Consecutive in-zone steps required before declaring success.
    pub success_window: usize,
    /// Partition parameter; distance <= this counts as in-zone.
    pub partition_d: f64,
    /// Observation lag in steps; models state-estimation latency.
    pub delay_steps: usize,
    pub initial_state_mode: InitialStateMode,
}

impl EpisodeConfig {
    pub fn max_steps(&self) -> u64 {
        (self.max_time / self.dt).round() as u64
    }

    pub fn validate(&self) -> Result<(), QstabError> {
        let ratio = self.max_time / self.dt;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return Err(QstabError::InvalidSpec("max_time must be an integral number of dt steps".into()));
        }
        if self.success_window == 0 {
            return Err(QstabError::InvalidSpec("success_window must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            max_time: 20.0,
            dt: 0.001,
            success_window: 10,
            partition_d: 0.001,
            delay_steps: 0,
            initial_state_mode: InitialStateMode::HaarPure,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    Success,
    Timeout,
    Diverged,
}

/// One environment step as seen by the agent.
#[derive(Clone, Debug)]
pub struct Transition {
    pub obs: Observation,
    pub action: Vec<f64>,
    pub reward: f64,
    pub next_obs: Observation,
    pub done: bool,
    pub reason: Option<TerminationReason>,
    pub step_index: u64,
    /// Distance of the TRUE state after the step.
    pub distance: f64,
}

/// The MDP wrapper around the SME integrator. Reward and success are computed
/// on the true state; the agent observes the state `delay_steps` behind it.
pub struct QuantumEnv {
    system: SystemSpec,
    target: DensityMatrix,
    reward: RewardSpec,
    config: EpisodeConfig,
    state: DensityMatrix,
    delay_buf: VecDeque<DensityMatrix>,
    noise: NoiseStream,
    init_rng: NoiseStream,
    step_index: u64,
    in_zone_streak: usize,
    done: bool,
}

impl QuantumEnv {
    pub fn new(
        system: SystemSpec,
        target: DensityMatrix,
        reward: RewardSpec,
        config: EpisodeConfig,
        noise: NoiseStream,
        init_rng: NoiseStream,
    ) -> Result<Self, QstabError> {
        system.validate()?;
        reward.validate()?;
        config.validate()?;
        if target.dim() != system.dim() {
            return Err(QstabError::Shape(format!(
                "target dim {} vs system dim {}",
                target.dim(),
                system.dim()
            )));
        }
        if !target.is_pure() {
            return Err(QstabError::InvalidSpec("target state must be pure".into()));
        }
        let state = target.clone(); // replaced on reset
        Ok(Self {
            system,
            target,
            reward,
            config,
            state,
            delay_buf: VecDeque::new(),
            noise,
            init_rng,
            step_index: 0,
            in_zone_streak: 0,
            done: true,
        })
    }

    pub fn system(&self) -> &SystemSpec {
        &self.system
    }

    pub fn target(&self) -> &DensityMatrix {
        &self.target
    }

    pub fn config(&self) -> &EpisodeConfig {
        &self.config
    }

    pub fn observation_len(&self) -> usize {
        2 * self.system.dim() * self.system.dim()
    }

    pub fn action_len(&self) -> usize {
        self.system.n_controls()
    }

    /// Distance of the current true state to the target.
    pub fn true_distance(&self) -> f64 {
        trace_distance_to_target(&self.target, &self.state).expect("dims checked at construction")
    }

    fn sample_initial(&mut self) -> DensityMatrix {
        match &self.config.initial_state_mode {
            InitialStateMode::HaarPure => sample_haar_pure(self.system.dim(), &mut self.init_rng),
            InitialStateMode::RandomDiagonal => {
                sample_random_diagonal(self.system.dim(), &mut self.init_rng)
            }
            InitialStateMode::Fixed(rho) => rho.clone(),
        }
    }

    /// Starts a new episode and returns the (possibly delayed) observation.
    pub fn reset(&mut self) -> Observation {
        self.state = self.sample_initial();
        self.delay_buf.clear();
        // The buffer holds the last delay_steps + 1 states (front = oldest),
        // primed with rho_0 so the agent sees rho_0 for the first delay_steps
        // steps.
        if self.config.delay_steps > 0 {
            for _ in 0..=self.config.delay_steps {
                self.delay_buf.push_back(self.state.clone());
            }
        }
        self.step_index = 0;
        self.in_zone_streak = 0;
        self.done = false;
        encode(&self.state_seen_by_agent())
    }

    /// Replaces the noise and init streams (e.g. per-trajectory seeding).
    pub fn reseed(&mut self, noise: NoiseStream, init_rng: NoiseStream) {
        self.noise = noise;
        self.init_rng = init_rng;
    }

    fn state_seen_by_agent(&self) -> DensityMatrix {
        self.delay_buf.front().cloned().unwrap_or_else(|| self.state.clone())
    }

    /// Advances the true state one SME step under the (clamped) action.
    pub fn step(&mut self, action: &[f64]) -> Result<Transition, QstabError> {
        if self.done {
            return Err(QstabError::Usage("step called on a finished episode".into()));
        }
        let obs = encode(&self.state_seen_by_agent());
        let clamped: Vec<f64> = action.iter().map(|&u| self.system.clamp_action(u)).collect();

        let outcome = sme_step(&self.system, &self.state, &clamped, &mut self.noise);
        let (reward, distance, done, reason) = match outcome {
            Ok(step) => {
                if self.config.delay_steps > 0 {
                    self.delay_buf.push_back(step.next_state.clone());
                    self.delay_buf.pop_front();
                }
                self.state = step.next_state;
                self.step_index += 1;
                let distance = self.true_distance();
                let reward = rewards::evaluate(&self.reward, distance, self.step_index);
                if distance <= self.config.partition_d {
                    self.in_zone_streak += 1;
                } else {
                    self.in_zone_streak = 0;
                }
                if self.in_zone_streak >= self.config.success_window {
                    (reward, distance, true, Some(TerminationReason::Success))
                } else if self.step_index >= self.config.max_steps() {
                    (reward, distance, true, Some(TerminationReason::Timeout))
                } else {
                    (reward, distance, false, None)
                }
            }
            Err(QstabError::TrajectoryDiverged { .. }) => {
                // Bounded penalty: the exploration-zone floor.
                self.step_index += 1;
                let floor = rewards::evaluate(&self.reward, 1.0, self.step_index);
                (floor, 1.0, true, Some(TerminationReason::Diverged))
            }
            Err(e) => return Err(e),
        };
        self.done = done;
        Ok(Transition {
            obs,
            action: clamped,
            reward,
            next_obs: encode(&self.state_seen_by_agent()),
            done,
            reason,
            step_index: self.step_index,
            distance,
        })
    }
}
