//! The training loop: rollout collection across environments, GAE, epochs of
//! clipped-surrogate minibatch updates, and TD value regression.

use serde::{Deserialize, Serialize};

use super::adam::{clip_grad_norm, Adam};
use super::gae::{gae, normalize_advantages};
use super::loss::{policy_loss_and_grads, value_loss_and_grads, PolicyBatch};
use super::policy::{GaussianPolicy, ValueNet};
use crate::env::QuantumEnv;
use crate::error::QstabError;
use crate::rng::{NoiseStream, StreamKind};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub total_steps: u64,
    /// Steps collected per environment per iteration.
    pub rollout_len: usize,
    pub n_envs: usize,
    pub minibatch_size: usize,
    pub epochs: usize,
    pub gamma: f64,
    pub gae_lambda: f64,
    /// Clip ratio of the surrogate objective.
    pub clip: f64,
    /// Initial learning rate; decays linearly to zero over total_steps.
    pub lr_start: f64,
    pub ent_coef: f64,
    pub vf_coef: f64,
    pub max_grad_norm: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            total_steps: 10_000_000,
            rollout_len: 2048,
            n_envs: 1,
            minibatch_size: 256,
            epochs: 10,
            gamma: 0.99,
            gae_lambda: 0.95,
            clip: 0.2,
            lr_start: 5e-7,
            ent_coef: 0.0,
            vf_coef: 0.5,
            max_grad_norm: 0.5,
            seed: 0,
        }
    }
}

impl TrainConfig {
    // Negated comparisons so NaN fails validation too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), QstabError> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(QstabError::InvalidSpec("gamma must lie in (0, 1]".into()));
        }
        if !(self.clip > 0.0 && self.clip < 1.0) {
            return Err(QstabError::InvalidSpec("clip must lie in (0, 1)".into()));
        }
        for (name, v) in [
            ("total_steps", self.total_steps as f64),
            ("rollout_len", self.rollout_len as f64),
            ("n_envs", self.n_envs as f64),
            ("minibatch_size", self.minibatch_size as f64),
            ("epochs", self.epochs as f64),
            ("lr_start", self.lr_start),
        ] {
            if !(v > 0.0) {
                return Err(QstabError::InvalidSpec(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    /// Linear decay: lr(step) = lr_start * (1 - step / total_steps).
    pub fn lr_at(&self, step: u64) -> f64 {
        self.lr_start * (1.0 - step as f64 / self.total_steps as f64).max(0.0)
    }
}

/// Per-iteration training log record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub env_steps: u64,
    pub lr: f64,
    pub mean_episode_return: f64,
    pub mean_final_distance: f64,
    pub success_fraction: f64,
    pub episodes_finished: usize,
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub clip_fraction: f64,
    pub skipped_samples: usize,
}

/// Experience gathered during one collection phase, stored flat across
/// environments with per-env segment boundaries.
#[derive(Default)]
pub struct RolloutBuffer {
    pub obs: Vec<Vec<f64>>,
    pub actions: Vec<Vec<f64>>,
    pub logps: Vec<f64>,
    pub rewards: Vec<f64>,
    pub values: Vec<f64>,
    pub dones: Vec<bool>,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
}

impl RolloutBuffer {
    fn clear(&mut self) {
        self.obs.clear();
        self.actions.clear();
        self.logps.clear();
        self.rewards.clear();
        self.values.clear();
        self.dones.clear();
        self.advantages.clear();
        self.returns.clear();
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }
}

pub struct TrainResult {
    pub policy: GaussianPolicy,
    pub value: ValueNet,
    pub logs: Vec<IterationLog>,
    pub env_steps: u64,
    /// Final RNG states, persisted so checkpoints capture the full state.
    pub sample_rng: NoiseStream,
    pub shuffle_rng: NoiseStream,
}

struct EpisodeTracker {
    current_return: f64,
    returns: Vec<f64>,
    final_distances: Vec<f64>,
    successes: usize,
}

/// Runs PPO training over the supplied environments. Environments are stepped
/// sequentially in a fixed order, so a single-worker run is bit-reproducible
/// from the seed.
pub fn train(mut envs: Vec<QuantumEnv>, config: &TrainConfig) -> Result<TrainResult, QstabError> {
    config.validate()?;
    if envs.is_empty() {
        return Err(QstabError::InvalidSpec("train needs at least one environment".into()));
    }
    let obs_len = envs[0].observation_len();
    let act_len = envs[0].action_len();

    let mut init_rng = NoiseStream::split(config.seed, StreamKind::WeightInit, 0);
    let mut policy = GaussianPolicy::new(obs_len, act_len, &mut init_rng);
    let mut value = ValueNet::new(obs_len, &mut init_rng);
    let mut sample_rng = NoiseStream::split(config.seed, StreamKind::PolicySample, 0);
    let mut shuffle_rng = NoiseStream::split(config.seed, StreamKind::PolicySample, 1);

    let mut policy_opt = Adam::new(policy.mean_net.params.len());
    let mut log_std_opt = Adam::new(policy.log_std.len());
    let mut value_opt = Adam::new(value.net.params.len());

    let mut current_obs: Vec<Vec<f64>> = envs.iter_mut().map(|e| e.reset().values).collect();
    let mut trackers: Vec<EpisodeTracker> = envs
        .iter()
        .map(|_| EpisodeTracker {
            current_return: 0.0,
            returns: Vec::new(),
            final_distances: Vec::new(),
            successes: 0,
        })
        .collect();

    let mut buffer = RolloutBuffer::default();
    let mut logs = Vec::new();
    let mut env_steps: u64 = 0;
    let mut iteration = 0;

    while env_steps < config.total_steps {
        buffer.clear();
        let mut segment_bootstraps = Vec::with_capacity(envs.len());

        for (env_idx, env) in envs.iter_mut().enumerate() {
            for _ in 0..config.rollout_len {
                let obs = current_obs[env_idx].clone();
                let (action, logp) = policy.sample(&obs, &mut sample_rng);
                let v = value.value(&obs);
                let transition = env.step(&action)?;

                let tracker = &mut trackers[env_idx];
                tracker.current_return += transition.reward;
                if transition.done {
                    tracker.returns.push(tracker.current_return);
                    tracker.final_distances.push(transition.distance);
                    if transition.reason == Some(crate::env::TerminationReason::Success) {
                        tracker.successes += 1;
                    }
                    tracker.current_return = 0.0;
                    current_obs[env_idx] = env.reset().values;
                } else {
                    current_obs[env_idx] = transition.next_obs.values.clone();
                }

                buffer.obs.push(obs);
                buffer.actions.push(action);
                buffer.logps.push(logp);
                buffer.rewards.push(transition.reward);
                buffer.values.push(v);
                buffer.dones.push(transition.done);
                env_steps += 1;
            }
            // Bootstrap with V of the state the next rollout would start from.
            segment_bootstraps.push(value.value(&current_obs[env_idx]));
        }

        // GAE per env segment.
        for (env_idx, &bootstrap) in segment_bootstraps.iter().enumerate() {
            let lo = env_idx * config.rollout_len;
            let hi = lo + config.rollout_len;
            let (adv, ret) = gae(
                &buffer.rewards[lo..hi],
                &buffer.values[lo..hi],
                &buffer.dones[lo..hi],
                bootstrap,
                config.gamma,
                config.gae_lambda,
            );
            buffer.advantages.extend(adv);
            buffer.returns.extend(ret);
        }

        let lr = config.lr_at(env_steps.min(config.total_steps));
        let n = buffer.len();
        let mut indices: Vec<usize> = (0..n).collect();
        let mut iter_policy_loss = 0.0;
        let mut iter_value_loss = 0.0;
        let mut iter_entropy = 0.0;
        let mut iter_clip_fraction = 0.0;
        let mut iter_skipped = 0usize;
        let mut n_minibatches = 0usize;

        for _epoch in 0..config.epochs {
            // Fisher-Yates with the dedicated shuffle stream.
            for i in (1..n).rev() {
                let j = shuffle_rng.next_below(i as u64 + 1) as usize;
                indices.swap(i, j);
            }
            for chunk in indices.chunks(config.minibatch_size) {
                let obs: Vec<Vec<f64>> = chunk.iter().map(|&i| buffer.obs[i].clone()).collect();
                let actions: Vec<Vec<f64>> =
                    chunk.iter().map(|&i| buffer.actions[i].clone()).collect();
                let old_logps: Vec<f64> = chunk.iter().map(|&i| buffer.logps[i]).collect();
                let mut advantages: Vec<f64> =
                    chunk.iter().map(|&i| buffer.advantages[i]).collect();
                let targets: Vec<f64> = chunk.iter().map(|&i| buffer.returns[i]).collect();
                normalize_advantages(&mut advantages);

                let batch = PolicyBatch {
                    obs: &obs,
                    actions: &actions,
                    old_logps: &old_logps,
                    advantages: &advantages,
                };
                let (stats, mut net_grads, mut ls_grads) =
                    policy_loss_and_grads(&policy, &batch, config.clip, config.ent_coef);
                clip_grad_norm(&mut [&mut net_grads, &mut ls_grads], config.max_grad_norm);
                policy_opt.step(&mut policy.mean_net.params, &net_grads, lr);
                log_std_opt.step(&mut policy.log_std, &ls_grads, lr);
                policy.clamp_log_std();

                let (v_loss, mut v_grads) = value_loss_and_grads(&value, &obs, &targets);
                for g in &mut v_grads {
                    *g *= config.vf_coef;
                }
                clip_grad_norm(&mut [&mut v_grads], config.max_grad_norm);
                value_opt.step(&mut value.net.params, &v_grads, lr);

                iter_policy_loss += stats.loss;
                iter_value_loss += v_loss;
                iter_entropy += stats.entropy;
                iter_clip_fraction += stats.clip_fraction;
                iter_skipped += stats.skipped;
                n_minibatches += 1;
            }
        }

        if !policy.mean_net.params.iter().all(|p| p.is_finite())
            || !policy.log_std.iter().all(|p| p.is_finite())
            || !value.net.params.iter().all(|p| p.is_finite())
        {
            return Err(QstabError::InvalidSpec(format!(
                "non-finite parameters after update at step {env_steps}; aborting"
            )));
        }

        let inv_mb = 1.0 / n_minibatches.max(1) as f64;
        let (mean_return, mean_final_distance, success_fraction, episodes) = {
            let mut returns = Vec::new();
            let mut finals = Vec::new();
            let mut successes = 0;
            for t in &mut trackers {
                returns.append(&mut t.returns);
                finals.append(&mut t.final_distances);
                successes += t.successes;
                t.successes = 0;
            }
            let n_ep = returns.len();
            let mean = |v: &[f64]| {
                if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 }
            };
            (mean(&returns), mean(&finals), successes as f64 / n_ep.max(1) as f64, n_ep)
        };

        logs.push(IterationLog {
            iteration,
            env_steps,
            lr,
            mean_episode_return: mean_return,
            mean_final_distance,
            success_fraction,
            episodes_finished: episodes,
            policy_loss: iter_policy_loss * inv_mb,
            value_loss: iter_value_loss * inv_mb,
            entropy: iter_entropy * inv_mb,
            clip_fraction: iter_clip_fraction * inv_mb,
            skipped_samples: iter_skipped,
        });
        iteration += 1;
    }

    Ok(TrainResult { policy, value, logs, env_steps, sample_rng, shuffle_rng })
}
