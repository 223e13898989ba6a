//! Experiment configuration (TOML) and training checkpoints (versioned JSON).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::{self, SystemCatalogEntry};
use crate::env::{EpisodeConfig, InitialStateMode, QuantumEnv};
use crate::error::QstabError;
use crate::ppo::{GaussianPolicy, TrainConfig, TrainResult, ValueNet};
use crate::rewards::{default_spec, RewardSpec, RewardVariant};
use crate::rng::{NoiseStream, StreamKind};

/// A full experiment: system, reward, imperfections, and training
/// hyperparameters. Unknown TOML keys are rejected to catch typos.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub system: String,
    pub reward: String,
    /// Measurement efficiency override; None keeps the catalog value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_c: Option<f64>,
    /// Observation delay in integrator steps.
    pub delay_steps: usize,
    /// Episode horizon in a.u.; None uses the catalog default per system.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_time: Option<f64>,
    pub success_window: usize,
    /// "haar_pure" or "random_diagonal".
    pub init_mode: String,
    pub train: TrainConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            system: "bell2q".to_string(),
            reward: "PNR".to_string(),
            eta_c: None,
            delay_steps: 0,
            max_time: None,
            success_window: 10,
            init_mode: "haar_pure".to_string(),
            train: TrainConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, QstabError> {
        let config: Self =
            toml::from_str(s).map_err(|e| QstabError::Config(format!("TOML parse: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, QstabError> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    /// Serializes the fully resolved configuration (catalog defaults filled
    /// in), suitable as a run-directory snapshot.
    pub fn resolved_toml(&self) -> Result<String, QstabError> {
        let mut resolved = self.clone();
        let entry = resolved.entry()?;
        resolved.max_time = Some(self.max_time.unwrap_or(entry.default_max_time));
        resolved.eta_c = Some(self.eta_c.unwrap_or(entry.system.eta_c));
        toml::to_string_pretty(&resolved)
            .map_err(|e| QstabError::Config(format!("TOML serialize: {e}")))
    }

    pub fn validate(&self) -> Result<(), QstabError> {
        catalog::by_name(&self.system)?;
        RewardVariant::from_name(&self.reward)?;
        self.initial_state_mode()?;
        if let Some(eta) = self.eta_c {
            if !(0.0..=1.0).contains(&eta) {
                return Err(QstabError::Config("eta_c must lie in [0, 1]".into()));
            }
        }
        self.train.validate()?;
        Ok(())
    }

    pub fn entry(&self) -> Result<SystemCatalogEntry, QstabError> {
        catalog::by_name(&self.system)
    }

    pub fn reward_spec(&self) -> Result<RewardSpec, QstabError> {
        Ok(default_spec(RewardVariant::from_name(&self.reward)?))
    }

    pub fn initial_state_mode(&self) -> Result<InitialStateMode, QstabError> {
        match self.init_mode.as_str() {
            "haar_pure" => Ok(InitialStateMode::HaarPure),
            "random_diagonal" => Ok(InitialStateMode::RandomDiagonal),
            other => Err(QstabError::Config(format!(
                "unknown init_mode '{other}' (expected haar_pure or random_diagonal)"
            ))),
        }
    }

    pub fn episode_config(&self, entry: &SystemCatalogEntry) -> Result<EpisodeConfig, QstabError> {
        Ok(EpisodeConfig {
            max_time: self.max_time.unwrap_or(entry.default_max_time),
            dt: entry.system.dt,
            success_window: self.success_window,
            partition_d: self.reward_spec()?.d,
            delay_steps: self.delay_steps,
            initial_state_mode: self.initial_state_mode()?,
        })
    }

    /// Builds the training environments, one noise/init stream pair per env.
    pub fn build_envs(&self) -> Result<Vec<QuantumEnv>, QstabError> {
        let entry = self.entry()?;
        let mut system = entry.system.clone();
        if let Some(eta) = self.eta_c {
            system.eta_c = eta;
        }
        let reward = self.reward_spec()?;
        let episode = self.episode_config(&entry)?;
        (0..self.train.n_envs)
            .map(|i| {
                QuantumEnv::new(
                    system.clone(),
                    entry.target.clone(),
                    reward.clone(),
                    episode.clone(),
                    NoiseStream::split(self.train.seed, StreamKind::SmeNoise, i as u64),
                    NoiseStream::split(self.train.seed, StreamKind::InitState, i as u64),
                )
            })
            .collect()
    }
}

pub const CHECKPOINT_VERSION: u32 = 1;

/// Everything needed to resume or evaluate a trained agent.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub config: ExperimentConfig,
    pub policy: GaussianPolicy,
    pub value: ValueNet,
    pub env_steps: u64,
    pub sample_rng: NoiseStream,
    pub shuffle_rng: NoiseStream,
}

impl Checkpoint {
    pub fn from_result(config: &ExperimentConfig, result: &TrainResult) -> Self {
        Self {
            version: CHECKPOINT_VERSION,
            config: config.clone(),
            policy: result.policy.clone(),
            value: result.value.clone(),
            env_steps: result.env_steps,
            sample_rng: result.sample_rng.clone(),
            shuffle_rng: result.shuffle_rng.clone(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), QstabError> {
        let json = serde_json::to_string(self)
            .map_err(|e| QstabError::Config(format!("checkpoint serialize: {e}")))?;
        fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, QstabError> {
        let json = fs::read_to_string(path)?;
        let ckpt: Self = serde_json::from_str(&json)
            .map_err(|e| QstabError::IncompatibleCheckpoint(format!("parse: {e}")))?;
        if ckpt.version != CHECKPOINT_VERSION {
            return Err(QstabError::IncompatibleCheckpoint(format!(
                "version {} (this build reads {CHECKPOINT_VERSION})",
                ckpt.version
            )));
        }
        ckpt.config.validate()?;
        let entry = ckpt.config.entry()?;
        let n = entry.system.dim();
        let obs_len = 2 * n * n;
        if ckpt.policy.mean_net.input_len() != obs_len
            || ckpt.policy.mean_net.output_len() != entry.system.n_controls()
        {
            return Err(QstabError::IncompatibleCheckpoint(format!(
                "policy shape {}->{} does not match system '{}'",
                ckpt.policy.mean_net.input_len(),
                ckpt.policy.mean_net.output_len(),
                ckpt.config.system
            )));
        }
        Ok(ckpt)
    }
}
