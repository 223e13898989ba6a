//! qstab: feedback stabilization of entangled qubit states under continuous
//! measurement.
//!
//! The crate simulates small open quantum systems with the stochastic master
//! equation, trains a reinforcement-learning controller (PPO with a
//! partitioned nonlinear reward) to steer them onto entangled target states,
//! and ships the evaluation harness used to score controllers by
//! stabilization time and success rate.
//!
//! # Quick tour
//!
//! Step a measured two-qubit system with no control drive:
//!
//! ```
//! use qstab::catalog::bell2q;
//! use qstab::rng::{NoiseStream, StreamKind};
//! use qstab::sme::sme_step;
//!
//! let entry = bell2q();
//! let mut rho = entry.target.clone();
//! let mut noise = NoiseStream::split(0, StreamKind::SmeNoise, 0);
//! for _ in 0..100 {
//!     let out = sme_step(&entry.system, &rho, &[0.0, 0.0], &mut noise).unwrap();
//!     rho = out.next_state;
//! }
//! // The target commutes with the measurement, so the state stays put.
//! assert!(qstab::qmat::trace_distance_to_target(&entry.target, &rho).unwrap() < 1e-9);
//! ```
//!
//! Evaluate the partitioned nonlinear reward at its zone boundaries:
//!
//! ```
//! use qstab::rewards::{default_spec, evaluate, RewardVariant};
//!
//! let spec = default_spec(RewardVariant::Pnr);
//! assert_eq!(evaluate(&spec, 0.0, 0), 100.0);
//! assert_eq!(evaluate(&spec, 1.0, 0), -0.1);
//! ```
//!
//! Run a (tiny) training session end to end:
//!
//! ```
//! use qstab::config::ExperimentConfig;
//! use qstab::ppo::train;
//!
//! let mut config = ExperimentConfig::default();
//! config.train.total_steps = 256;
//! config.train.rollout_len = 128;
//! config.train.minibatch_size = 64;
//! config.train.epochs = 1;
//! let envs = config.build_envs().unwrap();
//! let result = train(envs, &config.train).unwrap();
//! assert_eq!(result.env_steps, 256);
//! ```

pub mod baseline;
pub mod bench;
pub mod catalog;
pub mod config;
pub mod env;
pub mod error;
pub mod ppo;
pub mod qmat;
pub mod rewards;
pub mod rng;
pub mod sme;

pub use error::QstabError;
