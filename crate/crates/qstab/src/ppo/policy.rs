//! Gaussian policy head and value network over the shared MLP body.

use serde::{Deserialize, Serialize};

use super::mlp::Mlp;
use crate::rng::NoiseStream;

pub const LOG_STD_MIN: f64 = -20.0;
pub const LOG_STD_MAX: f64 = 2.0;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

/// Diagonal Gaussian policy: a mean network plus a state-independent
/// log-standard-deviation per action channel.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaussianPolicy {
    pub mean_net: Mlp,
    pub log_std: Vec<f64>,
}

impl GaussianPolicy {
    /// 2x128 tanh body, small-scale final layer, log_std starting at 0.
    pub fn new(obs_len: usize, action_len: usize, rng: &mut NoiseStream) -> Self {
        let mean_net = Mlp::init(&[obs_len, 128, 128, action_len], 2f64.sqrt(), 0.01, rng);
        Self { mean_net, log_std: vec![0.0; action_len] }
    }

    pub fn action_len(&self) -> usize {
        self.log_std.len()
    }

    pub fn clamp_log_std(&mut self) {
        for ls in &mut self.log_std {
            *ls = ls.clamp(LOG_STD_MIN, LOG_STD_MAX);
        }
    }

    /// Mean and log_std at an observation.
    pub fn forward(&self, obs: &[f64]) -> (Vec<f64>, &[f64]) {
        (self.mean_net.forward(obs), &self.log_std)
    }

    /// Deterministic evaluation-mode action: the mean.
    pub fn act_deterministic(&self, obs: &[f64]) -> Vec<f64> {
        self.mean_net.forward(obs)
    }

    /// Samples action = mean + exp(log_std) * eps and returns its log-density.
    pub fn sample(&self, obs: &[f64], rng: &mut NoiseStream) -> (Vec<f64>, f64) {
        let mean = self.mean_net.forward(obs);
        let action: Vec<f64> = mean
            .iter()
            .zip(&self.log_std)
            .map(|(m, ls)| m + ls.exp() * rng.next_standard_normal())
            .collect();
        let logp = gaussian_log_prob(&mean, &self.log_std, &action);
        (action, logp)
    }

    /// Log-density of a given action at a given observation.
    pub fn log_prob(&self, obs: &[f64], action: &[f64]) -> f64 {
        let mean = self.mean_net.forward(obs);
        gaussian_log_prob(&mean, &self.log_std, action)
    }

    /// Entropy of the diagonal Gaussian (state-independent).
    pub fn entropy(&self) -> f64 {
        self.log_std.iter().map(|ls| ls + 0.5 + HALF_LN_2PI).sum()
    }
}

/// Diagonal Gaussian log-density.
pub fn gaussian_log_prob(mean: &[f64], log_std: &[f64], action: &[f64]) -> f64 {
    mean.iter()
        .zip(log_std)
        .zip(action)
        .map(|((m, ls), a)| {
            let z = (a - m) / ls.exp();
            -0.5 * z * z - ls - HALF_LN_2PI
        })
        .sum()
}

/// Gradient of the log-density with respect to the mean and log_std entries.
pub fn gaussian_log_prob_grads(
    mean: &[f64],
    log_std: &[f64],
    action: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let mut d_mean = Vec::with_capacity(mean.len());
    let mut d_log_std = Vec::with_capacity(mean.len());
    for ((m, ls), a) in mean.iter().zip(log_std).zip(action) {
        let var = (2.0 * ls).exp();
        let diff = a - m;
        d_mean.push(diff / var);
        d_log_std.push(diff * diff / var - 1.0);
    }
    (d_mean, d_log_std)
}

/// Scalar state-value network with the same body shape as the policy.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValueNet {
    pub net: Mlp,
}

impl ValueNet {
    pub fn new(obs_len: usize, rng: &mut NoiseStream) -> Self {
        Self { net: Mlp::init(&[obs_len, 128, 128, 1], 2f64.sqrt(), 1.0, rng) }
    }

    pub fn value(&self, obs: &[f64]) -> f64 {
        self.net.forward(obs)[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn density_oracle(mean: &[f64], log_std: &[f64], action: &[f64]) -> f64 {
        // Product of 1-D normal densities, evaluated then logged.
        let mut p = 1.0;
        for ((m, ls), a) in mean.iter().zip(log_std).zip(action) {
            let s = ls.exp();
            p *= (-((a - m) * (a - m)) / (2.0 * s * s)).exp()
                / (s * (2.0 * std::f64::consts::PI).sqrt());
        }
        p.ln()
    }

    #[test]
    fn log_prob_matches_density_oracle() {
        let mut rng = NoiseStream::new(21);
        for _ in 0..12 {
            let mean: Vec<f64> = (0..3).map(|_| rng.next_standard_normal()).collect();
            let log_std: Vec<f64> = (0..3).map(|_| rng.next_standard_normal() * 0.3).collect();
            let action: Vec<f64> = (0..3).map(|_| rng.next_standard_normal()).collect();
            let lp = gaussian_log_prob(&mean, &log_std, &action);
            let oracle = density_oracle(&mean, &log_std, &action);
            assert!((lp - oracle).abs() < 1e-10, "{lp} vs {oracle}");
        }
    }

    #[test]
    fn tiny_log_std_collapses_to_mean() {
        let mut rng = NoiseStream::new(5);
        let mut policy = GaussianPolicy::new(4, 2, &mut rng);
        policy.log_std = vec![LOG_STD_MIN; 2];
        let obs = vec![0.1, -0.2, 0.3, 0.4];
        let (action, _) = policy.sample(&obs, &mut rng);
        let mean = policy.act_deterministic(&obs);
        for (a, m) in action.iter().zip(&mean) {
            assert!((a - m).abs() < 1e-8);
        }
    }

    #[test]
    fn deterministic_mode_returns_mean() {
        let mut rng = NoiseStream::new(6);
        let policy = GaussianPolicy::new(4, 2, &mut rng);
        let obs = vec![0.5; 4];
        assert_eq!(policy.act_deterministic(&obs), policy.mean_net.forward(&obs));
    }

    #[test]
    fn log_prob_grads_match_finite_differences() {
        let mean = vec![0.2, -0.4];
        let log_std = vec![0.1, -0.3];
        let action = vec![0.5, 0.0];
        let (dm, dls) = gaussian_log_prob_grads(&mean, &log_std, &action);
        let h = 1e-6;
        for i in 0..2 {
            let mut m2 = mean.clone();
            m2[i] += h;
            let up = gaussian_log_prob(&m2, &log_std, &action);
            m2[i] -= 2.0 * h;
            let down = gaussian_log_prob(&m2, &log_std, &action);
            assert!(((up - down) / (2.0 * h) - dm[i]).abs() < 1e-6);

            let mut ls2 = log_std.clone();
            ls2[i] += h;
            let up = gaussian_log_prob(&mean, &ls2, &action);
            ls2[i] -= 2.0 * h;
            let down = gaussian_log_prob(&mean, &ls2, &action);
            assert!(((up - down) / (2.0 * h) - dls[i]).abs() < 1e-6);
        }
    }
}
