//! Clipped-surrogate policy objective and value regression, both with
//! analytic gradients.

use super::policy::{gaussian_log_prob, gaussian_log_prob_grads, GaussianPolicy, ValueNet};

/// One minibatch of experience for a policy update.
pub struct PolicyBatch<'a> {
    pub obs: &'a [Vec<f64>],
    pub actions: &'a [Vec<f64>],
    /// Log-probs recorded under the rollout policy (theta').
    pub old_logps: &'a [f64],
    /// Normalized advantages.
    pub advantages: &'a [f64],
}

impl PolicyBatch<'_> {
    pub fn len(&self) -> usize {
        self.obs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obs.is_empty()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PolicyLossStats {
    /// Full minimized loss: -surrogate - ent_coef * entropy.
    pub loss: f64,
    /// Mean clipped surrogate objective.
    pub surrogate: f64,
    pub entropy: f64,
    /// Fraction of samples whose ratio left the clip interval.
    pub clip_fraction: f64,
    /// Samples dropped for non-finite importance ratios.
    pub skipped: usize,
    pub approx_kl: f64,
}

/// Evaluates the clipped surrogate loss and accumulates gradients for the
/// mean network and log_std. Per sample the objective is
/// min(ratio * A, clamp(ratio, 1 - clip, 1 + clip) * A); the loss is its
/// negated mean minus an entropy bonus.
pub fn policy_loss_and_grads(
    policy: &GaussianPolicy,
    batch: &PolicyBatch,
    clip: f64,
    ent_coef: f64,
) -> (PolicyLossStats, Vec<f64>, Vec<f64>) {
    let n = batch.len();
    let mut net_grads = vec![0.0; policy.mean_net.params.len()];
    let mut log_std_grads = vec![0.0; policy.log_std.len()];
    let mut stats = PolicyLossStats::default();

    let mut surrogate_sum = 0.0;
    let mut kl_sum = 0.0;
    let mut clipped = 0usize;
    let mut used = 0usize;

    // First pass decides per-sample coefficients; gradients are accumulated
    // in the same pass since each sample is independent.
    let mut pending = Vec::with_capacity(n);
    for i in 0..n {
        let cache = policy.mean_net.forward_cached(&batch.obs[i]);
        let mean = cache.output().to_vec();
        let logp = gaussian_log_prob(&mean, &policy.log_std, &batch.actions[i]);
        let ratio = (logp - batch.old_logps[i]).exp();
        if !ratio.is_finite() {
            stats.skipped += 1;
            continue;
        }
        used += 1;
        kl_sum += batch.old_logps[i] - logp;
        let adv = batch.advantages[i];
        let unclipped = ratio * adv;
        let clamped = ratio.clamp(1.0 - clip, 1.0 + clip) * adv;
        surrogate_sum += unclipped.min(clamped);
        if (ratio - 1.0).abs() > clip {
            clipped += 1;
        }
        // Gradient flows only through the unclipped branch when it is active.
        let coeff = if unclipped <= clamped { ratio * adv } else { 0.0 };
        pending.push((i, cache, mean, coeff));
    }
    if used == 0 {
        return (stats, net_grads, log_std_grads);
    }
    let inv = 1.0 / used as f64;

    for (i, cache, mean, coeff) in pending {
        if coeff == 0.0 {
            continue;
        }
        // Loss = -mean(objective), so each active sample contributes
        // -coeff/used * dlogp/dparams.
        let scale = -coeff * inv;
        let (d_mean, d_ls) = gaussian_log_prob_grads(&mean, &policy.log_std, &batch.actions[i]);
        let grad_out: Vec<f64> = d_mean.iter().map(|g| scale * g).collect();
        policy.mean_net.backward(&cache, &grad_out, &mut net_grads);
        for (g, d) in log_std_grads.iter_mut().zip(&d_ls) {
            *g += scale * d;
        }
    }

    // Entropy bonus: dH/dlog_std_j = 1.
    for g in &mut log_std_grads {
        *g -= ent_coef;
    }

    stats.surrogate = surrogate_sum * inv;
    stats.entropy = policy.entropy();
    stats.loss = -stats.surrogate - ent_coef * stats.entropy;
    stats.clip_fraction = clipped as f64 * inv;
    stats.approx_kl = kl_sum * inv;
    (stats, net_grads, log_std_grads)
}

/// Mean squared error of the value net against return targets, with
/// gradients: L = mean((V - target)^2) / 2.
pub fn value_loss_and_grads(
    value: &ValueNet,
    obs: &[Vec<f64>],
    targets: &[f64],
) -> (f64, Vec<f64>) {
    assert_eq!(obs.len(), targets.len());
    let n = obs.len();
    let mut grads = vec![0.0; value.net.params.len()];
    let mut loss = 0.0;
    let inv = 1.0 / n as f64;
    for (o, &target) in obs.iter().zip(targets) {
        let cache = value.net.forward_cached(o);
        let v = cache.output()[0];
        let err = v - target;
        loss += 0.5 * err * err;
        value.net.backward(&cache, &[err * inv], &mut grads);
    }
    (loss * inv, grads)
}
