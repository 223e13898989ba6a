//! Generalized advantage estimation and return targets.

/// Backward-recursion GAE.
///
/// `dones[t]` marks a true episode end after step t; the tail of a truncated
/// rollout is bootstrapped with `bootstrap_value`. Targets are
/// advantages + values.
pub fn gae(
    rewards: &[f64],
    values: &[f64],
    dones: &[bool],
    bootstrap_value: f64,
    gamma: f64,
    lambda: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n = rewards.len();
    assert_eq!(values.len(), n, "gae: values length mismatch");
    assert_eq!(dones.len(), n, "gae: dones length mismatch");
    let mut advantages = vec![0.0; n];
    let mut carry = 0.0;
    for t in (0..n).rev() {
        let (next_value, nonterminal) = if dones[t] {
            (0.0, 0.0)
        } else if t + 1 == n {
            (bootstrap_value, 1.0)
        } else {
            (values[t + 1], 1.0)
        };
        let delta = rewards[t] + gamma * next_value * nonterminal - values[t];
        carry = delta + gamma * lambda * nonterminal * carry;
        advantages[t] = carry;
    }
    let targets = advantages.iter().zip(values).map(|(a, v)| a + v).collect();
    (advantages, targets)
}

/// Normalizes in place to mean 0, std 1 (no-op on near-constant batches).
pub fn normalize_advantages(advantages: &mut [f64]) {
    let n = advantages.len() as f64;
    if n < 2.0 {
        return;
    }
    let mean = advantages.iter().sum::<f64>() / n;
    let var = advantages.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std < 1e-12 {
        return;
    }
    for a in advantages.iter_mut() {
        *a = (*a - mean) / std;
    }
}
