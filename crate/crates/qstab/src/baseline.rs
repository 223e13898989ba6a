//! Reconstructed Lyapunov-style feedback controller used as the comparison
//! method. The control law is the standard commutator-gradient form for
//! V(rho) = 1 - Tr(rho_d rho), with a switching escape drive for the invariant
//! sets where the gradient vanishes.

use serde::{Deserialize, Serialize};

use crate::qmat::DensityMatrix;
use crate::sme::SystemSpec;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LyapunovConfig {
    /// Feedback gain per channel.
    pub gain: f64,
    /// Fidelity below which the switching drive kicks in.
    pub switching_threshold: f64,
    /// Constant drive emitted while below the threshold.
    pub switching_drive: f64,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self { gain: 5.0, switching_threshold: 0.01, switching_drive: 0.3 }
    }
}

/// Feedback law u_j = clamp(K * Im Tr(rho_d [H_j, rho])).
///
/// The sign makes the deterministic drift of V = 1 - Tr(rho_d rho)
/// non-positive: d Tr(rho_d rho)/dt under -i u [H_j, rho] equals
/// u * Im Tr(rho_d [H_j, rho]).
pub fn lyapunov_control(
    config: &LyapunovConfig,
    system: &SystemSpec,
    target: &DensityMatrix,
    rho: &DensityMatrix,
) -> Vec<f64> {
    let fidelity = target.matrix().trace_of_product(rho.matrix()).re;
    system
        .controls
        .iter()
        .map(|h| {
            let grad = target.matrix().trace_of_product(&h.commutator(rho.matrix())).im;
            let u = if fidelity < config.switching_threshold && grad.abs() < 1e-6 {
                // Escape drive for invariant sets orthogonal to the target.
                config.switching_drive
            } else {
                config.gain * grad
            };
            system.clamp_action(u)
        })
        .collect()
}
