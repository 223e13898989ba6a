//! From-scratch proximal policy optimization: Gaussian MLP policy, value
//! network, GAE, clipped surrogate objective, and the training loop.

mod adam;
mod gae;
mod loss;
mod mlp;
mod policy;
mod train;

pub use adam::{clip_grad_norm, Adam};
pub use gae::{gae, normalize_advantages};
pub use loss::{policy_loss_and_grads, value_loss_and_grads, PolicyBatch, PolicyLossStats};
pub use mlp::{ForwardCache, Mlp};
pub use policy::{
    gaussian_log_prob, gaussian_log_prob_grads, GaussianPolicy, ValueNet, LOG_STD_MAX, LOG_STD_MIN,
};
pub use train::{train, IterationLog, RolloutBuffer, TrainConfig, TrainResult};
