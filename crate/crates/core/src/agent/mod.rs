//! Goal-conditioned actor-critic trained with masked PPO.

mod checkpoint;
mod encoder;
mod net;
mod policy;
mod ppo;
mod train;

pub use checkpoint::Checkpoint;
pub use encoder::{GoalEncoder, GOAL_DIM};
pub use net::{Mlp, Real};
pub use policy::{
    entropy, greedy_action, log_softmax, logsumexp, mask_logits, sample_action, softmax,
    ActorCritic,
};
pub use ppo::{
    clip_grad_norm, compute_gae, normalize, ppo_loss, AdamW, Batch, Learner, LossCoefs, LossReport,
    PpoConfig, RolloutBuffer, Workspace,
};
pub use train::{
    env_rng, env_seed, evaluate, ActMode, Decision, GoalMode, Guidance, Guide, IterationReport,
    MaskMode, TrainConfig, Trainer,
};

use thiserror::Error;

use crate::world::{CodecError, WorldError};

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("invalid agent config: {field} {reason}")]
    Config { field: &'static str, reason: String },
    #[error("non-finite {0} during update; parameters restored")]
    NonFinite(&'static str),
    #[error("checkpoint: {0}")]
    Checkpoint(#[from] CodecError),
    #[error("checkpoint does not match the configuration: {0}")]
    Mismatch(String),
    #[error(transparent)]
    World(#[from] WorldError),
}
