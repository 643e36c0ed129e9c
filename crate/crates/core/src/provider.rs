//! Interfaces to an external (language model) source of masks and
//! priorities. The bridge crate implements them; core never does I/O here.

use thiserror::Error;

use crate::planner::{AgentProgress, Weights};
use crate::pruner::ActionMask;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProviderError {
    #[error("provider disabled")]
    Disabled,
    #[error("provider unavailable: {0}")]
    Unavailable(String),
    #[error("malformed provider response: {0}")]
    Malformed(String),
}

pub trait MaskProvider {
    /// Actions relevant to `goal` (canonical goal text).
    fn related_actions(&mut self, goal: &str) -> Result<ActionMask, ProviderError>;
}

pub trait PriorityProvider {
    /// Proposes new goal weights given the current ones and training progress.
    fn update_priorities(
        &mut self,
        current: &Weights,
        progress: &AgentProgress,
    ) -> Result<Weights, ProviderError>;
}
