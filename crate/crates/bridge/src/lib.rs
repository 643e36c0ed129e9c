//! Optional language-model client: action-mask queries, priority-table
//! updates and archived planner-code generation over a chat-completions
//! style JSON protocol. Every response is validated before it can reach
//! planner or pruner state.

mod client;
mod config;
mod parse;
mod template;
mod transcript;
mod transport;

pub use client::{Bridge, GeneratedPlanner, Verdict};
pub use config::{LlmMode, ProviderConfig};
pub use parse::{
    agent_state_json, extract_code, parse_mask_response, parse_priority_response, parse_verdict,
    weights_as_code,
};
pub use template::{PromptRole, PromptTemplate, Templates};
pub use transcript::{Exchange, Transcript};
pub use transport::{
    ChatMessage, ChatRequest, HttpTransport, ScriptedTransport, Transport, TransportError,
};

use sgrl_core::provider::ProviderError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("provider is disabled for this operation")]
    Disabled,
    #[error("prompt template: {0}")]
    Template(String),
    #[error("provider unavailable after {attempts} attempts: {last}")]
    Unavailable { attempts: u32, last: String },
    #[error("invalid response: {0}")]
    InvalidResponse(String),
    #[error("invalid provider config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<BridgeError> for ProviderError {
    fn from(e: BridgeError) -> ProviderError {
        match e {
            BridgeError::Disabled => ProviderError::Disabled,
            BridgeError::Unavailable { .. } | BridgeError::Io(_) => {
                ProviderError::Unavailable(e.to_string())
            }
            BridgeError::Template(_) | BridgeError::InvalidResponse(_) | BridgeError::Config(_) => {
                ProviderError::Malformed(e.to_string())
            }
        }
    }
}
