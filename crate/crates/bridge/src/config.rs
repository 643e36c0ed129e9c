use std::path::PathBuf;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::BridgeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LlmMode {
    /// No requests of any kind.
    #[default]
    Off,
    /// Action-mask queries only.
    MaskOnly,
    /// Masks, priority updates and planner-code generation.
    Full,
}

/// Connection and decoding settings. The API key is read from the named
/// environment variable at request time and never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProviderConfig {
    pub mode: LlmMode,
    pub endpoint: String,
    pub model: String,
    pub api_key_env: String,
    pub temperature: f64,
    pub top_p: f64,
    /// Token limit for mask queries.
    pub max_tokens: u32,
    /// Token limit for code generation and priority updates.
    pub code_max_tokens: u32,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub backoff_ms: u64,
    /// Numbered JSON transcripts are written here when set.
    pub transcript_dir: Option<PathBuf>,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            mode: LlmMode::Off,
            endpoint: "http://127.0.0.1:8000/v1/chat/completions".into(),
            model: "deepseek-chat".into(),
            api_key_env: "SGRL_API_KEY".into(),
            temperature: 0.5,
            top_p: 1.0,
            max_tokens: 100,
            code_max_tokens: 4096,
            timeout_secs: 60,
            max_retries: 3,
            backoff_ms: 500,
            transcript_dir: None,
        }
    }
}

impl ProviderConfig {
    pub fn validate(&self) -> Result<(), BridgeError> {
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(BridgeError::Config(format!(
                "temperature {} outside [0, 2]",
                self.temperature
            )));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(BridgeError::Config(format!(
                "top_p {} outside (0, 1]",
                self.top_p
            )));
        }
        if self.max_tokens == 0 || self.code_max_tokens == 0 {
            return Err(BridgeError::Config("token limits must be positive".into()));
        }
        if self.timeout_secs == 0 {
            return Err(BridgeError::Config("timeout must be positive".into()));
        }
        if self.mode != LlmMode::Off && self.endpoint.is_empty() {
            return Err(BridgeError::Config("endpoint is empty".into()));
        }
        Ok(())
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.timeout_secs)
    }

    /// Delay before retry `attempt` (1-based): `backoff_ms * 2^(attempt-1)`.
    pub fn backoff(&self, attempt: u32) -> Duration {
        Duration::from_millis(self.backoff_ms.saturating_mul(1 << (attempt - 1).min(16)))
    }
}
