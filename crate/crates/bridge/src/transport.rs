use std::collections::VecDeque;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TransportError {
    #[error("request timed out")]
    Timeout,
    #[error("HTTP status {0}")]
    Status(u16),
    #[error("network: {0}")]
    Network(String),
    /// The reply arrived but is not a chat-completions document.
    #[error("bad reply envelope: {0}")]
    Envelope(String),
}

impl TransportError {
    pub fn is_retryable(&self) -> bool {
        match self {
            TransportError::Timeout | TransportError::Network(_) => true,
            TransportError::Status(s) => *s == 429 || *s >= 500,
            TransportError::Envelope(_) => false,
        }
    }
}

/// Sends one chat request and returns the assistant's text.
pub trait Transport {
    fn complete(&mut self, req: &ChatRequest) -> Result<String, TransportError>;
}

/// `choices[0].message.content` of a chat-completions reply.
pub fn reply_content(body: &str) -> Result<String, TransportError> {
    let v: Value =
        serde_json::from_str(body).map_err(|e| TransportError::Envelope(e.to_string()))?;
    v.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_owned)
        .ok_or_else(|| TransportError::Envelope("missing choices[0].message.content".into()))
}

/// Blocking HTTP client for an OpenAI-compatible endpoint.
pub struct HttpTransport {
    endpoint: String,
    api_key_env: String,
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(endpoint: &str, api_key_env: &str, timeout: Duration) -> HttpTransport {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpTransport {
            endpoint: endpoint.to_owned(),
            api_key_env: api_key_env.to_owned(),
            agent,
        }
    }
}

impl Transport for HttpTransport {
    fn complete(&mut self, req: &ChatRequest) -> Result<String, TransportError> {
        let mut call = self
            .agent
            .post(&self.endpoint)
            .header("Content-Type", "application/json");
        if let Ok(key) = std::env::var(&self.api_key_env) {
            call = call.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = call.send_json(req).map_err(|e| match e {
            ureq::Error::Timeout(_) => TransportError::Timeout,
            other => TransportError::Network(other.to_string()),
        })?;
        let status = resp.status().as_u16();
        if !(200..300).contains(&status) {
            return Err(TransportError::Status(status));
        }
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| TransportError::Network(e.to_string()))?;
        reply_content(&body)
    }
}

/// Replays queued replies in order and records every request. Counts
/// calls, so tests can assert that nothing was sent.
#[derive(Debug, Default)]
pub struct ScriptedTransport {
    pub replies: VecDeque<Result<String, TransportError>>,
    pub requests: Vec<ChatRequest>,
}

impl ScriptedTransport {
    pub fn new<I, S>(replies: I) -> ScriptedTransport
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ScriptedTransport {
            replies: replies.into_iter().map(|s| Ok(s.into())).collect(),
            requests: Vec::new(),
        }
    }

    pub fn push_error(&mut self, e: TransportError) {
        self.replies.push_back(Err(e));
    }

    pub fn calls(&self) -> usize {
        self.requests.len()
    }
}

impl Transport for ScriptedTransport {
    fn complete(&mut self, req: &ChatRequest) -> Result<String, TransportError> {
        self.requests.push(req.clone());
        self.replies
            .pop_front()
            .unwrap_or_else(|| Err(TransportError::Network("script exhausted".into())))
    }
}

impl<T: Transport + ?Sized> Transport for &mut T {
    fn complete(&mut self, req: &ChatRequest) -> Result<String, TransportError> {
        (**self).complete(req)
    }
}
