use std::fs;
use std::path::Path;

use sgrl_core::planner::{AgentProgress, Weights};
use sgrl_core::provider::{MaskProvider, PriorityProvider, ProviderError};
use sgrl_core::pruner::ActionMask;

use crate::config::{LlmMode, ProviderConfig};
use crate::parse::{
    agent_state_json, extract_code, parse_mask_response, parse_priority_response, parse_verdict,
    weights_as_code,
};
use crate::template::{PromptRole, Templates};
use crate::transcript::{Exchange, Transcript};
use crate::transport::{ChatMessage, ChatRequest, HttpTransport, Transport};
use crate::BridgeError;

/// Reflection rounds before giving up on a "good" verdict.
pub const MAX_REFLECTIONS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Good,
    Bad,
    Unknown,
}

/// Archived output of the design, implement and reflect exchanges.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedPlanner {
    pub source: String,
    pub verdict: Verdict,
    pub reflections: usize,
    /// False when no reflection returned "good".
    pub verified: bool,
}

pub struct Bridge<T> {
    cfg: ProviderConfig,
    transport: T,
    templates: Templates,
    transcript: Transcript,
}

impl Bridge<HttpTransport> {
    pub fn http(cfg: ProviderConfig) -> Result<Bridge<HttpTransport>, BridgeError> {
        let t = HttpTransport::new(&cfg.endpoint, &cfg.api_key_env, cfg.timeout());
        Bridge::new(cfg, t)
    }
}

impl<T: Transport> Bridge<T> {
    pub fn new(cfg: ProviderConfig, transport: T) -> Result<Bridge<T>, BridgeError> {
        cfg.validate()?;
        let transcript = Transcript::new(cfg.transcript_dir.clone());
        Ok(Bridge {
            cfg,
            transport,
            templates: Templates::default(),
            transcript,
        })
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.cfg
    }

    pub fn templates_mut(&mut self) -> &mut Templates {
        &mut self.templates
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn transport(&self) -> &T {
        &self.transport
    }

    fn allow(&self, role: PromptRole) -> Result<(), BridgeError> {
        let ok = match self.cfg.mode {
            LlmMode::Off => false,
            LlmMode::MaskOnly => role == PromptRole::ActionMask,
            LlmMode::Full => true,
        };
        if ok {
            Ok(())
        } else {
            Err(BridgeError::Disabled)
        }
    }

    /// Renders and sends one prompt, retrying transient failures with
    /// exponential backoff. Every outcome is appended to the transcript.
    fn ask(&mut self, role: PromptRole, values: &[(&str, &str)]) -> Result<String, BridgeError> {
        self.allow(role)?;
        let prompt = self.templates.get(role).render(values)?;
        let max_tokens = match role {
            PromptRole::ActionMask => self.cfg.max_tokens,
            _ => self.cfg.code_max_tokens,
        };
        let req = ChatRequest {
            model: self.cfg.model.clone(),
            messages: vec![ChatMessage {
                role: "user".into(),
                content: prompt.clone(),
            }],
            temperature: self.cfg.temperature,
            top_p: self.cfg.top_p,
            max_tokens,
        };
        let mut attempts = 0;
        let result = loop {
            attempts += 1;
            match self.transport.complete(&req) {
                Ok(text) => break Ok(text),
                Err(e) if e.is_retryable() && attempts <= self.cfg.max_retries => {
                    log::warn!("{} request failed ({e}); retry {attempts}", role.name());
                    std::thread::sleep(self.cfg.backoff(attempts));
                }
                Err(e) => break Err(e),
            }
        };
        self.transcript.append(Exchange {
            index: self.transcript.next_index(),
            role,
            attempts,
            prompt,
            response: result.as_ref().ok().cloned(),
            error: result.as_ref().err().map(|e| e.to_string()),
        })?;
        result.map_err(|e| {
            if e.is_retryable() {
                BridgeError::Unavailable {
                    attempts,
                    last: e.to_string(),
                }
            } else {
                BridgeError::InvalidResponse(e.to_string())
            }
        })
    }

    pub fn request_mask(&mut self, goal: &str) -> Result<ActionMask, BridgeError> {
        let reply = self.ask(PromptRole::ActionMask, &[("{goal}", goal)])?;
        parse_mask_response(&reply)
    }

    pub fn request_priority_update(
        &mut self,
        current: &Weights,
        progress: &AgentProgress,
    ) -> Result<Weights, BridgeError> {
        let code = weights_as_code(current);
        let state = agent_state_json(progress);
        let reply = self.ask(
            PromptRole::PriorityUpdate,
            &[("{goal_code.py}", &code), ("{agent_state.json}", &state)],
        )?;
        parse_priority_response(&reply, current)
    }

    /// Design, implement, then reflect until "good" or the round limit.
    /// The source is archived under `archive` when given; it is never run.
    pub fn generate_planner_code(
        &mut self,
        archive: Option<&Path>,
    ) -> Result<GeneratedPlanner, BridgeError> {
        self.allow(PromptRole::PlannerDesign)?;
        let design = self.ask(PromptRole::PlannerDesign, &[])?;
        let implemented = self.ask(
            PromptRole::PlannerImplement,
            &[("{last_llm_response}", &design)],
        )?;
        let mut source = extract_code(&implemented).unwrap_or(implemented);
        let mut verdict = Verdict::Unknown;
        let mut reflections = 0;
        while reflections < MAX_REFLECTIONS {
            let review = self.ask(
                PromptRole::PlannerReflect,
                &[("{last_llm_response}", &source)],
            )?;
            reflections += 1;
            verdict = parse_verdict(&review);
            if verdict == Verdict::Good {
                break;
            }
            match extract_code(&review) {
                Some(code) => source = code,
                None => log::warn!(
                    "review {reflections} has no revised code; keeping the previous source"
                ),
            }
        }
        let out = GeneratedPlanner {
            source,
            verdict,
            reflections,
            verified: verdict == Verdict::Good,
        };
        if let Some(dir) = archive {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("planner.py"), &out.source)?;
            let status = if out.verified {
                "verified"
            } else {
                "unverified"
            };
            fs::write(
                dir.join("verdict.txt"),
                format!("{status}\nreflections: {}\n", out.reflections),
            )?;
        }
        Ok(out)
    }
}

impl<T: Transport> MaskProvider for Bridge<T> {
    fn related_actions(&mut self, goal: &str) -> Result<ActionMask, ProviderError> {
        Ok(self.request_mask(goal)?)
    }
}

impl<T: Transport> PriorityProvider for Bridge<T> {
    fn update_priorities(
        &mut self,
        current: &Weights,
        progress: &AgentProgress,
    ) -> Result<Weights, ProviderError> {
        Ok(self.request_priority_update(current, progress)?)
    }
}
