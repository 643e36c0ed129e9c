//! Experiment runner: training runs with logged artifacts, evaluation,
//! cross-run comparison, SVG plots and throughput benchmarks.

pub mod bench;
pub mod compare;
pub mod config;
pub mod plot;
pub mod run;

pub use config::{PlannerSection, PrunerSection, RunConfig, RunSection, Variant};

use sgrl_core::agent::AgentError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("{module} failed at step {step}: {msg}")]
    Contract {
        module: &'static str,
        step: u64,
        msg: String,
    },
    #[error("provider unavailable: {0}")]
    ProviderUnavailable(String),
    #[error("{path}: {msg}")]
    Schema { path: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Process exit code: 2 config, 3 runtime contract, 4 provider.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::ProviderUnavailable(_) => 4,
            _ => 3,
        }
    }
}

impl From<AgentError> for HarnessError {
    fn from(e: AgentError) -> HarnessError {
        match e {
            AgentError::Config { .. } => HarnessError::Config(e.to_string()),
            other => HarnessError::Contract {
                module: "agent",
                step: 0,
                msg: other.to_string(),
            },
        }
    }
}
