use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sgrl_bridge::ProviderConfig;
use sgrl_core::agent::{GoalMode, Guidance, MaskMode, PpoConfig, TrainConfig};
use sgrl_core::pruner::ScheduleKind;
use sgrl_core::world::WorldConfig;

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Sgrl,
    SgrlStaticPrun,
    SgrlNoPrun,
    SgrlNoPriority,
    Ppo,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Sgrl,
        Variant::SgrlStaticPrun,
        Variant::SgrlNoPrun,
        Variant::SgrlNoPriority,
        Variant::Ppo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Sgrl => "sgrl",
            Variant::SgrlStaticPrun => "sgrl_static_prun",
            Variant::SgrlNoPrun => "sgrl_no_prun",
            Variant::SgrlNoPriority => "sgrl_no_priority",
            Variant::Ppo => "ppo",
        }
    }

    /// Guidance for this variant on top of the pruner settings.
    pub fn guidance(self, pruner: &PrunerSection) -> Guidance {
        let base = Guidance {
            goals: GoalMode::Weighted,
            masking: if pruner.static_mask {
                MaskMode::Static
            } else {
                MaskMode::Annealed
            },
            schedule: pruner.schedule,
            tau: pruner.tau,
            staged_priorities: true,
        };
        match self {
            Variant::Sgrl => base,
            Variant::SgrlStaticPrun => Guidance {
                masking: MaskMode::Static,
                ..base
            },
            Variant::SgrlNoPrun => Guidance {
                masking: MaskMode::Off,
                ..base
            },
            Variant::SgrlNoPriority => Guidance {
                goals: GoalMode::Uniform,
                staged_priorities: false,
                ..base
            },
            Variant::Ppo => Guidance {
                goals: GoalMode::Off,
                masking: MaskMode::Off,
                staged_priorities: false,
                ..base
            },
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Variant, HarnessError> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown variant '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Run id; defaults to the variant name.
    pub id: Option<String>,
    pub variant: Variant,
    pub total_steps: u64,
    pub seeds: Vec<u64>,
    pub log_interval: u64,
    pub eval_episodes: usize,
    pub out_dir: PathBuf,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            id: None,
            variant: Variant::Sgrl,
            total_steps: 500_000,
            seeds: vec![1, 2, 3, 4, 5],
            log_interval: 5_000,
            eval_episodes: 4,
            out_dir: PathBuf::from("runs"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerSection {
    /// Staged priority table file; the shipped table when unset.
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrunerSection {
    pub schedule: ScheduleKind,
    /// Strict masks throughout (xi = 0).
    #[serde(rename = "static")]
    pub static_mask: bool,
    pub tau: Option<f64>,
    /// Mask bank file, read at start and written back when changed.
    pub bank: Option<PathBuf>,
}

impl Default for PrunerSection {
    fn default() -> Self {
        PrunerSection {
            schedule: ScheduleKind::ThreeStageCos,
            static_mask: false,
            tau: None,
            bank: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub env: WorldConfig,
    pub agent: PpoConfig,
    pub planner: PlannerSection,
    pub pruner: PrunerSection,
    pub llm: ProviderConfig,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, HarnessError> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn id(&self) -> String {
        self.run
            .id
            .clone()
            .unwrap_or_else(|| self.run.variant.name().to_owned())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.run.seeds.is_empty() {
            return Err(HarnessError::Config("run.seeds is empty".into()));
        }
        if self.run.log_interval == 0 {
            return Err(HarnessError::Config(
                "run.log_interval must be positive".into(),
            ));
        }
        if let Some(id) = &self.run.id {
            if id.is_empty() || id.contains(['/', '\\']) || id.starts_with('.') {
                return Err(HarnessError::Config(format!("bad run id '{id}'")));
            }
        }
        self.llm
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        self.train_config(self.run.seeds[0]).validate()?;
        Ok(())
    }

    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            seed,
            total_steps: self.run.total_steps,
            world: self.env.clone(),
            ppo: self.agent.clone(),
            guidance: self.run.variant.guidance(&self.pruner),
        }
    }
}
