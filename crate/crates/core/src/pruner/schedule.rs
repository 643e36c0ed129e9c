use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::PrunerError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    ThreeStageCos,
    Linear,
    Exponential,
    ThreeStageLinear,
}

impl ScheduleKind {
    pub const ALL: [ScheduleKind; 4] = [
        ScheduleKind::ThreeStageCos,
        ScheduleKind::Linear,
        ScheduleKind::Exponential,
        ScheduleKind::ThreeStageLinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScheduleKind::ThreeStageCos => "three_stage_cos",
            ScheduleKind::Linear => "linear",
            ScheduleKind::Exponential => "exponential",
            ScheduleKind::ThreeStageLinear => "three_stage_linear",
        }
    }
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScheduleKind {
    type Err = PrunerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScheduleKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| PrunerError::Schedule(format!("unknown schedule '{s}'")))
    }
}

/// Masking coefficient over training steps `t`, clamped to `[0, total]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub kind: ScheduleKind,
    pub total: u64,
    /// Time constant, only read by the exponential kind.
    pub tau: f64,
}

impl AnnealSchedule {
    /// `tau` defaults to a fifth of `total`.
    pub fn new(kind: ScheduleKind, total: u64) -> Result<AnnealSchedule, PrunerError> {
        Self::with_tau(kind, total, total as f64 / 5.0)
    }

    pub fn with_tau(
        kind: ScheduleKind,
        total: u64,
        tau: f64,
    ) -> Result<AnnealSchedule, PrunerError> {
        if total == 0 {
            return Err(PrunerError::Schedule("total steps must be positive".into()));
        }
        if kind == ScheduleKind::Exponential && !(tau.is_finite() && tau > 0.0) {
            return Err(PrunerError::Schedule(format!(
                "tau must be positive, got {tau}"
            )));
        }
        Ok(AnnealSchedule { kind, total, tau })
    }

    pub fn xi(&self, t: u64) -> f64 {
        let t = t.min(self.total) as f64;
        let big_t = self.total as f64;
        let x = match self.kind {
            ScheduleKind::Linear => t / big_t,
            ScheduleKind::Exponential => 1.0 - (-t / self.tau).exp(),
            ScheduleKind::ThreeStageCos => {
                let p = 0.4 * big_t;
                if t < p {
                    0.5 * (1.0 + (t / p * PI).cos())
                } else if t < 2.0 * p {
                    0.5 * (1.0 - ((t - p) / p * PI).cos())
                } else {
                    1.0
                }
            }
            ScheduleKind::ThreeStageLinear => {
                let p = 0.4 * big_t;
                if t < p {
                    1.0 - t / p
                } else if t < 2.0 * p {
                    t / p - 1.0
                } else {
                    1.0
                }
            }
        };
        x.clamp(0.0, 1.0)
    }
}
