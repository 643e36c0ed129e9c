use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::achievements::{AchievementId, AchievementSet, DependencyGraph, NUM_ACHIEVEMENTS};

use super::goals::{GoalId, NUM_GOALS};
use super::PlannerError;

pub const NUM_STAGES: usize = 5;
/// Window success rate (percent) above which a goal is down-weighted.
pub const MASTERED_RATE: f64 = 80.0;
pub const MASTERED_FACTOR: f64 = 0.25;
pub const FORWARD_FACTOR: f64 = 2.0;
pub const FORWARD_FLOOR: f64 = 0.05;

pub type Weights = [f64; NUM_GOALS];

const BUILTIN: &str = include_str!("../../data/priority_table.txt");

/// Training-wide unlock statistics consumed by table updates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentProgress {
    pub step: u64,
    pub episodes: u64,
    /// Episodes in which each achievement was unlocked, over all training.
    pub unlock_counts: [u64; NUM_ACHIEVEMENTS],
    pub window_episodes: u64,
    pub window_counts: [u64; NUM_ACHIEVEMENTS],
    /// Last observed per-episode unlocks and text snapshot, for reporting.
    pub last_unlocked: AchievementSet,
    pub last_text: Option<String>,
}

impl Default for AgentProgress {
    fn default() -> Self {
        AgentProgress {
            step: 0,
            episodes: 0,
            unlock_counts: [0; NUM_ACHIEVEMENTS],
            window_episodes: 0,
            window_counts: [0; NUM_ACHIEVEMENTS],
            last_unlocked: AchievementSet::EMPTY,
            last_text: None,
        }
    }
}

impl AgentProgress {
    pub fn record_episode(&mut self, unlocked: AchievementSet) {
        self.episodes += 1;
        self.window_episodes += 1;
        for a in unlocked.iter() {
            self.unlock_counts[a.index()] += 1;
            self.window_counts[a.index()] += 1;
        }
        self.last_unlocked = unlocked;
    }

    /// Per-achievement success rate in percent over the current window.
    pub fn window_rates(&self) -> [f64; NUM_ACHIEVEMENTS] {
        let mut r = [0.0; NUM_ACHIEVEMENTS];
        if self.window_episodes > 0 {
            for (r, c) in r.iter_mut().zip(self.window_counts) {
                *r = 100.0 * c as f64 / self.window_episodes as f64;
            }
        }
        r
    }

    /// Achievements unlocked at least once in the current window.
    pub fn window_unlocked(&self) -> AchievementSet {
        let mut s = AchievementSet::EMPTY;
        for a in AchievementId::ALL {
            if self.window_counts[a.index()] > 0 {
                s.insert(a);
            }
        }
        s
    }

    pub fn reset_window(&mut self) {
        self.window_episodes = 0;
        self.window_counts = [0; NUM_ACHIEVEMENTS];
    }
}

/// Deepest locked achievement, walked down through locked prerequisites
/// until one whose prerequisites are all unlocked. Ties go to the lower id.
pub fn forward_target(unlocked: AchievementSet) -> Option<AchievementId> {
    let g = DependencyGraph::builtin();
    let deepest = |it: &mut dyn Iterator<Item = AchievementId>| {
        it.max_by(|a, b| g.depth(*a).cmp(&g.depth(*b)).then(b.cmp(a)))
    };
    let mut cur = deepest(
        &mut AchievementId::ALL
            .into_iter()
            .filter(|a| !unlocked.contains(*a)),
    )?;
    while let Some(p) = deepest(
        &mut g
            .prerequisites(cur)
            .iter()
            .filter(|a| !unlocked.contains(*a)),
    ) {
        cur = p;
    }
    Some(cur)
}

/// Staged base priorities plus the weights currently in force.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorityTable {
    stages: Vec<Weights>,
    stage: usize,
    active: Weights,
}

pub fn validate_weights(w: &Weights) -> Result<(), PlannerError> {
    if let Some(i) = w.iter().position(|v| !v.is_finite() || *v < 0.0) {
        return Err(PlannerError::InvalidTable(format!(
            "{} has weight {}",
            GoalId::new(i).unwrap().name(),
            w[i]
        )));
    }
    if !w.iter().any(|v| *v > 0.0) {
        return Err(PlannerError::InvalidTable("no positive weight".into()));
    }
    Ok(())
}

impl PriorityTable {
    pub fn new(stages: Vec<Weights>) -> Result<PriorityTable, PlannerError> {
        if stages.is_empty() {
            return Err(PlannerError::InvalidTable("no stages".into()));
        }
        for (i, s) in stages.iter().enumerate() {
            validate_weights(s)
                .map_err(|e| PlannerError::InvalidTable(format!("stage {i}: {e}")))?;
        }
        let active = stages[0];
        Ok(PriorityTable {
            stages,
            stage: 0,
            active,
        })
    }

    pub fn builtin() -> PriorityTable {
        PriorityTable::parse(BUILTIN).expect("shipped priority table is valid")
    }

    /// A single-stage table with equal weight on every goal.
    pub fn uniform() -> PriorityTable {
        PriorityTable::new(vec![[1.0; NUM_GOALS]]).unwrap()
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    /// Jumps to shipped stage `i` (clamped), discarding any adjustments.
    pub fn set_stage(&mut self, i: usize) {
        self.stage = i.min(self.stages.len() - 1);
        self.active = self.stages[self.stage];
    }

    pub fn num_stages(&self) -> usize {
        self.stages.len()
    }

    pub fn stage_weights(&self, i: usize) -> Option<&Weights> {
        self.stages.get(i)
    }

    pub fn active(&self) -> &Weights {
        &self.active
    }

    pub fn weight(&self, g: GoalId) -> f64 {
        self.active[g.index()]
    }

    /// Moves to the next shipped stage and applies the offline rule:
    /// goals above the mastery rate are quartered, the goal enabling the
    /// deepest locked achievement is doubled with a floor.
    pub fn advance(&mut self, progress: &AgentProgress) {
        let next = (self.stage + 1).min(self.stages.len() - 1);
        let mut w = self.stages[next];
        offline_rule(&mut w, progress);
        if validate_weights(&w).is_ok() {
            self.stage = next;
            self.active = w;
        } else {
            log::warn!(
                "offline priority update produced an invalid table; keeping stage {}",
                self.stage
            );
        }
    }

    /// Installs externally proposed weights for the next stage. Invalid
    /// weights are rejected and the table is left untouched.
    pub fn install(&mut self, w: Weights) -> Result<(), PlannerError> {
        validate_weights(&w)?;
        self.stage = (self.stage + 1).min(self.stages.len() - 1);
        self.active = w;
        Ok(())
    }

    /// Sets the stage index and weights directly, as when resuming a run.
    pub fn restore(&mut self, stage: usize, w: Weights) -> Result<(), PlannerError> {
        validate_weights(&w)?;
        if stage >= self.stages.len() {
            return Err(PlannerError::InvalidTable(format!("no stage {stage}")));
        }
        self.stage = stage;
        self.active = w;
        Ok(())
    }

    pub fn parse(text: &str) -> Result<PriorityTable, PlannerError> {
        let mut stages: Vec<Weights> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if let Some(head) = line.strip_prefix('[') {
                let head = head
                    .strip_suffix(']')
                    .ok_or_else(|| parse_err(n, "unterminated section"))?;
                let idx: usize = head
                    .trim()
                    .strip_prefix("stage")
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| parse_err(n, format!("bad section '{head}'")))?;
                if idx != stages.len() {
                    return Err(parse_err(n, format!("expected stage {}", stages.len())));
                }
                stages.push([0.0; NUM_GOALS]);
                continue;
            }
            let cur = stages
                .last_mut()
                .ok_or_else(|| parse_err(n, "weight outside a stage section"))?;
            let (name, value) = parse_weight_line(n, line)?;
            cur[name.index()] = value;
        }
        PriorityTable::new(stages)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, w) in self.stages.iter().enumerate() {
            if i > 0 {
                s.push('\n');
            }
            let _ = writeln!(s, "[stage {i}]");
            s.push_str(&weights_to_text(w));
        }
        s
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> PlannerError {
    PlannerError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_weight_line(n: usize, line: &str) -> Result<(GoalId, f64), PlannerError> {
    let (name, value) = line
        .split_once('=')
        .or_else(|| line.split_once(':'))
        .ok_or_else(|| parse_err(n, format!("expected 'goal = weight', got '{line}'")))?;
    let name = name.trim().trim_matches(|c| c == '"' || c == '\'');
    let goal =
        GoalId::from_text(name).ok_or_else(|| parse_err(n, format!("unknown goal '{name}'")))?;
    let value: f64 = value
        .trim()
        .trim_end_matches(',')
        .trim()
        .parse()
        .map_err(|_| parse_err(n, format!("bad weight for {name}")))?;
    Ok((goal, value))
}

/// One `goal = weight` line per goal.
pub fn weights_to_text(w: &Weights) -> String {
    let mut s = String::new();
    for g in GoalId::all() {
        let _ = writeln!(s, "{} = {}", g.name(), w[g.index()]);
    }
    s
}

/// Parses a flat list of `goal = weight` lines. Goals not mentioned keep
/// their value from `base`; section headers and bullets are ignored.
pub fn parse_weights(text: &str, base: &Weights) -> Result<Weights, PlannerError> {
    let mut w = *base;
    let mut any = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw
            .split('#')
            .next()
            .unwrap()
            .trim()
            .trim_start_matches(['-', '*'])
            .trim();
        if line.is_empty() || line.starts_with('[') {
            continue;
        }
        let (g, v) = parse_weight_line(i + 1, line)?;
        w[g.index()] = v;
        any = true;
    }
    if !any {
        return Err(PlannerError::InvalidTable("no weights found".into()));
    }
    validate_weights(&w)?;
    Ok(w)
}

pub fn offline_rule(w: &mut Weights, progress: &AgentProgress) {
    let rates = progress.window_rates();
    for a in AchievementId::ALL {
        if rates[a.index()] > MASTERED_RATE {
            w[GoalId::for_achievement(a).index()] *= MASTERED_FACTOR;
        }
    }
    if let Some(a) = forward_target(progress.window_unlocked()) {
        let g = GoalId::for_achievement(a).index();
        w[g] = (w[g] * FORWARD_FACTOR).max(FORWARD_FLOOR);
    }
}

/// Stage index for `step` when stages are `0.2 * total` long.
pub fn stage_for_step(step: u64, total: u64) -> usize {
    if total == 0 {
        return 0;
    }
    let len = (total as f64 * 0.2).max(1.0);
    ((step as f64 / len) as usize).min(NUM_STAGES - 1)
}
