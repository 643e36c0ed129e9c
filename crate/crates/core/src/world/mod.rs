//! Desk-scale survival gridworld.
//!
//! A [`World`] is a single episode. It is deterministic given the seed and
//! the action sequence; all randomness comes from its own ChaCha stream.

mod batch;
pub(crate) mod codec;
pub(crate) mod gen;
mod observe;
mod sim;
mod types;

pub use batch::{derived_seed, BatchEnv};
pub use codec::CodecError;
pub use observe::{
    observation_len, percent, render_text_parts, Observation, TextObservation, ViewSummary,
};
pub use types::*;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::achievements::{AchievementId, AchievementSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    pub grid_size: usize,
    pub view_w: usize,
    pub view_h: usize,
    pub max_episode_steps: u32,
    pub day_length: u32,
    /// Steps per point lost for food, drink and energy.
    pub food_decay: u32,
    pub drink_decay: u32,
    pub energy_decay: u32,
    /// Steps per health point lost while any meter is empty.
    pub starve_interval: u32,
    /// Steps per health point regained while all meters are positive.
    pub regen_interval: u32,
    /// Steps for a sapling to ripen.
    pub plant_ripen: u32,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            grid_size: 48,
            view_w: 9,
            view_h: 7,
            max_episode_steps: 10_000,
            day_length: 300,
            food_decay: 25,
            drink_decay: 25,
            energy_decay: 25,
            starve_interval: 10,
            regen_interval: 10,
            plant_ripen: 100,
        }
    }
}

impl WorldConfig {
    pub fn validate(&self) -> Result<(), WorldError> {
        let bad = |field: &'static str, reason: &str| {
            Err(WorldError::Config {
                field,
                reason: reason.to_string(),
            })
        };
        if self.view_w == 0 || self.view_w % 2 == 0 {
            return bad("view_w", "must be odd and positive");
        }
        if self.view_h == 0 || self.view_h % 2 == 0 {
            return bad("view_h", "must be odd and positive");
        }
        if self.grid_size < self.view_w.max(self.view_h) || self.grid_size < 16 {
            return bad(
                "grid_size",
                "must be at least the view size and at least 16",
            );
        }
        if self.grid_size > 1024 {
            return bad("grid_size", "must be at most 1024");
        }
        if self.max_episode_steps == 0 {
            return bad("max_episode_steps", "must be positive");
        }
        for (field, v) in [
            ("day_length", self.day_length),
            ("food_decay", self.food_decay),
            ("drink_decay", self.drink_decay),
            ("energy_decay", self.energy_decay),
            ("starve_interval", self.starve_interval),
            ("regen_interval", self.regen_interval),
            ("plant_ripen", self.plant_ripen),
        ] {
            if v == 0 {
                return bad(field, "must be positive");
            }
        }
        if self.plant_ripen > u16::MAX as u32 {
            return bad("plant_ripen", "must fit in 16 bits");
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorldError {
    #[error("invalid world config: {field} {reason}")]
    Config { field: &'static str, reason: String },
    #[error("step called on a finished episode")]
    EpisodeDone,
    #[error("batch expected {expected} actions, got {got}")]
    BatchLength { expected: usize, got: usize },
}

/// Outcome of one step without the observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub reward: f32,
    pub done: bool,
    pub newly_unlocked: AchievementSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: f32,
    pub done: bool,
    pub newly_unlocked: Vec<AchievementId>,
}

/// Complete simulator state for one episode.
#[derive(Debug, Clone)]
pub struct World {
    pub(crate) config: WorldConfig,
    pub(crate) seed: u64,
    pub(crate) grid: Vec<Block>,
    pub(crate) tunnels: Vec<bool>,
    pub(crate) plants: Vec<PlantState>,
    pub(crate) mobs: Vec<Mob>,
    pub(crate) player: Player,
    pub(crate) inventory: Inventory,
    pub(crate) daylight: f32,
    pub(crate) step_count: u32,
    pub(crate) unlocked: AchievementSet,
    pub(crate) done: bool,
    pub(crate) rng: ChaCha8Rng,
}

impl PartialEq for World {
    fn eq(&self, other: &Self) -> bool {
        self.to_bytes() == other.to_bytes()
    }
}

impl World {
    /// Generates a fresh episode from `seed`.
    pub fn reset(seed: u64, config: &WorldConfig) -> Result<World, WorldError> {
        config.validate()?;
        Ok(gen::generate(seed, config))
    }

    pub fn config(&self) -> &WorldConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn player(&self) -> &Player {
        &self.player
    }

    pub fn inventory(&self) -> &Inventory {
        &self.inventory
    }

    pub fn mobs(&self) -> &[Mob] {
        &self.mobs
    }

    pub fn daylight(&self) -> f32 {
        self.daylight
    }

    pub fn step_count(&self) -> u32 {
        self.step_count
    }

    pub fn unlocked(&self) -> AchievementSet {
        self.unlocked
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn size(&self) -> i32 {
        self.config.grid_size as i32
    }

    #[inline]
    pub fn in_bounds(&self, p: Pos) -> bool {
        let n = self.size();
        p.x >= 0 && p.y >= 0 && p.x < n && p.y < n
    }

    #[inline]
    pub(crate) fn idx(&self, p: Pos) -> usize {
        p.y as usize * self.config.grid_size + p.x as usize
    }

    /// Block at `p`, or `OutOfBounds` outside the grid.
    #[inline]
    pub fn block(&self, p: Pos) -> Block {
        if self.in_bounds(p) {
            self.grid[self.idx(p)]
        } else {
            Block::OutOfBounds
        }
    }

    pub fn is_tunnel(&self, p: Pos) -> bool {
        self.in_bounds(p) && self.tunnels[self.idx(p)]
    }

    pub fn mob_at(&self, p: Pos) -> Option<&Mob> {
        self.mobs.iter().find(|m| m.pos == p && m.health > 0)
    }

    /// Cell the player is facing.
    pub fn target(&self) -> Pos {
        self.player.pos.step(self.player.facing)
    }

    /// Test and tooling hook: overwrite a cell. Plant bookkeeping follows.
    pub fn set_block(&mut self, p: Pos, b: Block) {
        if !self.in_bounds(p) || matches!(b, Block::OutOfBounds | Block::Invalid) {
            return;
        }
        let i = self.idx(p);
        self.grid[i] = b;
        self.plants.retain(|pl| pl.pos != p);
        match b {
            Block::Plant => self.plants.push(PlantState { pos: p, age: 0 }),
            Block::RipePlant => self.plants.push(PlantState {
                pos: p,
                age: self.config.plant_ripen as u16,
            }),
            _ => {}
        }
    }

    /// Test and tooling hook: fill the whole grid with one block and clear mobs.
    pub fn fill(&mut self, b: Block) {
        let fill = if matches!(b, Block::OutOfBounds | Block::Invalid) {
            Block::Grass
        } else {
            b
        };
        self.grid.iter_mut().for_each(|c| *c = fill);
        self.tunnels.iter_mut().for_each(|t| *t = false);
        self.plants.clear();
        self.mobs.clear();
    }

    pub fn set_player(&mut self, player: Player) {
        self.player = player;
        self.player.health = self.player.health.min(9);
        self.player.food = self.player.food.min(9);
        self.player.drink = self.player.drink.min(9);
        self.player.energy = self.player.energy.min(9);
    }

    pub fn set_inventory(&mut self, inv: Inventory) {
        self.inventory = Inventory(inv.0.map(|v| v.min(MAX_ITEM)));
    }

    pub fn set_daylight(&mut self, d: f32) {
        self.daylight = d.clamp(0.0, 1.0);
    }

    pub fn spawn_mob(&mut self, kind: MobKind, pos: Pos) {
        let health = match kind {
            MobKind::Zombie => 5,
            MobKind::Cow | MobKind::Skeleton => 3,
            MobKind::Arrow => 1,
        };
        self.mobs.push(Mob {
            kind,
            pos,
            health,
            cooldown: 0,
            facing: Direction::Down,
        });
    }

    pub fn clear_mobs(&mut self) {
        self.mobs.clear();
    }

    /// Whether `b` occurs anywhere inside the player's view window.
    pub fn nearby(&self, b: Block) -> bool {
        let hw = (self.config.view_w / 2) as i32;
        let hh = (self.config.view_h / 2) as i32;
        let c = self.player.pos;
        for y in c.y - hh..=c.y + hh {
            for x in c.x - hw..=c.x + hw {
                if self.block(Pos::new(x, y)) == b {
                    return true;
                }
            }
        }
        false
    }
}

/// Daylight after `step` steps: 1 - |cos(pi * (phase + 0.3))|^3.
pub fn daylight_at(step: u32, day_length: u32) -> f32 {
    let phase = (step % day_length) as f64 / day_length as f64;
    let c = (std::f64::consts::PI * (phase + 0.3)).cos().abs();
    (1.0 - c * c * c) as f32
}
