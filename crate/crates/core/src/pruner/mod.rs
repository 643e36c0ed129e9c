//! Goal-conditioned action masks, their annealed relaxation, and the
//! persistent goal-to-mask bank.

mod bank;
mod schedule;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planner::{GoalId, NUM_GOALS};
use crate::provider::MaskProvider;
use crate::world::{Action, NUM_ACTIONS};

pub use bank::{canonical_goal, MaskBank, BANK_HEADER};
pub use schedule::{AnnealSchedule, ScheduleKind};

#[derive(Debug, Error)]
pub enum PrunerError {
    #[error("union of zero masks")]
    EmptyUnion,
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("mask bank line {line}: {msg}")]
    Bank { line: usize, msg: String },
    #[error("mask bank I/O: {0}")]
    Io(#[from] std::io::Error),
}

const FULL: u32 = (1 << NUM_ACTIONS) - 1;

/// One bit per action, in action index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ActionMask(u32);

impl ActionMask {
    pub const NONE: ActionMask = ActionMask(0);
    pub const ALL: ActionMask = ActionMask(FULL);

    pub fn from_bits(bits: u32) -> ActionMask {
        ActionMask(bits & FULL)
    }

    pub fn from_actions(actions: &[Action]) -> ActionMask {
        ActionMask(actions.iter().fold(0, |m, a| m | 1 << a.index()))
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn allows(self, a: Action) -> bool {
        self.get(a.index())
    }

    #[inline]
    pub fn get(self, j: usize) -> bool {
        self.0 >> j & 1 == 1
    }

    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: ActionMask) -> ActionMask {
        ActionMask(self.0 | other.0)
    }

    pub fn is_subset(self, other: ActionMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn actions(self) -> impl Iterator<Item = Action> {
        Action::ALL.into_iter().filter(move |a| self.allows(*a))
    }

    pub fn to_vec(self) -> [u8; NUM_ACTIONS] {
        std::array::from_fn(|j| self.get(j) as u8)
    }
}

impl fmt::Display for ActionMask {
    /// 17 characters of `0`/`1`, action 0 first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..NUM_ACTIONS {
            f.write_str(if self.get(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for ActionMask {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() != NUM_ACTIONS {
            return Err(format!("expected {NUM_ACTIONS} mask bits, got {}", s.len()));
        }
        let mut bits = 0;
        for (j, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << j,
                _ => return Err(format!("bad mask character '{c}'")),
            }
        }
        Ok(ActionMask(bits))
    }
}

/// Elementwise maximum.
pub fn union_masks(masks: &[ActionMask]) -> Result<ActionMask, PrunerError> {
    if masks.is_empty() {
        return Err(PrunerError::EmptyUnion);
    }
    Ok(masks.iter().fold(ActionMask::NONE, |a, b| a.union(*b)))
}

/// Unmasks each cleared bit independently with probability `xi`. Draws one
/// uniform per action in index order whatever the mask, so equal generator
/// states give coupled results across `xi`.
pub fn relax_mask<R: Rng + ?Sized>(m: ActionMask, xi: f64, rng: &mut R) -> ActionMask {
    let mut bits = m.0;
    for j in 0..NUM_ACTIONS {
        let u: f64 = rng.gen();
        if u < xi {
            bits |= 1 << j;
        }
    }
    ActionMask(bits)
}

/// Offline mask for each goal: goals that need walking get the four moves
/// plus the action that completes them; sleeping is stationary.
pub fn default_mask(g: GoalId) -> ActionMask {
    use Action as A;
    let moves = ActionMask::from_actions(&Action::MOVES);
    let with = |a: Action| moves.union(ActionMask::from_actions(&[a]));
    match g.name() {
        "wake_up" => ActionMask::from_actions(&[A::Sleep]),
        "place_stone" => with(A::PlaceStone),
        "place_table" => with(A::PlaceTable),
        "place_furnace" => with(A::PlaceFurnace),
        "place_plant" => with(A::PlacePlant),
        "make_wood_pickaxe" => with(A::MakeWoodPickaxe),
        "make_stone_pickaxe" => with(A::MakeStonePickaxe),
        "make_iron_pickaxe" => with(A::MakeIronPickaxe),
        "make_wood_sword" => with(A::MakeWoodSword),
        "make_stone_sword" => with(A::MakeStoneSword),
        "make_iron_sword" => with(A::MakeIronSword),
        "flee_zombie" | "flee_skeleton" | "return_to_table" | "return_to_furnace" => moves,
        _ => with(A::Do),
    }
}

pub fn default_masks() -> [ActionMask; NUM_GOALS] {
    std::array::from_fn(|i| default_mask(GoalId::new(i).unwrap()))
}

/// Bank lookup; on a miss asks the provider (if any) and stores a valid
/// answer, otherwise falls back to the built-in default.
pub fn goal_mask(
    g: GoalId,
    bank: &mut MaskBank,
    provider: Option<&mut (dyn MaskProvider + '_)>,
) -> ActionMask {
    let key = canonical_goal(g.text());
    if let Some(m) = bank.get(&key) {
        return m;
    }
    let Some(p) = provider else {
        return default_mask(g);
    };
    match p.related_actions(&key) {
        Ok(m) if !m.is_empty() && m.bits() & !FULL == 0 => {
            bank.insert(&key, m);
            m
        }
        Ok(_) => {
            log::warn!("provider returned an empty mask for '{key}'; using default");
            default_mask(g)
        }
        Err(e) => {
            log::warn!("mask query for '{key}' failed ({e}); using default");
            default_mask(g)
        }
    }
}
