use std::fmt;

use serde::{Deserialize, Serialize};

use crate::achievements::{AchievementId, NUM_ACHIEVEMENTS};

pub const NUM_GOALS: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Survival,
    Resource,
    Craft,
    Place,
    Combat,
    Sleep,
}

/// Index into the closed goal vocabulary. Ids `0..22` target the achievement
/// with the same index; the last four are auxiliary goals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GoalId(u8);

impl GoalId {
    pub const FLEE_ZOMBIE: GoalId = GoalId(22);
    pub const FLEE_SKELETON: GoalId = GoalId(23);
    pub const RETURN_TO_TABLE: GoalId = GoalId(24);
    pub const RETURN_TO_FURNACE: GoalId = GoalId(25);

    pub fn new(i: usize) -> Option<GoalId> {
        (i < NUM_GOALS).then_some(GoalId(i as u8))
    }

    pub fn all() -> impl Iterator<Item = GoalId> {
        (0..NUM_GOALS as u8).map(GoalId)
    }

    pub fn for_achievement(a: AchievementId) -> GoalId {
        GoalId(a.index() as u8)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// The achievement this goal aims at, if any.
    pub fn target(self) -> Option<AchievementId> {
        AchievementId::from_index(self.index())
    }

    pub fn goal(self) -> &'static Goal {
        &GOALS[self.index()]
    }

    pub fn text(self) -> &'static str {
        self.goal().text
    }

    /// Identifier used in priority tables and mask bank files.
    pub fn name(self) -> &'static str {
        self.goal().name
    }

    pub fn category(self) -> Category {
        self.goal().category
    }

    pub fn from_name(name: &str) -> Option<GoalId> {
        GOALS
            .iter()
            .position(|g| g.name == name)
            .map(|i| GoalId(i as u8))
    }

    /// Accepts either the table name or the free text ("collect wood").
    pub fn from_text(text: &str) -> Option<GoalId> {
        let t = text.trim().to_ascii_lowercase();
        GOALS
            .iter()
            .position(|g| g.text == t || g.name == t || g.name == t.replace(' ', "_"))
            .map(|i| GoalId(i as u8))
    }
}

impl fmt::Display for GoalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.text())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goal {
    pub id: GoalId,
    pub name: &'static str,
    pub text: &'static str,
    pub category: Category,
}

const fn goal(id: u8, name: &'static str, text: &'static str, category: Category) -> Goal {
    Goal {
        id: GoalId(id),
        name,
        text,
        category,
    }
}

use Category::*;

pub static GOALS: [Goal; NUM_GOALS] = [
    goal(0, "collect_coal", "collect coal", Resource),
    goal(1, "collect_diamond", "collect diamond", Resource),
    goal(2, "collect_drink", "collect drink", Survival),
    goal(3, "collect_iron", "collect iron", Resource),
    goal(4, "collect_sapling", "collect sapling", Resource),
    goal(5, "collect_stone", "collect stone", Resource),
    goal(6, "collect_wood", "collect wood", Resource),
    goal(7, "defeat_skeleton", "defeat skeleton", Combat),
    goal(8, "defeat_zombie", "defeat zombie", Combat),
    goal(9, "eat_cow", "eat cow", Survival),
    goal(10, "eat_plant", "eat plant", Survival),
    goal(11, "make_iron_pickaxe", "make iron pickaxe", Craft),
    goal(12, "make_iron_sword", "make iron sword", Craft),
    goal(13, "make_stone_pickaxe", "make stone pickaxe", Craft),
    goal(14, "make_stone_sword", "make stone sword", Craft),
    goal(15, "make_wood_pickaxe", "make wood pickaxe", Craft),
    goal(16, "make_wood_sword", "make wood sword", Craft),
    goal(17, "place_furnace", "place furnace", Place),
    goal(18, "place_plant", "place plant", Place),
    goal(19, "place_stone", "place stone", Place),
    goal(20, "place_table", "place table", Place),
    goal(21, "wake_up", "sleep", Sleep),
    goal(22, "flee_zombie", "flee zombie", Survival),
    goal(23, "flee_skeleton", "flee skeleton", Survival),
    goal(24, "return_to_table", "return to table", Craft),
    goal(25, "return_to_furnace", "return to furnace", Craft),
];

const _: () = assert!(NUM_ACHIEVEMENTS < NUM_GOALS);
