//! Deterministic goal planner: maps a state to three weighted goals.

mod goals;
mod parse;
mod table;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::achievements::{AchievementId, AchievementSet};
use crate::world::{Block, Inventory, Item, MobKind, World};

pub use goals::{Category, Goal, GoalId, GOALS, NUM_GOALS};
pub use parse::parse_text_observation;
pub use table::{
    forward_target, offline_rule, parse_weights, stage_for_step, validate_weights, weights_to_text,
    AgentProgress, PriorityTable, Weights, FORWARD_FACTOR, FORWARD_FLOOR, MASTERED_FACTOR,
    MASTERED_RATE, NUM_STAGES,
};

pub const K: usize = 3;
pub const URGENCY_THRESHOLD: f64 = 5.0;
pub const URGENCY_SCALE: f64 = 2.0;
pub const FRONTIER_SCALE: f64 = 1.0;
/// Score for goals suggested by what is in view rather than by the craft tree.
pub const OPPORTUNITY_SCALE: f64 = 0.5;
/// Health at or below which survival overrides everything else.
pub const EMERGENCY_HEALTH: u8 = 3;
pub const EMERGENCY_BONUS: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlannerError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid priority table: {0}")]
    InvalidTable(String),
}

/// What the planner needs to know about a state. Built from a world or
/// parsed from the text observation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlannerView {
    /// Bit `b as u32` set when block `b` is in view.
    pub blocks: u32,
    /// Bit `m as u8` set when a living mob of kind `m` is in view.
    pub mobs: u8,
    pub inventory: Inventory,
    /// health, food, drink, energy
    pub meters: [u8; 4],
    pub daylight: f32,
    /// Achievements unlocked so far this episode. Text observations do not
    /// carry this; callers fill it in.
    pub unlocked: AchievementSet,
}

impl PlannerView {
    pub fn from_world(w: &World) -> PlannerView {
        let (blocks, mobs) = w.view_bits();
        PlannerView {
            blocks,
            mobs,
            inventory: *w.inventory(),
            meters: w.player().meters(),
            daylight: w.daylight(),
            unlocked: w.unlocked(),
        }
    }

    pub fn sees(&self, b: Block) -> bool {
        self.blocks & (1 << b as u32) != 0
    }

    pub fn sees_mob(&self, m: MobKind) -> bool {
        self.mobs & (1 << m as u8) != 0
    }
}

/// `max(0, (threshold - meter) / threshold)`.
pub fn urgency(meter: u8) -> f64 {
    ((URGENCY_THRESHOLD - meter as f64) / URGENCY_THRESHOLD).max(0.0)
}

/// Urgency per need, in meter order: health, food, drink, energy.
pub fn assess_survival_needs(meters: [u8; 4]) -> [f64; 4] {
    meters.map(urgency)
}

/// Survival urgency attributed to each goal.
pub fn survival_scores(view: &PlannerView) -> [f64; NUM_GOALS] {
    let [health, food, drink, energy] = assess_survival_needs(view.meters);
    let mut u = [0.0; NUM_GOALS];
    u[GoalId::for_achievement(AchievementId::CollectDrink).index()] = drink;
    let plant = view.sees(Block::Plant) || view.sees(Block::RipePlant);
    let food_goal = if plant && !view.sees_mob(MobKind::Cow) {
        AchievementId::EatPlant
    } else {
        AchievementId::EatCow
    };
    u[GoalId::for_achievement(food_goal).index()] = food;
    u[GoalId::for_achievement(AchievementId::WakeUp).index()] = energy;
    if view.sees_mob(MobKind::Zombie) {
        u[GoalId::FLEE_ZOMBIE.index()] = health;
    }
    if view.sees_mob(MobKind::Skeleton) || view.sees_mob(MobKind::Arrow) {
        u[GoalId::FLEE_SKELETON.index()] = health;
    }
    u
}

/// Bit set over goal ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GoalSet(pub u32);

impl GoalSet {
    pub fn insert(&mut self, g: GoalId) {
        self.0 |= 1 << g.index();
    }

    pub fn contains(self, g: GoalId) -> bool {
        self.0 & (1 << g.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = GoalId> {
        GoalId::all().filter(move |g| self.contains(*g))
    }
}

#[derive(Debug, Clone, Copy)]
enum Need {
    Has(Item),
    Station(AchievementId),
}

/// Craft-tree requirements: what must be held or placed before the
/// achievement can be earned.
fn craft_needs(a: AchievementId) -> Option<&'static [Need]> {
    use AchievementId as A;
    use Item as I;
    use Need::*;
    Some(match a {
        A::CollectWood => &[],
        A::PlaceTable => &[Has(I::Wood)],
        A::MakeWoodPickaxe | A::MakeWoodSword => &[Station(A::PlaceTable), Has(I::Wood)],
        A::CollectStone | A::CollectCoal => &[Has(I::WoodPickaxe)],
        A::PlaceStone => &[Has(I::Stone)],
        A::MakeStonePickaxe | A::MakeStoneSword => {
            &[Station(A::PlaceTable), Has(I::Wood), Has(I::Stone)]
        }
        A::PlaceFurnace => &[Station(A::PlaceTable), Has(I::Stone)],
        A::CollectIron => &[Has(I::StonePickaxe)],
        A::MakeIronPickaxe | A::MakeIronSword => &[
            Station(A::PlaceTable),
            Station(A::PlaceFurnace),
            Has(I::Wood),
            Has(I::Coal),
            Has(I::Iron),
        ],
        A::CollectDiamond => &[Has(I::IronPickaxe)],
        _ => return None,
    })
}

/// The achievement that produces a held item.
fn source(item: Item) -> AchievementId {
    use AchievementId as A;
    match item {
        Item::Wood => A::CollectWood,
        Item::Stone => A::CollectStone,
        Item::Coal => A::CollectCoal,
        Item::Iron => A::CollectIron,
        Item::Diamond => A::CollectDiamond,
        Item::Sapling => A::CollectSapling,
        Item::WoodPickaxe => A::MakeWoodPickaxe,
        Item::StonePickaxe => A::MakeStonePickaxe,
        Item::IronPickaxe => A::MakeIronPickaxe,
        Item::WoodSword => A::MakeWoodSword,
        Item::StoneSword => A::MakeStoneSword,
        Item::IronSword => A::MakeIronSword,
    }
}

fn is_resource(item: Item) -> bool {
    matches!(
        item,
        Item::Wood | Item::Stone | Item::Coal | Item::Iron | Item::Diamond
    )
}

fn met(n: Need, inv: &Inventory, unlocked: AchievementSet) -> bool {
    match n {
        Need::Has(i) => inv.has(i, 1),
        Need::Station(a) => unlocked.contains(a),
    }
}

fn ready(a: AchievementId, inv: &Inventory, unlocked: AchievementSet) -> bool {
    craft_needs(a).is_some_and(|ns| ns.iter().all(|n| met(*n, inv, unlocked)))
}

/// Locked craft-tree achievements that can be earned now, plus collection
/// goals for resources that are the only thing missing and can be mined
/// with the tools at hand.
pub fn craft_frontier(inv: &Inventory, unlocked: AchievementSet) -> GoalSet {
    let mut out = GoalSet::default();
    for a in AchievementId::ALL {
        let Some(needs) = craft_needs(a) else {
            continue;
        };
        if unlocked.contains(a) {
            continue;
        }
        let missing: Vec<Need> = needs
            .iter()
            .copied()
            .filter(|n| !met(*n, inv, unlocked))
            .collect();
        if missing.is_empty() {
            out.insert(GoalId::for_achievement(a));
            continue;
        }
        let hop = missing.iter().all(|n| match n {
            Need::Has(i) => is_resource(*i) && ready(source(*i), inv, unlocked),
            Need::Station(_) => false,
        });
        if hop {
            for n in missing {
                if let Need::Has(i) = n {
                    out.insert(GoalId::for_achievement(source(i)));
                }
            }
        }
    }
    out
}

/// The locked achievement to push toward: start at the deepest locked one
/// and descend through missing requirements until one is ready now.
pub fn forward_goal(inv: &Inventory, unlocked: AchievementSet) -> Option<GoalId> {
    let g = crate::achievements::DependencyGraph::builtin();
    let mut cur = AchievementId::ALL
        .into_iter()
        .filter(|a| !unlocked.contains(*a))
        .max_by(|a, b| g.depth(*a).cmp(&g.depth(*b)).then(b.cmp(a)))?;
    for _ in 0..16 {
        let Some(needs) = craft_needs(cur) else { break };
        let next = needs
            .iter()
            .find(|n| !met(**n, inv, unlocked))
            .map(|n| match n {
                Need::Has(i) => source(*i),
                Need::Station(a) => *a,
            });
        match next {
            // Stop before stepping onto an already earned achievement, so
            // the result is always locked.
            Some(a) if !unlocked.contains(a) => cur = a,
            _ => break,
        }
    }
    Some(GoalId::for_achievement(cur))
}

/// Exactly `K` goals with weights summing to one, highest first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedGoalSet {
    pub items: [(GoalId, f64); K],
}

impl WeightedGoalSet {
    /// Normalizes raw scores; equal weights when every score is zero.
    pub fn from_scores(mut items: [(GoalId, f64); K]) -> WeightedGoalSet {
        let total: f64 = items.iter().map(|(_, s)| s).sum();
        for (_, s) in items.iter_mut() {
            *s = if total > 0.0 {
                *s / total
            } else {
                1.0 / K as f64
            };
        }
        items.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        WeightedGoalSet { items }
    }

    pub fn goals(&self) -> [GoalId; K] {
        self.items.map(|(g, _)| g)
    }

    pub fn weights(&self) -> [f64; K] {
        self.items.map(|(_, w)| w)
    }

    pub fn top(&self) -> GoalId {
        self.items[0].0
    }

    pub fn contains(&self, g: GoalId) -> bool {
        self.items.iter().any(|(x, _)| *x == g)
    }

    /// Same goals with equal weights.
    pub fn uniform(&self) -> WeightedGoalSet {
        let mut s = *self;
        for (_, w) in s.items.iter_mut() {
            *w = 1.0 / K as f64;
        }
        s
    }
}

/// Per-goal score before top-k selection.
pub fn goal_scores(view: &PlannerView, table: &PriorityTable) -> [f64; NUM_GOALS] {
    let u = survival_scores(view);
    let mut score = [0.0; NUM_GOALS];
    let emergency = view.meters[0] <= EMERGENCY_HEALTH && u.iter().any(|v| *v > 0.0);
    if emergency {
        let top = (0..NUM_GOALS)
            .max_by(|a, b| u[*a].total_cmp(&u[*b]).then(b.cmp(a)))
            .unwrap();
        for g in 0..NUM_GOALS {
            score[g] = URGENCY_SCALE * u[g];
        }
        score[top] += EMERGENCY_BONUS;
        return score;
    }
    let frontier = craft_frontier(&view.inventory, view.unlocked);
    let opp = opportunities(view);
    for g in GoalId::all() {
        let i = g.index();
        let f = if frontier.contains(g) {
            FRONTIER_SCALE
        } else if opp.contains(g) {
            OPPORTUNITY_SCALE
        } else {
            0.0
        };
        score[i] = URGENCY_SCALE * u[i] + f + table.weight(g);
    }
    score
}

/// Locked achievements that what is in view makes available.
fn opportunities(view: &PlannerView) -> GoalSet {
    use AchievementId as A;
    let mut s = GoalSet::default();
    let mut add = |a: A, cond: bool| {
        if cond && !view.unlocked.contains(a) {
            s.insert(GoalId::for_achievement(a));
        }
    };
    add(A::EatCow, view.sees_mob(MobKind::Cow));
    add(A::EatPlant, view.sees(Block::RipePlant));
    add(A::CollectSapling, view.sees(Block::Grass));
    add(
        A::PlacePlant,
        view.inventory.has(Item::Sapling, 1) && view.sees(Block::Grass),
    );
    add(A::CollectDrink, view.sees(Block::Water));
    add(A::DefeatZombie, view.sees_mob(MobKind::Zombie));
    add(A::DefeatSkeleton, view.sees_mob(MobKind::Skeleton));
    add(A::WakeUp, view.daylight < 0.3);
    s
}

fn needs_table(g: GoalId) -> bool {
    use AchievementId as A;
    matches!(
        g.target(),
        Some(
            A::MakeWoodPickaxe
                | A::MakeWoodSword
                | A::MakeStonePickaxe
                | A::MakeStoneSword
                | A::MakeIronPickaxe
                | A::MakeIronSword
                | A::PlaceFurnace
        )
    )
}

fn needs_furnace(g: GoalId) -> bool {
    matches!(
        g.target(),
        Some(AchievementId::MakeIronPickaxe | AchievementId::MakeIronSword)
    )
}

/// Top-`K` goals by score, ties to the lower id. Crafting goals whose
/// station was placed but is out of view become the matching return goal.
/// With no survival need active, a locked goal is guaranteed a slot.
pub fn determine_goal(view: &PlannerView, table: &PriorityTable) -> WeightedGoalSet {
    let score = goal_scores(view, table);
    let mut order: [usize; NUM_GOALS] = std::array::from_fn(|i| i);
    order.sort_by(|a, b| score[*b].total_cmp(&score[*a]).then(a.cmp(b)));
    let mut items: [(GoalId, f64); K] =
        std::array::from_fn(|i| (GoalId::new(order[i]).unwrap(), score[order[i]]));

    for i in 0..K {
        let g = items[i].0;
        let swap = if needs_table(g)
            && !view.sees(Block::Table)
            && view.unlocked.contains(AchievementId::PlaceTable)
        {
            Some(GoalId::RETURN_TO_TABLE)
        } else if needs_furnace(g)
            && !view.sees(Block::Furnace)
            && view.unlocked.contains(AchievementId::PlaceFurnace)
        {
            Some(GoalId::RETURN_TO_FURNACE)
        } else {
            None
        };
        if let Some(r) = swap {
            if !items.iter().any(|(x, _)| *x == r) {
                items[i].0 = r;
            }
        }
    }

    let calm = survival_scores(view).iter().all(|u| *u == 0.0);
    let locked = |g: GoalId| g.target().is_some_and(|a| !view.unlocked.contains(a));
    if calm && !items.iter().any(|(g, _)| locked(*g)) {
        if let Some(f) = forward_goal(&view.inventory, view.unlocked) {
            items[K - 1] = (f, score[f.index()].max(FORWARD_FLOOR));
        }
    }
    WeightedGoalSet::from_scores(items)
}

/// Parses the text observation and plans from it.
pub fn determine_goal_text(
    text: &str,
    unlocked: AchievementSet,
    table: &PriorityTable,
) -> Result<WeightedGoalSet, PlannerError> {
    let mut view = parse_text_observation(text)?;
    view.unlocked = unlocked;
    Ok(determine_goal(&view, table))
}
