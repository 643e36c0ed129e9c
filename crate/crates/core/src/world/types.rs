use std::fmt;

use serde::{Deserialize, Serialize};

/// Terrain and object kinds, in the renderer's id order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Block {
    Invalid = 0,
    OutOfBounds,
    Grass,
    Water,
    Stone,
    Tree,
    Wood,
    Path,
    Coal,
    Iron,
    Diamond,
    Table,
    Furnace,
    Sand,
    Lava,
    Plant,
    RipePlant,
}

pub const NUM_BLOCKS: usize = 17;

pub const BLOCK_NAMES: [&str; NUM_BLOCKS] = [
    "invalid",
    "out of bounds",
    "grass",
    "water",
    "stone",
    "tree",
    "wood",
    "path",
    "coal",
    "iron",
    "diamond",
    "crafting table",
    "furnace",
    "sand",
    "lava",
    "plant",
    "ripe plant",
];

impl Block {
    pub const ALL: [Block; NUM_BLOCKS] = [
        Block::Invalid,
        Block::OutOfBounds,
        Block::Grass,
        Block::Water,
        Block::Stone,
        Block::Tree,
        Block::Wood,
        Block::Path,
        Block::Coal,
        Block::Iron,
        Block::Diamond,
        Block::Table,
        Block::Furnace,
        Block::Sand,
        Block::Lava,
        Block::Plant,
        Block::RipePlant,
    ];

    pub fn from_id(id: u8) -> Option<Block> {
        Self::ALL.get(id as usize).copied()
    }

    pub fn name(self) -> &'static str {
        BLOCK_NAMES[self as usize]
    }

    pub fn from_name(name: &str) -> Option<Block> {
        BLOCK_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| Self::ALL[i])
    }

    /// Cells the player and land mobs can stand on.
    #[inline]
    pub fn walkable(self) -> bool {
        matches!(self, Block::Grass | Block::Sand | Block::Path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum MobKind {
    Zombie = 0,
    Cow,
    Skeleton,
    Arrow,
}

pub const NUM_MOB_KINDS: usize = 4;

/// Mob names as the text renderer prints them.
pub const MOB_NAMES: [&str; NUM_MOB_KINDS] = ["zombie", "cows", "skeletons", "arrows"];

impl MobKind {
    pub const ALL: [MobKind; NUM_MOB_KINDS] = [
        MobKind::Zombie,
        MobKind::Cow,
        MobKind::Skeleton,
        MobKind::Arrow,
    ];

    pub fn from_id(id: u8) -> Option<MobKind> {
        Self::ALL.get(id as usize).copied()
    }

    pub fn name(self) -> &'static str {
        MOB_NAMES[self as usize]
    }

    pub fn from_name(name: &str) -> Option<MobKind> {
        MOB_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| Self::ALL[i])
    }
}

/// The 17 discrete actions, in their fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Action {
    Noop = 0,
    MoveLeft,
    MoveRight,
    MoveUp,
    MoveDown,
    Do,
    Sleep,
    PlaceStone,
    PlaceTable,
    PlaceFurnace,
    PlacePlant,
    MakeWoodPickaxe,
    MakeStonePickaxe,
    MakeIronPickaxe,
    MakeWoodSword,
    MakeStoneSword,
    MakeIronSword,
}

pub const NUM_ACTIONS: usize = 17;

const ACTION_NAMES: [&str; NUM_ACTIONS] = [
    "noop",
    "move_left",
    "move_right",
    "move_up",
    "move_down",
    "do",
    "sleep",
    "place_stone",
    "place_table",
    "place_furnace",
    "place_plant",
    "make_wood_pickaxe",
    "make_stone_pickaxe",
    "make_iron_pickaxe",
    "make_wood_sword",
    "make_stone_sword",
    "make_iron_sword",
];

impl Action {
    pub const ALL: [Action; NUM_ACTIONS] = [
        Action::Noop,
        Action::MoveLeft,
        Action::MoveRight,
        Action::MoveUp,
        Action::MoveDown,
        Action::Do,
        Action::Sleep,
        Action::PlaceStone,
        Action::PlaceTable,
        Action::PlaceFurnace,
        Action::PlacePlant,
        Action::MakeWoodPickaxe,
        Action::MakeStonePickaxe,
        Action::MakeIronPickaxe,
        Action::MakeWoodSword,
        Action::MakeStoneSword,
        Action::MakeIronSword,
    ];

    pub const MOVES: [Action; 4] = [
        Action::MoveLeft,
        Action::MoveRight,
        Action::MoveUp,
        Action::MoveDown,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        ACTION_NAMES[self.index()]
    }

    pub fn from_name(name: &str) -> Option<Action> {
        ACTION_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| Self::ALL[i])
    }

    pub fn direction(self) -> Option<Direction> {
        match self {
            Action::MoveLeft => Some(Direction::Left),
            Action::MoveRight => Some(Direction::Right),
            Action::MoveUp => Some(Direction::Up),
            Action::MoveDown => Some(Direction::Down),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inventory slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Item {
    Sapling = 0,
    Wood,
    Stone,
    Coal,
    Iron,
    Diamond,
    WoodPickaxe,
    StonePickaxe,
    IronPickaxe,
    WoodSword,
    StoneSword,
    IronSword,
}

pub const NUM_ITEMS: usize = 12;
pub const MAX_ITEM: u8 = 9;

impl Item {
    pub const ALL: [Item; NUM_ITEMS] = [
        Item::Sapling,
        Item::Wood,
        Item::Stone,
        Item::Coal,
        Item::Iron,
        Item::Diamond,
        Item::WoodPickaxe,
        Item::StonePickaxe,
        Item::IronPickaxe,
        Item::WoodSword,
        Item::StoneSword,
        Item::IronSword,
    ];

    /// Order and spelling used by the text renderer.
    pub const RENDER_ORDER: [(Item, &'static str); NUM_ITEMS] = [
        (Item::Wood, "wood"),
        (Item::Stone, "stone"),
        (Item::Coal, "coal"),
        (Item::Iron, "iron"),
        (Item::Diamond, "diamond"),
        (Item::Sapling, "sapling"),
        (Item::WoodPickaxe, "wood pickaxe"),
        (Item::StonePickaxe, "stone pickaxe"),
        (Item::IronPickaxe, "iron pickaxe"),
        (Item::WoodSword, "wood sword"),
        (Item::StoneSword, "stone sword"),
        (Item::IronSword, "iron sword"),
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn render_name(self) -> &'static str {
        Self::RENDER_ORDER
            .iter()
            .find(|(i, _)| *i == self)
            .map(|(_, n)| *n)
            .unwrap_or("?")
    }

    pub fn from_render_name(name: &str) -> Option<Item> {
        let name = name.replace('_', " ");
        Self::RENDER_ORDER
            .iter()
            .find(|(_, n)| *n == name)
            .map(|(i, _)| *i)
    }
}

/// Twelve counters, each clamped to [0, 9].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Inventory(pub [u8; NUM_ITEMS]);

impl Inventory {
    #[inline]
    pub fn get(&self, item: Item) -> u8 {
        self.0[item.index()]
    }

    #[inline]
    pub fn has(&self, item: Item, n: u8) -> bool {
        self.get(item) >= n
    }

    pub fn set(&mut self, item: Item, n: u8) {
        self.0[item.index()] = n.min(MAX_ITEM);
    }

    pub fn add(&mut self, item: Item, n: u8) {
        let v = self.get(item).saturating_add(n);
        self.set(item, v);
    }

    pub fn take(&mut self, item: Item, n: u8) {
        self.0[item.index()] = self.get(item).saturating_sub(n);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Direction {
    Left = 0,
    Right,
    Up,
    Down,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Left,
        Direction::Right,
        Direction::Up,
        Direction::Down,
    ];

    #[inline]
    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::Left => (-1, 0),
            Direction::Right => (1, 0),
            Direction::Up => (0, -1),
            Direction::Down => (0, 1),
        }
    }

    pub fn from_delta(dx: i32, dy: i32) -> Option<Direction> {
        match (dx, dy) {
            (-1, 0) => Some(Direction::Left),
            (1, 0) => Some(Direction::Right),
            (0, -1) => Some(Direction::Up),
            (0, 1) => Some(Direction::Down),
            _ => None,
        }
    }

    pub fn from_id(id: u8) -> Option<Direction> {
        Self::ALL.get(id as usize).copied()
    }

    pub fn move_action(self) -> Action {
        match self {
            Direction::Left => Action::MoveLeft,
            Direction::Right => Action::MoveRight,
            Direction::Up => Action::MoveUp,
            Direction::Down => Action::MoveDown,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Pos {
    pub x: i32,
    pub y: i32,
}

impl Pos {
    pub const fn new(x: i32, y: i32) -> Pos {
        Pos { x, y }
    }

    #[inline]
    pub fn step(self, d: Direction) -> Pos {
        let (dx, dy) = d.delta();
        Pos::new(self.x + dx, self.y + dy)
    }

    #[inline]
    pub fn chebyshev(self, o: Pos) -> i32 {
        (self.x - o.x).abs().max((self.y - o.y).abs())
    }

    #[inline]
    pub fn manhattan(self, o: Pos) -> i32 {
        (self.x - o.x).abs() + (self.y - o.y).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mob {
    pub kind: MobKind,
    pub pos: Pos,
    pub health: i8,
    pub cooldown: u8,
    /// Travel direction; only meaningful for arrows.
    pub facing: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Player {
    pub pos: Pos,
    pub facing: Direction,
    pub health: u8,
    pub food: u8,
    pub drink: u8,
    pub energy: u8,
    pub sleeping: bool,
    pub(crate) hunger: u16,
    pub(crate) thirst: u16,
    pub(crate) fatigue: i16,
    pub(crate) recover: i16,
}

impl Player {
    pub fn spawn(pos: Pos) -> Player {
        Player {
            pos,
            facing: Direction::Down,
            health: 9,
            food: 9,
            drink: 9,
            energy: 9,
            sleeping: false,
            hunger: 0,
            thirst: 0,
            fatigue: 0,
            recover: 0,
        }
    }

    /// Health, food, drink and energy, in that order.
    pub fn meters(&self) -> [u8; 4] {
        [self.health, self.food, self.drink, self.energy]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantState {
    pub pos: Pos,
    pub age: u16,
}
