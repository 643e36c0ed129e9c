use rand::Rng;

use super::types::*;
use super::{daylight_at, StepResult, Transition, World, WorldError};
use crate::achievements::{AchievementId, AchievementSet};

const SLEEP_RESTORE_INTERVAL: i16 = 5;
const ZOMBIE_DAMAGE: u8 = 2;
const ZOMBIE_SLEEP_DAMAGE: u8 = 7;
const ZOMBIE_COOLDOWN: u8 = 5;
const ARROW_DAMAGE: u8 = 2;
const SKELETON_RELOAD: u8 = 4;
const MAX_MOBS: usize = 48;

impl World {
    /// Applies one action and returns the full result including observation.
    pub fn step(&mut self, action: Action) -> Result<StepResult, WorldError> {
        let t = self.advance(action)?;
        Ok(StepResult {
            observation: self.observe(),
            reward: t.reward,
            done: t.done,
            newly_unlocked: t.newly_unlocked.iter().collect(),
        })
    }

    /// Applies one action without building an observation.
    pub fn advance(&mut self, action: Action) -> Result<Transition, WorldError> {
        if self.done {
            return Err(WorldError::EpisodeDone);
        }
        let health_before = self.player.health as i32;
        let mut newly = AchievementSet::EMPTY;

        self.step_count += 1;
        self.daylight = daylight_at(self.step_count, self.config.day_length);
        let action = if self.player.sleeping {
            Action::Noop
        } else {
            action
        };
        self.apply_action(action, &mut newly);
        self.update_life_stats(&mut newly);
        self.update_mobs();
        self.grow_plants();
        if self.step_count % 10 == 0 {
            self.balance_mobs();
        }
        self.mobs.retain(|m| m.health > 0);

        let health_after = self.player.health as i32;
        let reward = newly.len() as f32 + 0.1 * (health_after - health_before) as f32;
        self.done = self.player.health == 0 || self.step_count >= self.config.max_episode_steps;
        Ok(Transition {
            reward,
            done: self.done,
            newly_unlocked: newly,
        })
    }

    fn unlock(&mut self, a: AchievementId, newly: &mut AchievementSet) {
        if self.unlocked.insert(a) {
            newly.insert(a);
        }
    }

    #[inline]
    fn occupied(&self, p: Pos) -> bool {
        self.mobs.iter().any(|m| m.health > 0 && m.pos == p)
    }

    fn hurt(&mut self, amount: u8) {
        self.player.health = self.player.health.saturating_sub(amount);
        self.player.sleeping = false;
    }

    fn apply_action(&mut self, action: Action, newly: &mut AchievementSet) {
        use AchievementId as A;
        if let Some(dir) = action.direction() {
            self.player.facing = dir;
            let to = self.player.pos.step(dir);
            if !self.in_bounds(to) || self.occupied(to) {
                return;
            }
            match self.block(to) {
                b if b.walkable() => self.player.pos = to,
                Block::Lava => {
                    self.player.pos = to;
                    self.player.health = 0;
                }
                _ => {}
            }
            return;
        }
        let target = self.target();
        match action {
            Action::Noop => {}
            Action::Do => self.interact(target, newly),
            Action::Sleep => {
                if self.player.energy < 9 {
                    self.player.sleeping = true;
                }
            }
            Action::PlaceStone => {
                if self.inventory.has(Item::Stone, 1)
                    && self.can_place(
                        target,
                        &[
                            Block::Grass,
                            Block::Sand,
                            Block::Path,
                            Block::Water,
                            Block::Lava,
                        ],
                    )
                {
                    self.inventory.take(Item::Stone, 1);
                    self.place(target, Block::Stone);
                    self.unlock(A::PlaceStone, newly);
                }
            }
            Action::PlaceTable => {
                if self.inventory.has(Item::Wood, 1)
                    && self.can_place(target, &[Block::Grass, Block::Sand, Block::Path])
                {
                    self.inventory.take(Item::Wood, 1);
                    self.place(target, Block::Table);
                    self.unlock(A::PlaceTable, newly);
                }
            }
            Action::PlaceFurnace => {
                if self.inventory.has(Item::Stone, 1)
                    && self.nearby(Block::Table)
                    && self.can_place(target, &[Block::Grass, Block::Sand, Block::Path])
                {
                    self.inventory.take(Item::Stone, 1);
                    self.place(target, Block::Furnace);
                    self.unlock(A::PlaceFurnace, newly);
                }
            }
            Action::PlacePlant => {
                if self.inventory.has(Item::Sapling, 1) && self.can_place(target, &[Block::Grass]) {
                    self.inventory.take(Item::Sapling, 1);
                    self.place(target, Block::Plant);
                    self.plants.push(PlantState {
                        pos: target,
                        age: 0,
                    });
                    self.unlock(A::PlacePlant, newly);
                }
            }
            Action::MakeWoodPickaxe => self.craft(
                &[(Item::Wood, 1)],
                false,
                Item::WoodPickaxe,
                A::MakeWoodPickaxe,
                newly,
            ),
            Action::MakeWoodSword => self.craft(
                &[(Item::Wood, 1)],
                false,
                Item::WoodSword,
                A::MakeWoodSword,
                newly,
            ),
            Action::MakeStonePickaxe => self.craft(
                &[(Item::Wood, 1), (Item::Stone, 1)],
                false,
                Item::StonePickaxe,
                A::MakeStonePickaxe,
                newly,
            ),
            Action::MakeStoneSword => self.craft(
                &[(Item::Wood, 1), (Item::Stone, 1)],
                false,
                Item::StoneSword,
                A::MakeStoneSword,
                newly,
            ),
            Action::MakeIronPickaxe => self.craft(
                &[(Item::Wood, 1), (Item::Coal, 1), (Item::Iron, 1)],
                true,
                Item::IronPickaxe,
                A::MakeIronPickaxe,
                newly,
            ),
            Action::MakeIronSword => self.craft(
                &[(Item::Wood, 1), (Item::Coal, 1), (Item::Iron, 1)],
                true,
                Item::IronSword,
                A::MakeIronSword,
                newly,
            ),
            Action::MoveLeft | Action::MoveRight | Action::MoveUp | Action::MoveDown => {}
        }
    }

    fn can_place(&self, p: Pos, onto: &[Block]) -> bool {
        self.in_bounds(p) && onto.contains(&self.block(p)) && !self.occupied(p)
    }

    fn place(&mut self, p: Pos, b: Block) {
        let i = self.idx(p);
        self.grid[i] = b;
    }

    fn craft(
        &mut self,
        uses: &[(Item, u8)],
        needs_furnace: bool,
        out: Item,
        a: AchievementId,
        newly: &mut AchievementSet,
    ) {
        if !uses.iter().all(|&(it, n)| self.inventory.has(it, n)) {
            return;
        }
        if !self.nearby(Block::Table) || (needs_furnace && !self.nearby(Block::Furnace)) {
            return;
        }
        for &(it, n) in uses {
            self.inventory.take(it, n);
        }
        self.inventory.add(out, 1);
        self.unlock(a, newly);
    }

    fn interact(&mut self, target: Pos, newly: &mut AchievementSet) {
        use AchievementId as A;
        if !self.in_bounds(target) {
            return;
        }
        if let Some(mi) = self
            .mobs
            .iter()
            .position(|m| m.health > 0 && m.pos == target)
        {
            self.attack(mi, newly);
            return;
        }
        let mine =
            |w: &mut World, tool: Option<Item>, item: Item, a: A, newly: &mut AchievementSet| {
                if tool.is_some_and(|t| !w.inventory.has(t, 1)) {
                    return;
                }
                w.inventory.add(item, 1);
                w.place(target, Block::Path);
                w.unlock(a, newly);
            };
        match self.block(target) {
            Block::Tree => {
                self.inventory.add(Item::Wood, 1);
                self.unlock(A::CollectWood, newly);
            }
            Block::Stone => mine(
                self,
                Some(Item::WoodPickaxe),
                Item::Stone,
                A::CollectStone,
                newly,
            ),
            Block::Coal => mine(
                self,
                Some(Item::WoodPickaxe),
                Item::Coal,
                A::CollectCoal,
                newly,
            ),
            Block::Iron => mine(
                self,
                Some(Item::StonePickaxe),
                Item::Iron,
                A::CollectIron,
                newly,
            ),
            Block::Diamond => mine(
                self,
                Some(Item::IronPickaxe),
                Item::Diamond,
                A::CollectDiamond,
                newly,
            ),
            Block::Water => {
                self.player.drink = (self.player.drink + 1).min(9);
                self.player.thirst = 0;
                self.unlock(A::CollectDrink, newly);
            }
            Block::Grass => {
                if self.rng.gen::<f32>() < 0.1 {
                    self.inventory.add(Item::Sapling, 1);
                    self.unlock(A::CollectSapling, newly);
                }
            }
            Block::RipePlant => {
                self.player.food = (self.player.food + 4).min(9);
                self.player.hunger = 0;
                self.place(target, Block::Plant);
                if let Some(pl) = self.plants.iter_mut().find(|pl| pl.pos == target) {
                    pl.age = 0;
                }
                self.unlock(A::EatPlant, newly);
            }
            _ => {}
        }
    }

    fn damage(&self) -> i8 {
        if self.inventory.has(Item::IronSword, 1) {
            8
        } else if self.inventory.has(Item::StoneSword, 1) {
            5
        } else if self.inventory.has(Item::WoodSword, 1) {
            3
        } else {
            1
        }
    }

    fn attack(&mut self, mi: usize, newly: &mut AchievementSet) {
        let dmg = self.damage();
        let mob = &mut self.mobs[mi];
        let kind = mob.kind;
        if kind == MobKind::Arrow {
            return;
        }
        mob.health -= dmg;
        if mob.health > 0 {
            return;
        }
        match kind {
            MobKind::Zombie => self.unlock(AchievementId::DefeatZombie, newly),
            MobKind::Skeleton => self.unlock(AchievementId::DefeatSkeleton, newly),
            MobKind::Cow => {
                self.player.food = (self.player.food + 6).min(9);
                self.player.hunger = 0;
                self.unlock(AchievementId::EatCow, newly);
            }
            MobKind::Arrow => {}
        }
    }

    fn update_life_stats(&mut self, newly: &mut AchievementSet) {
        let cfg = &self.config;
        let p = &mut self.player;
        p.hunger += 1;
        if p.hunger as u32 >= cfg.food_decay {
            p.hunger = 0;
            p.food = p.food.saturating_sub(1);
        }
        p.thirst += 1;
        if p.thirst as u32 >= cfg.drink_decay {
            p.thirst = 0;
            p.drink = p.drink.saturating_sub(1);
        }
        if p.sleeping {
            p.fatigue = p.fatigue.min(0) - 1;
            if p.fatigue <= -SLEEP_RESTORE_INTERVAL {
                p.fatigue = 0;
                p.energy = (p.energy + 1).min(9);
            }
        } else {
            p.fatigue = p.fatigue.max(0) + 1;
            if p.fatigue as u32 >= cfg.energy_decay {
                p.fatigue = 0;
                p.energy = p.energy.saturating_sub(1);
            }
        }
        let ok = p.food > 0 && p.drink > 0 && (p.energy > 0 || p.sleeping);
        if ok {
            p.recover = p.recover.max(0) + 1;
            if p.recover as u32 >= cfg.regen_interval {
                p.recover = 0;
                p.health = (p.health + 1).min(9);
            }
        } else {
            p.recover = p.recover.min(0) - 1;
            if (-p.recover) as u32 >= cfg.starve_interval {
                p.recover = 0;
                p.health = p.health.saturating_sub(1);
            }
        }
        if p.sleeping && p.energy >= 9 && self.daylight >= 0.3 {
            p.sleeping = false;
            self.unlock(AchievementId::WakeUp, newly);
        }
    }

    fn free_for_mob(&self, p: Pos, kind: MobKind) -> bool {
        if !self.in_bounds(p) || p == self.player.pos || self.occupied(p) {
            return false;
        }
        let b = self.block(p);
        match kind {
            MobKind::Zombie | MobKind::Cow => b.walkable(),
            MobKind::Skeleton => b == Block::Path,
            MobKind::Arrow => b.walkable() || matches!(b, Block::Water | Block::Lava),
        }
    }

    fn try_move(&mut self, mi: usize, d: Direction) -> bool {
        let m = self.mobs[mi];
        let to = m.pos.step(d);
        if self.free_for_mob(to, m.kind) {
            self.mobs[mi].pos = to;
            true
        } else {
            false
        }
    }

    fn random_dir(&mut self) -> Direction {
        Direction::ALL[self.rng.gen_range(0..4)]
    }

    /// Direction toward the player along the long axis, or the short one
    /// with probability 0.2.
    fn toward_player(&mut self, from: Pos) -> Option<Direction> {
        let dx = self.player.pos.x - from.x;
        let dy = self.player.pos.y - from.y;
        let long_first = self.rng.gen::<f32>() < 0.8;
        let x_long = dx.abs() > dy.abs();
        let along_x = x_long == long_first;
        if along_x {
            Direction::from_delta(dx.signum(), 0)
        } else {
            Direction::from_delta(0, dy.signum())
        }
    }

    fn update_mobs(&mut self) {
        let n = self.mobs.len();
        for mi in 0..n {
            if self.mobs[mi].health <= 0 {
                continue;
            }
            match self.mobs[mi].kind {
                MobKind::Zombie => self.update_zombie(mi),
                MobKind::Cow => {
                    if self.rng.gen::<f32>() < 0.5 {
                        let d = self.random_dir();
                        self.try_move(mi, d);
                    }
                }
                MobKind::Skeleton => self.update_skeleton(mi),
                MobKind::Arrow => self.update_arrow(mi),
            }
        }
    }

    fn update_zombie(&mut self, mi: usize) {
        let pos = self.mobs[mi].pos;
        let near = pos.chebyshev(self.player.pos) <= 8;
        if near && self.rng.gen::<f32>() < 0.9 {
            if let Some(d) = self.toward_player(pos) {
                self.try_move(mi, d);
            }
        } else {
            let d = self.random_dir();
            self.try_move(mi, d);
        }
        let m = &mut self.mobs[mi];
        if m.pos.manhattan(self.player.pos) == 1 {
            if m.cooldown > 0 {
                m.cooldown -= 1;
            } else {
                m.cooldown = ZOMBIE_COOLDOWN;
                let dmg = if self.player.sleeping {
                    ZOMBIE_SLEEP_DAMAGE
                } else {
                    ZOMBIE_DAMAGE
                };
                self.hurt(dmg);
            }
        }
    }

    fn update_skeleton(&mut self, mi: usize) {
        let m = self.mobs[mi];
        if m.cooldown > 0 {
            self.mobs[mi].cooldown -= 1;
        }
        let dx = self.player.pos.x - m.pos.x;
        let dy = self.player.pos.y - m.pos.y;
        let dist = m.pos.chebyshev(self.player.pos);
        let aligned = (dx == 0 || dy == 0) && dist <= 4;
        if aligned && self.mobs[mi].cooldown == 0 && self.rng.gen::<f32>() < 0.6 {
            if let Some(d) = Direction::from_delta(dx.signum(), dy.signum()) {
                self.mobs[mi].cooldown = SKELETON_RELOAD;
                self.mobs[mi].facing = d;
                let at = m.pos.step(d);
                if at == self.player.pos {
                    self.hurt(ARROW_DAMAGE);
                } else if self.free_for_mob(at, MobKind::Arrow) && self.mobs.len() < MAX_MOBS {
                    self.mobs.push(Mob {
                        kind: MobKind::Arrow,
                        pos: at,
                        health: 1,
                        cooldown: 0,
                        facing: d,
                    });
                }
            }
        } else if dist <= 5 && self.rng.gen::<f32>() < 0.3 {
            if let Some(d) = self.toward_player(m.pos) {
                self.try_move(mi, d);
            }
        } else if self.rng.gen::<f32>() < 0.2 {
            let d = self.random_dir();
            self.try_move(mi, d);
        }
    }

    fn update_arrow(&mut self, mi: usize) {
        let m = self.mobs[mi];
        let to = m.pos.step(m.facing);
        if to == self.player.pos {
            self.hurt(ARROW_DAMAGE);
            self.mobs[mi].health = 0;
        } else if self.free_for_mob(to, MobKind::Arrow) {
            self.mobs[mi].pos = to;
        } else {
            self.mobs[mi].health = 0;
        }
    }

    fn grow_plants(&mut self) {
        let ripen = self.config.plant_ripen as u16;
        for k in 0..self.plants.len() {
            let pl = self.plants[k];
            if pl.age < ripen {
                self.plants[k].age += 1;
                if pl.age + 1 == ripen {
                    let i = self.idx(pl.pos);
                    if self.grid[i] == Block::Plant {
                        self.grid[i] = Block::RipePlant;
                    }
                }
            }
        }
    }

    fn count_near(&self, kind: MobKind, radius: i32) -> usize {
        self.mobs
            .iter()
            .filter(|m| {
                m.kind == kind && m.health > 0 && m.pos.chebyshev(self.player.pos) <= radius
            })
            .count()
    }

    fn despawn(&mut self, kind: MobKind, beyond: i32, prob: f32) {
        for mi in 0..self.mobs.len() {
            let m = self.mobs[mi];
            if m.kind == kind && m.health > 0 && m.pos.chebyshev(self.player.pos) > beyond {
                if self.rng.gen::<f32>() < prob {
                    self.mobs[mi].health = 0;
                }
            }
        }
    }

    fn spawn_near(&mut self, kind: MobKind, min_d: i32, max_d: i32, tunnel: bool) {
        if self.mobs.len() >= MAX_MOBS {
            return;
        }
        for _ in 0..16 {
            let dx = self.rng.gen_range(-max_d..=max_d);
            let dy = self.rng.gen_range(-max_d..=max_d);
            let p = Pos::new(self.player.pos.x + dx, self.player.pos.y + dy);
            if p.chebyshev(self.player.pos) < min_d || !self.free_for_mob(p, kind) {
                continue;
            }
            if kind == MobKind::Zombie && self.block(p) != Block::Grass {
                continue;
            }
            if kind == MobKind::Cow && self.block(p) != Block::Grass {
                continue;
            }
            if tunnel && !self.is_tunnel(p) {
                continue;
            }
            self.spawn_mob(kind, p);
            return;
        }
    }

    fn balance_mobs(&mut self) {
        let night = self.daylight < 0.3;
        let zombie_target = if night { 3 } else { 1 };
        if self.count_near(MobKind::Zombie, 12) < zombie_target && self.rng.gen::<f32>() < 0.5 {
            self.spawn_near(MobKind::Zombie, 6, 10, false);
        }
        self.despawn(MobKind::Zombie, if night { 16 } else { 10 }, 0.4);

        if self.count_near(MobKind::Cow, 16) < 3 && self.rng.gen::<f32>() < 0.3 {
            self.spawn_near(MobKind::Cow, 5, 12, false);
        }
        self.despawn(MobKind::Cow, 24, 0.2);

        if self.count_near(MobKind::Skeleton, 14) < 2 && self.rng.gen::<f32>() < 0.3 {
            self.spawn_near(MobKind::Skeleton, 4, 12, true);
        }
        self.despawn(MobKind::Skeleton, 20, 0.2);
    }
}
