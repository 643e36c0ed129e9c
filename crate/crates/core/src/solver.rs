//! Scripted full-information policy that walks the tech tree. Used as a
//! feasibility check for generated worlds and as an evaluation baseline.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::achievements::AchievementId as A;
use crate::world::{Action, Block, Direction, Item, MobKind, Pos, World};

const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Shelter {
    entrance: Pos,
    inner: Pos,
    dir: Direction,
}

/// Stateful scripted agent. Call [`ScriptedSolver::act`] once per step.
#[derive(Debug, Clone)]
pub struct ScriptedSolver {
    rng: ChaCha8Rng,
    shelter: Option<Shelter>,
    wood_target: u8,
    eating: bool,
    drinking: bool,
}

struct Costs {
    n: i32,
    dist: Vec<u32>,
    parent: Vec<u32>,
}

impl Costs {
    fn at(&self, p: Pos) -> u32 {
        if p.x < 0 || p.y < 0 || p.x >= self.n || p.y >= self.n {
            UNREACHABLE
        } else {
            self.dist[(p.y * self.n + p.x) as usize]
        }
    }
}

fn neighbors(p: Pos) -> impl Iterator<Item = (Direction, Pos)> {
    Direction::ALL.into_iter().map(move |d| (d, p.step(d)))
}

impl ScriptedSolver {
    pub fn new(seed: u64) -> ScriptedSolver {
        ScriptedSolver {
            rng: ChaCha8Rng::seed_from_u64(seed),
            shelter: None,
            wood_target: 9,
            eating: false,
            drinking: false,
        }
    }

    fn mineable(w: &World, b: Block) -> bool {
        let inv = w.inventory();
        match b {
            Block::Stone | Block::Coal => inv.has(Item::WoodPickaxe, 1),
            Block::Iron => inv.has(Item::StonePickaxe, 1),
            Block::Diamond => inv.has(Item::IronPickaxe, 1),
            _ => false,
        }
    }

    /// Cost of entering a cell, or `None` when it cannot be entered.
    fn enter_cost(w: &World, p: Pos) -> Option<u32> {
        if !w.in_bounds(p) {
            return None;
        }
        // Mobs can be fought through when they block a corridor.
        let blocker = if w.mob_at(p).is_some() { 10 } else { 0 };
        let b = w.block(p);
        let danger: u32 = w
            .mobs()
            .iter()
            .map(|m| match m.kind {
                MobKind::Skeleton if m.pos.manhattan(p) <= 4 => 6,
                MobKind::Zombie if m.pos.manhattan(p) <= 1 => 3,
                _ => 0,
            })
            .sum();
        let base = if b.walkable() {
            Some(1)
        } else if Self::mineable(w, b) {
            Some(3)
        } else if b == Block::Water
            && w.inventory().has(Item::Stone, 1)
            && w.inventory().has(Item::WoodPickaxe, 1)
        {
            Some(6)
        } else {
            None
        };
        base.map(|c| c + danger + blocker)
    }

    fn dijkstra(w: &World) -> Costs {
        let n = w.size();
        let mut dist = vec![UNREACHABLE; (n * n) as usize];
        let mut parent = vec![u32::MAX; (n * n) as usize];
        let start = w.player().pos;
        let si = (start.y * n + start.x) as usize;
        dist[si] = 0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0u32, si as u32)));
        while let Some(Reverse((d, i))) = heap.pop() {
            if d > dist[i as usize] {
                continue;
            }
            let p = Pos::new(i as i32 % n, i as i32 / n);
            for (_, q) in neighbors(p) {
                if let Some(c) = Self::enter_cost(w, q) {
                    let qi = (q.y * n + q.x) as usize;
                    if d + c < dist[qi] {
                        dist[qi] = d + c;
                        parent[qi] = i;
                        heap.push(Reverse((d + c, qi as u32)));
                    }
                }
            }
        }
        Costs { n, dist, parent }
    }

    /// Action that makes progress along the cheapest route into `goal`.
    fn step_toward(&self, w: &World, costs: &Costs, goal: Pos) -> Action {
        let n = costs.n;
        let start = w.player().pos;
        let mut cur = goal;
        loop {
            let pi = costs.parent[(cur.y * n + cur.x) as usize];
            if pi == u32::MAX {
                return Action::Noop;
            }
            let prev = Pos::new(pi as i32 % n, pi as i32 / n);
            if prev == start {
                break;
            }
            cur = prev;
        }
        let d = Direction::from_delta(cur.x - start.x, cur.y - start.y).unwrap_or(Direction::Down);
        self.enter(w, d)
    }

    /// Enter the neighbouring cell in direction `d`, clearing it first.
    fn enter(&self, w: &World, d: Direction) -> Action {
        let p = w.player();
        let cell = p.pos.step(d);
        let b = w.block(cell);
        if p.facing == d && w.mob_at(cell).is_some() {
            return Action::Do;
        }
        if b.walkable() || p.facing != d {
            return d.move_action();
        }
        if b == Block::Water {
            Action::PlaceStone
        } else {
            Action::Do
        }
    }

    /// Walk next to a cell satisfying `pred`, face it and press `do`.
    fn interact(&self, w: &World, costs: &Costs, pred: impl Fn(Pos) -> bool) -> Option<Action> {
        self.interact_with_cost(w, costs, pred).map(|(_, a)| a)
    }

    /// Like [`Self::interact`], also returning the route cost to the target.
    fn interact_with_cost(
        &self,
        w: &World,
        costs: &Costs,
        pred: impl Fn(Pos) -> bool,
    ) -> Option<(u32, Action)> {
        let me = w.player().pos;
        for (d, q) in neighbors(me) {
            if pred(q) {
                let a = if w.player().facing == d {
                    Action::Do
                } else {
                    d.move_action()
                };
                return Some((0, a));
            }
        }
        let n = w.size();
        let mut best: Option<(u32, Pos)> = None;
        for y in 0..n {
            for x in 0..n {
                let t = Pos::new(x, y);
                if !pred(t) {
                    continue;
                }
                for (_, s) in neighbors(t) {
                    let c = costs.at(s);
                    if c != UNREACHABLE && best.map_or(true, |(bc, _)| c < bc) {
                        best = Some((c, s));
                    }
                }
            }
        }
        best.map(|(c, s)| (c, self.step_toward(w, costs, s)))
    }

    /// Nearest food source, plant or cow, by route cost.
    fn food(&self, w: &World, costs: &Costs) -> Option<(u32, Action)> {
        let plant = self.interact_with_cost(w, costs, |p| {
            w.block(p) == Block::RipePlant && w.mob_at(p).is_none()
        });
        let cows: Vec<Pos> = w
            .mobs()
            .iter()
            .filter(|m| m.kind == MobKind::Cow && m.health > 0)
            .map(|m| m.pos)
            .collect();
        let cow = self.interact_with_cost(w, costs, |p| cows.contains(&p));
        match (plant, cow) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        }
    }

    fn interact_block(&self, w: &World, costs: &Costs, b: Block) -> Option<Action> {
        self.interact(w, costs, |p| w.block(p) == b && w.mob_at(p).is_none())
    }

    fn interact_mob(&self, w: &World, costs: &Costs, kind: MobKind) -> Option<Action> {
        let targets: Vec<Pos> = w
            .mobs()
            .iter()
            .filter(|m| m.kind == kind && m.health > 0)
            .map(|m| m.pos)
            .collect();
        if targets.is_empty() {
            return None;
        }
        self.interact(w, costs, |p| targets.contains(&p))
    }

    fn go_to(&self, w: &World, costs: &Costs, p: Pos) -> Option<Action> {
        if costs.at(p) == UNREACHABLE {
            None
        } else if w.player().pos == p {
            Some(Action::Noop)
        } else {
            Some(self.step_toward(w, costs, p))
        }
    }

    /// Place something on the cell ahead, repositioning if the cell ahead
    /// does not accept it.
    fn place(&mut self, w: &World, action: Action, onto: &[Block]) -> Action {
        let p = w.player();
        let ok = |q: Pos| {
            onto.contains(&w.block(q))
                && w.mob_at(q).is_none()
                && (!w.block(q).walkable() || !Self::cuts_off(w, q))
        };
        if ok(p.pos.step(p.facing)) {
            return action;
        }
        for d in Direction::ALL {
            let q = p.pos.step(d);
            if !w.block(q).walkable() && ok(q) {
                // Non-walkable but placeable (water, lava): turning is enough.
                if w.block(q) != Block::Lava {
                    return d.move_action();
                }
            }
        }
        for d in Direction::ALL {
            let q = p.pos.step(d);
            if w.block(q).walkable() && w.mob_at(q).is_none() && ok(q.step(d)) {
                return d.move_action();
            }
        }
        self.wander(w)
    }

    /// Whether blocking `q` would shrink the walkable area around the
    /// player, so placements never wall it in.
    fn cuts_off(w: &World, q: Pos) -> bool {
        const LIMIT: usize = 48;
        let flood = |blocked: Option<Pos>| {
            let mut seen = vec![w.player().pos];
            let mut i = 0;
            while i < seen.len() && seen.len() < LIMIT {
                let p = seen[i];
                i += 1;
                for (_, r) in neighbors(p) {
                    if Some(r) != blocked
                        && w.in_bounds(r)
                        && w.block(r).walkable()
                        && !seen.contains(&r)
                    {
                        seen.push(r);
                    }
                }
            }
            seen.len().min(LIMIT)
        };
        flood(Some(q)) + 1 < flood(None)
    }

    fn wander(&mut self, w: &World) -> Action {
        let p = w.player().pos;
        let options: Vec<Direction> = Direction::ALL
            .into_iter()
            .filter(|d| {
                let q = p.step(*d);
                w.block(q).walkable() && w.mob_at(q).is_none()
            })
            .collect();
        if options.is_empty() {
            return Action::Noop;
        }
        options[self.rng.gen_range(0..options.len())].move_action()
    }

    fn craft(&mut self, w: &World, costs: &Costs, action: Action, furnace: bool) -> Option<Action> {
        let has_table = w.nearby(Block::Table);
        let has_furnace = !furnace || w.nearby(Block::Furnace);
        if has_table && has_furnace {
            return Some(action);
        }
        let inv = w.inventory();
        if !has_table {
            if inv.has(Item::Wood, 3) {
                return Some(self.place(
                    w,
                    Action::PlaceTable,
                    &[Block::Grass, Block::Sand, Block::Path],
                ));
            }
            return self.interact_block(w, costs, Block::Table);
        }
        if inv.has(Item::Stone, 1) {
            return Some(self.place(
                w,
                Action::PlaceFurnace,
                &[Block::Grass, Block::Sand, Block::Path],
            ));
        }
        self.interact_block(w, costs, Block::Stone)
    }

    fn solid(w: &World, p: Pos) -> bool {
        let b = w.block(p);
        !b.walkable() && w.in_bounds(p)
    }

    fn shelter_ok(w: &World, s: &Shelter) -> bool {
        let x2 = s.inner.step(s.dir);
        let back = s.inner.step(opposite(s.dir));
        if back != s.entrance {
            return false;
        }
        let openable = |p: Pos| {
            let b = w.block(p);
            (b.walkable() || Self::mineable(w, b)) && w.in_bounds(p)
        };
        if !openable(s.inner) || !openable(x2) {
            return false;
        }
        let mobs_ok = [s.inner, x2]
            .iter()
            .all(|p| w.mob_at(*p).is_none() || *p == w.player().pos);
        if !mobs_ok {
            return false;
        }
        for (_, q) in neighbors(s.inner) {
            if q != x2 && q != s.entrance && !Self::solid(w, q) {
                return false;
            }
        }
        for (_, q) in neighbors(x2) {
            if q != s.inner && !Self::solid(w, q) {
                return false;
            }
        }
        let e = w.block(s.entrance);
        e.walkable() || e == Block::Stone
    }

    fn find_shelter(w: &World, costs: &Costs) -> Option<Shelter> {
        let n = w.size();
        let mut best: Option<(u32, Shelter)> = None;
        for y in 1..n - 1 {
            for x in 1..n - 1 {
                let inner = Pos::new(x, y);
                for dir in Direction::ALL {
                    let entrance = inner.step(opposite(dir));
                    let c = costs.at(entrance);
                    if c == UNREACHABLE || !w.block(entrance).walkable() {
                        continue;
                    }
                    let s = Shelter {
                        entrance,
                        inner,
                        dir,
                    };
                    if Self::shelter_ok(w, &s) && best.map_or(true, |(bc, _)| c < bc) {
                        best = Some((c, s));
                    }
                }
            }
        }
        best.map(|(_, s)| s)
    }

    fn sleep_routine(&mut self, w: &World, costs: &Costs) -> Option<Action> {
        let p = *w.player();
        if let Some(s) = self.shelter {
            let sealed = w.block(s.entrance) == Block::Stone && p.pos == s.inner;
            if !sealed && !Self::shelter_ok(w, &s) {
                self.shelter = None;
            }
        }
        if self.shelter.is_none() {
            self.shelter = Self::find_shelter(w, costs);
        }
        let Some(s) = self.shelter else {
            // No shelter in reach: sleep in the open if nothing hostile is near.
            let threat = w
                .mobs()
                .iter()
                .any(|m| m.kind == MobKind::Zombie && m.pos.chebyshev(p.pos) <= 6);
            return if threat { None } else { Some(Action::Sleep) };
        };
        let x2 = s.inner.step(s.dir);
        let back = opposite(s.dir);
        if p.pos == s.inner && p.facing == back {
            return Some(match w.block(s.entrance) {
                Block::Stone => Action::Sleep,
                _ if w.mob_at(s.entrance).is_some() => Action::Do,
                _ if w.inventory().has(Item::Stone, 1) => Action::PlaceStone,
                _ => return None,
            });
        }
        if p.pos == x2 {
            return Some(back.move_action());
        }
        if p.pos == s.inner || p.pos == s.entrance {
            let ahead = p.pos.step(s.dir);
            if p.facing == s.dir && Self::mineable(w, w.block(ahead)) {
                return Some(Action::Do);
            }
            return Some(s.dir.move_action());
        }
        self.go_to(w, costs, s.entrance)
    }

    fn need_sleep(&self, w: &World) -> bool {
        let p = w.player();
        let inv = w.inventory();
        let has_pick = inv.has(Item::WoodPickaxe, 1);
        if p.energy <= 1 {
            return true;
        }
        if self.eating || self.drinking || p.food < 6 || p.drink < 6 {
            return false;
        }
        p.energy <= 3
            || (p.energy < 9
                && !w.unlocked().contains(A::WakeUp)
                && has_pick
                && inv.has(Item::Stone, 1))
            || (w.daylight() < 0.3 && p.energy < 7 && has_pick)
    }

    /// Chooses the next action for `w`.
    pub fn act(&mut self, w: &World) -> Action {
        let p = *w.player();
        if p.sleeping {
            return Action::Noop;
        }
        for (d, q) in neighbors(p.pos) {
            if let Some(m) = w.mob_at(q) {
                if matches!(m.kind, MobKind::Zombie | MobKind::Skeleton) {
                    return if p.facing == d {
                        Action::Do
                    } else {
                        d.move_action()
                    };
                }
            }
        }
        if p.health <= 3 {
            if let Some(a) = self.retreat(w) {
                return a;
            }
        }
        let costs = Self::dijkstra(w);
        if p.drink <= 5 {
            self.drinking = true;
        }
        if self.drinking {
            if p.drink >= 9 {
                self.drinking = false;
            } else if let Some(a) = self.interact_block(w, &costs, Block::Water) {
                return a;
            }
        }
        if p.food <= 5 {
            self.eating = true;
        }
        if self.eating {
            if p.food >= 7 {
                self.eating = false;
            } else if let Some((_, a)) = self.food(w, &costs) {
                return a;
            }
        } else if p.food <= 7 {
            // Snack on anything close by.
            if let Some((c, a)) = self.food(w, &costs) {
                if c <= 4 {
                    return a;
                }
            }
        }
        if self.need_sleep(w) {
            if let Some(a) = self.sleep_routine(w, &costs) {
                return a;
            }
        } else {
            self.shelter = None;
        }
        self.progress(w, &costs).unwrap_or_else(|| self.wander(w))
    }

    /// Step away from nearby hostiles, if any.
    fn retreat(&self, w: &World) -> Option<Action> {
        let me = w.player().pos;
        let threats: Vec<Pos> = w
            .mobs()
            .iter()
            .filter(|m| {
                matches!(m.kind, MobKind::Zombie | MobKind::Skeleton) && m.pos.chebyshev(me) <= 5
            })
            .map(|m| m.pos)
            .collect();
        if threats.is_empty() {
            return None;
        }
        let score = |p: Pos| threats.iter().map(|t| t.manhattan(p)).min().unwrap_or(0);
        let here = score(me);
        neighbors(me)
            .filter(|(_, q)| w.block(*q).walkable() && w.mob_at(*q).is_none())
            .map(|(d, q)| (score(q), d))
            .filter(|(s, _)| *s > here)
            .max_by_key(|(s, d)| (*s, Reverse(*d as u8)))
            .map(|(_, d)| d.move_action())
    }

    fn progress(&mut self, w: &World, costs: &Costs) -> Option<Action> {
        let u = w.unlocked();
        let inv = *w.inventory();
        let has = |i: Item| inv.has(i, 1);
        let iron_done = has(Item::IronPickaxe) && has(Item::IronSword);

        if inv.get(Item::Wood) < 3 && !iron_done {
            self.wood_target = 9;
        }
        if inv.get(Item::Wood) < self.wood_target {
            if let Some(a) = self.interact_block(w, costs, Block::Tree) {
                return Some(a);
            }
        }
        self.wood_target = 0;
        if !u.contains(A::PlaceTable) {
            return Some(self.place(
                w,
                Action::PlaceTable,
                &[Block::Grass, Block::Sand, Block::Path],
            ));
        }
        if !has(Item::WoodPickaxe) {
            return self.craft(w, costs, Action::MakeWoodPickaxe, false);
        }
        if !has(Item::WoodSword) {
            return self.craft(w, costs, Action::MakeWoodSword, false);
        }
        if !u.contains(A::CollectDrink) {
            if let Some(a) = self.interact_block(w, costs, Block::Water) {
                return Some(a);
            }
        }
        if !u.contains(A::EatCow) {
            if let Some(a) = self.interact_mob(w, costs, MobKind::Cow) {
                return Some(a);
            }
        }
        if !u.contains(A::PlacePlant) {
            let grass = [Block::Grass];
            if has(Item::Sapling) {
                return Some(self.place(w, Action::PlacePlant, &grass));
            }
            let ahead = p_ahead(w);
            if w.block(ahead) == Block::Grass && w.mob_at(ahead).is_none() {
                return Some(Action::Do);
            }
            return Some(self.place(w, Action::Do, &grass));
        }
        if !u.contains(A::EatPlant) {
            if let Some(a) = self.interact_block(w, costs, Block::RipePlant) {
                return Some(a);
            }
        }
        if !u.contains(A::DefeatZombie) {
            let near = w
                .mobs()
                .iter()
                .any(|m| m.kind == MobKind::Zombie && m.pos.chebyshev(w.player().pos) <= 10);
            if near {
                if let Some(a) = self.interact_mob(w, costs, MobKind::Zombie) {
                    return Some(a);
                }
            }
        }
        if inv.get(Item::Stone) < 5 && !iron_done {
            return self.interact_block(w, costs, Block::Stone);
        }
        if !u.contains(A::PlaceStone) {
            return Some(self.place(
                w,
                Action::PlaceStone,
                &[Block::Water, Block::Grass, Block::Sand, Block::Path],
            ));
        }
        if !has(Item::StonePickaxe) {
            return self.craft(w, costs, Action::MakeStonePickaxe, false);
        }
        if !has(Item::StoneSword) {
            return self.craft(w, costs, Action::MakeStoneSword, false);
        }
        if !u.contains(A::PlaceFurnace) {
            return self.craft(w, costs, Action::PlaceFurnace, false).map(|a| {
                if a == Action::PlaceFurnace {
                    self.place(
                        w,
                        Action::PlaceFurnace,
                        &[Block::Grass, Block::Sand, Block::Path],
                    )
                } else {
                    a
                }
            });
        }
        let iron_needed = (!has(Item::IronPickaxe)) as u8 + (!has(Item::IronSword)) as u8;
        if inv.get(Item::Coal) < iron_needed {
            return self.interact_block(w, costs, Block::Coal);
        }
        if inv.get(Item::Iron) < iron_needed {
            return self.interact_block(w, costs, Block::Iron);
        }
        if !has(Item::IronPickaxe) {
            return self.craft(w, costs, Action::MakeIronPickaxe, true);
        }
        if !has(Item::IronSword) {
            return self.craft(w, costs, Action::MakeIronSword, true);
        }
        if !u.contains(A::CollectDiamond) {
            return self.interact_block(w, costs, Block::Diamond);
        }
        if !u.contains(A::DefeatSkeleton) {
            if let Some(a) = self.interact_mob(w, costs, MobKind::Skeleton) {
                return Some(a);
            }
            return self.nearest_tunnel(w, costs);
        }
        if !u.contains(A::DefeatZombie) {
            if let Some(a) = self.interact_mob(w, costs, MobKind::Zombie) {
                return Some(a);
            }
        }
        None
    }

    fn nearest_tunnel(&self, w: &World, costs: &Costs) -> Option<Action> {
        let n = w.size();
        let mut best: Option<(u32, Pos)> = None;
        for y in 0..n {
            for x in 0..n {
                let p = Pos::new(x, y);
                let c = costs.at(p);
                if w.is_tunnel(p) && c != UNREACHABLE && best.map_or(true, |(bc, _)| c < bc) {
                    best = Some((c, p));
                }
            }
        }
        let (_, p) = best?;
        if p == w.player().pos {
            return Some(Action::Noop);
        }
        self.go_to(w, costs, p)
    }
}

fn p_ahead(w: &World) -> Pos {
    w.player().pos.step(w.player().facing)
}

fn opposite(d: Direction) -> Direction {
    match d {
        Direction::Left => Direction::Right,
        Direction::Right => Direction::Left,
        Direction::Up => Direction::Down,
        Direction::Down => Direction::Up,
    }
}
