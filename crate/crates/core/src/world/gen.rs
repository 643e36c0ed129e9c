//! Value-noise terrain generation plus a repair pass that guarantees every
//! achievement is reachable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::types::*;
use super::{daylight_at, World, WorldConfig};
use crate::achievements::AchievementSet;

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Noise {
    seed: u64,
}

impl Noise {
    fn lattice(&self, layer: u64, ix: i64, iy: i64) -> f64 {
        let h = splitmix64(
            self.seed
                ^ layer.wrapping_mul(0xA24B_AED4_963E_E407)
                ^ (ix as u64).wrapping_mul(0x9FB2_1C65_1E98_DF25)
                ^ (iy as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F),
        );
        (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    /// Smoothly interpolated lattice noise in [-1, 1].
    fn value(&self, layer: u64, x: f64, y: f64, scale: f64) -> f64 {
        let fx = x / scale;
        let fy = y / scale;
        let ix = fx.floor();
        let iy = fy.floor();
        let sx = smooth(fx - ix);
        let sy = smooth(fy - iy);
        let (ix, iy) = (ix as i64, iy as i64);
        let a = self.lattice(layer, ix, iy);
        let b = self.lattice(layer, ix + 1, iy);
        let c = self.lattice(layer, ix, iy + 1);
        let d = self.lattice(layer, ix + 1, iy + 1);
        let top = a + (b - a) * sx;
        let bot = c + (d - c) * sx;
        top + (bot - top) * sy
    }

    fn fbm(&self, layer: u64, x: f64, y: f64, octaves: &[(f64, f64)]) -> f64 {
        let mut acc = 0.0;
        let mut total = 0.0;
        for (k, &(scale, weight)) in octaves.iter().enumerate() {
            acc += weight * self.value(layer * 16 + k as u64, x, y, scale);
            total += weight;
        }
        acc / total
    }
}

fn smooth(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub(crate) fn generate(seed: u64, config: &WorldConfig) -> World {
    let n = config.grid_size;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Noise {
        seed: splitmix64(seed ^ 0x5EED_0F_7E44A1),
    };
    let center = Pos::new(n as i32 / 2, n as i32 / 2);
    let mut grid = vec![Block::Grass; n * n];
    let mut tunnels = vec![false; n * n];
    let mut mountain_map = vec![f64::MIN; n * n];

    for y in 0..n {
        for x in 0..n {
            let (fx, fy) = (x as f64, y as f64);
            let d = ((fx - center.x as f64).powi(2) + (fy - center.y as f64).powi(2)).sqrt();
            let start = sigmoid(4.0 - d + 2.0 * noise.value(8, fx, fy, 3.0));
            let water = noise.fbm(3, fx, fy, &[(15.0, 1.0), (5.0, 0.15)]) + 0.1 - 2.0 * start;
            let mountain = noise.fbm(0, fx, fy, &[(15.0, 1.0), (5.0, 0.3)]) - 4.0 * start;
            let u: f64 = rng.gen();
            let i = y * n + x;
            mountain_map[i] = mountain;
            grid[i] = if start > 0.5 {
                Block::Grass
            } else if mountain > 0.15 {
                if noise.value(6, fx, fy, 7.0) > 0.3 && mountain > 0.35 {
                    Block::Path
                } else if noise.value(7, 2.0 * fx, fy / 5.0, 3.0) > 0.45
                    || noise.value(9, fx / 5.0, 2.0 * fy, 3.0) > 0.45
                {
                    tunnels[i] = true;
                    Block::Path
                } else if noise.value(1, fx, fy, 8.0) > 0.0 && u > 0.85 {
                    Block::Coal
                } else if noise.value(2, fx, fy, 6.0) > 0.4 && u > 0.75 {
                    Block::Iron
                } else if mountain > 0.3 && noise.value(10, fx, fy, 5.0) > 0.45 {
                    Block::Lava
                } else {
                    Block::Stone
                }
            } else if water > 0.25 && water <= 0.35 && noise.value(4, fx, fy, 9.0) > -0.2 {
                Block::Sand
            } else if water > 0.3 {
                Block::Water
            } else if noise.value(5, fx, fy, 7.0) > 0.0 && u > 0.8 {
                Block::Tree
            } else {
                Block::Grass
            };
        }
    }

    let mut world = World {
        config: config.clone(),
        seed,
        grid,
        tunnels,
        plants: Vec::new(),
        mobs: Vec::new(),
        player: Player::spawn(center),
        inventory: Inventory::default(),
        daylight: daylight_at(0, config.day_length),
        step_count: 0,
        unlocked: AchievementSet::EMPTY,
        done: false,
        rng,
    };
    repair(&mut world, &mountain_map);
    populate(&mut world);
    world
}

fn count(world: &World, b: Block) -> usize {
    world.grid.iter().filter(|c| **c == b).count()
}

fn random_cell(world: &mut World, pred: impl Fn(&World, Pos) -> bool) -> Option<Pos> {
    let n = world.size();
    for _ in 0..4096 {
        let p = Pos::new(world.rng.gen_range(1..n - 1), world.rng.gen_range(1..n - 1));
        if pred(world, p) {
            return Some(p);
        }
    }
    None
}

fn away_from_start(world: &World, p: Pos, min: i32) -> bool {
    p.chebyshev(world.player.pos) >= min
}

/// Makes the generated map satisfy the resource guarantees the achievement
/// set depends on, whatever the noise produced.
fn repair(world: &mut World, mountain: &[f64]) {
    let n = world.size();
    // Clear lava next to the spawn and keep a small grass patch under it.
    let c = world.player.pos;
    for y in c.y - 2..=c.y + 2 {
        for x in c.x - 2..=c.x + 2 {
            let p = Pos::new(x, y);
            let i = world.idx(p);
            world.grid[i] = Block::Grass;
            world.tunnels[i] = false;
        }
    }

    // Stone mass: if the mountains are tiny, carve a quarry in a corner.
    if count(world, Block::Stone) < 60 {
        let ox = if world.rng.gen::<bool>() { 2 } else { n - 12 };
        let oy = if world.rng.gen::<bool>() { 2 } else { n - 12 };
        for y in oy..oy + 10 {
            for x in ox..ox + 10 {
                let p = Pos::new(x, y);
                let i = world.idx(p);
                if world.grid[i] != Block::Lava {
                    world.grid[i] = Block::Stone;
                }
            }
        }
    }

    while count(world, Block::Tree) < 12 {
        match random_cell(world, |w, p| {
            w.block(p) == Block::Grass && away_from_start(w, p, 2)
        }) {
            Some(p) => world.set_block(p, Block::Tree),
            None => break,
        }
    }
    // At least one tree within a few steps of the spawn.
    let near_tree = (c.y - 6..=c.y + 6)
        .flat_map(|y| (c.x - 6..=c.x + 6).map(move |x| Pos::new(x, y)))
        .any(|p| world.block(p) == Block::Tree);
    if !near_tree {
        let p = Pos::new(c.x + 3, c.y - 3);
        world.set_block(p, Block::Tree);
    }
    if count(world, Block::Water) < 4 {
        let p = random_cell(world, |w, p| {
            w.block(p) == Block::Grass && away_from_start(w, p, 5)
        })
        .unwrap_or(Pos::new(c.x - 4, c.y + 4));
        for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            world.set_block(Pos::new(p.x + dx, p.y + dy), Block::Water);
        }
    }
    while count(world, Block::Coal) < 4 {
        match random_cell(world, |w, p| w.block(p) == Block::Stone) {
            Some(p) => world.set_block(p, Block::Coal),
            None => break,
        }
    }
    while count(world, Block::Iron) < 3 {
        match random_cell(world, |w, p| w.block(p) == Block::Stone) {
            Some(p) => world.set_block(p, Block::Iron),
            None => break,
        }
    }

    // Exactly one diamond vein, at the deepest stone cell, with lava close by.
    for cell in world.grid.iter_mut() {
        if *cell == Block::Diamond {
            *cell = Block::Stone;
        }
    }
    let open = lava_free_region(world);
    let mut best: Option<(f64, Pos)> = None;
    for y in 2..n - 2 {
        for x in 2..n - 2 {
            let p = Pos::new(x, y);
            if world.block(p) == Block::Stone && p.chebyshev(c) > 6 && open[world.idx(p)] {
                // Deep but not too far from the spawn.
                let far = (p.chebyshev(c) - 16).max(0) as f64;
                let m = mountain[world.idx(p)] - 0.05 * far;
                if best.map_or(true, |(b, _)| m > b) {
                    best = Some((m, p));
                }
            }
        }
    }
    let vein = best.map(|(_, p)| p).unwrap_or(Pos::new(2, 2));
    world.set_block(vein, Block::Diamond);
    let second = Direction::ALL
        .iter()
        .map(|d| vein.step(*d))
        .find(|p| world.block(*p) == Block::Stone);
    if let Some(p) = second {
        world.set_block(p, Block::Diamond);
    }
    let lava_close = (vein.y - 3..=vein.y + 3)
        .flat_map(|y| (vein.x - 3..=vein.x + 3).map(move |x| Pos::new(x, y)))
        .any(|p| world.block(p) == Block::Lava);
    if !lava_close {
        let spot = [
            (2, 2),
            (-2, 2),
            (2, -2),
            (-2, -2),
            (3, 0),
            (-3, 0),
            (0, 3),
            (0, -3),
        ]
        .iter()
        .map(|&(dx, dy)| Pos::new(vein.x + dx, vein.y + dy))
        .find(|p| world.block(*p) == Block::Stone);
        if let Some(p) = spot {
            world.set_block(p, Block::Lava);
        }
    }

    connect_stone(world);

    // Tunnels: skeletons need somewhere to live.
    let tunnel_cells = world.tunnels.iter().filter(|t| **t).count();
    if tunnel_cells < 6 {
        if let Some(p) = random_cell(world, |w, p| {
            w.block(p) == Block::Stone && away_from_start(w, p, 6) && p.x + 8 < w.size()
        }) {
            for dx in 0..6 {
                let q = Pos::new(p.x + dx, p.y);
                if matches!(
                    world.block(q),
                    Block::Stone | Block::Path | Block::Grass | Block::Sand
                ) {
                    let i = world.idx(q);
                    world.grid[i] = Block::Path;
                    world.tunnels[i] = true;
                }
            }
        }
    }
    for i in 0..world.grid.len() {
        if world.tunnels[i] && world.grid[i] != Block::Path {
            world.tunnels[i] = false;
        }
    }
}

/// Cells reachable from the spawn by mining and bridging but never
/// stepping on lava.
fn lava_free_region(world: &World) -> Vec<bool> {
    let mut seen = vec![false; world.grid.len()];
    let mut stack = vec![world.player.pos];
    while let Some(p) = stack.pop() {
        if !world.in_bounds(p) {
            continue;
        }
        let i = world.idx(p);
        if seen[i] || world.grid[i] == Block::Lava {
            continue;
        }
        seen[i] = true;
        stack.extend(Direction::ALL.iter().map(|d| p.step(*d)));
    }
    seen
}

/// Walkable cells reachable from the spawn without crossing anything.
fn reachable(world: &World) -> Vec<bool> {
    let mut seen = vec![false; world.grid.len()];
    let mut stack = vec![world.player.pos];
    while let Some(p) = stack.pop() {
        if !world.in_bounds(p) {
            continue;
        }
        let i = world.idx(p);
        if seen[i] || !world.grid[i].walkable() {
            continue;
        }
        seen[i] = true;
        stack.extend(Direction::ALL.iter().map(|d| p.step(*d)));
    }
    seen
}

/// Bridges water with sand until stone borders the spawn's walkable region.
fn connect_stone(world: &mut World) {
    for _ in 0..8 {
        let seen = reachable(world);
        let touches = |w: &World, p: Pos| {
            Direction::ALL.iter().any(|d| {
                let q = p.step(*d);
                w.in_bounds(q) && seen[w.idx(q)]
            })
        };
        let n = world.size();
        let has_stone = (0..n)
            .flat_map(|y| (0..n).map(move |x| Pos::new(x, y)))
            .any(|p| world.block(p) == Block::Stone && touches(world, p));
        if has_stone {
            return;
        }
        // Breadth-first through water from the region's border.
        let mut prev: Vec<Option<usize>> = vec![None; world.grid.len()];
        let mut visited = seen.clone();
        let mut queue = std::collections::VecDeque::new();
        for (i, s) in seen.iter().enumerate() {
            if *s {
                queue.push_back(i);
            }
        }
        let mut goal = None;
        while let Some(i) = queue.pop_front() {
            let p = Pos::new((i % n as usize) as i32, (i / n as usize) as i32);
            for d in Direction::ALL {
                let q = p.step(d);
                if !world.in_bounds(q) {
                    continue;
                }
                let j = world.idx(q);
                if visited[j] {
                    continue;
                }
                let b = world.grid[j];
                if b == Block::Stone || b.walkable() {
                    prev[j] = Some(i);
                    goal = Some(j);
                    break;
                }
                if b == Block::Water {
                    visited[j] = true;
                    prev[j] = Some(i);
                    queue.push_back(j);
                }
            }
            if goal.is_some() {
                break;
            }
        }
        let Some(mut j) = goal else { return };
        while let Some(i) = prev[j] {
            if seen[i] {
                break;
            }
            world.grid[i] = Block::Sand;
            j = i;
        }
    }
}

fn populate(world: &mut World) {
    let n = world.size();
    let ripen = world.config.plant_ripen;
    for y in 0..n {
        for x in 0..n {
            let p = Pos::new(x, y);
            let b = world.block(p);
            let u: f32 = world.rng.gen();
            let dist = p.chebyshev(world.player.pos);
            if b == Block::Grass && dist >= 3 && u < 0.012 {
                world.spawn_mob(MobKind::Cow, p);
            } else if b == Block::Grass && dist >= 10 && u > 0.996 {
                world.spawn_mob(MobKind::Zombie, p);
            } else if b == Block::Grass && dist >= 2 && (0.5..0.506).contains(&u) {
                let age = world.rng.gen_range(0..ripen) as u16;
                let i = world.idx(p);
                world.grid[i] = if age + 1 >= ripen as u16 {
                    Block::RipePlant
                } else {
                    Block::Plant
                };
                world.plants.push(PlantState { pos: p, age });
            } else if world.is_tunnel(p) && dist >= 4 && u < 0.03 {
                world.spawn_mob(MobKind::Skeleton, p);
            }
        }
    }
    let mut guard = 0;
    while world.mobs.iter().filter(|m| m.kind == MobKind::Cow).count() < 3 && guard < 8 {
        guard += 1;
        if let Some(p) = random_cell(world, |w, p| {
            w.block(p) == Block::Grass && away_from_start(w, p, 3) && w.mob_at(p).is_none()
        }) {
            world.spawn_mob(MobKind::Cow, p);
        }
    }
    let mut guard = 0;
    while world
        .mobs
        .iter()
        .filter(|m| m.kind == MobKind::Skeleton)
        .count()
        < 2
        && guard < 8
    {
        guard += 1;
        if let Some(p) = random_cell(world, |w, p| {
            w.is_tunnel(p) && away_from_start(w, p, 4) && w.mob_at(p).is_none()
        }) {
            world.spawn_mob(MobKind::Skeleton, p);
        }
    }
    if !world.plants.is_empty() {
        return;
    }
    if let Some(p) = random_cell(world, |w, p| {
        w.block(p) == Block::Grass && away_from_start(w, p, 3)
    }) {
        let i = world.idx(p);
        world.grid[i] = Block::Plant;
        world.plants.push(PlantState { pos: p, age: 0 });
    }
}
