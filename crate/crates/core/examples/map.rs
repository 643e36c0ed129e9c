//! Prints a generated map as ASCII: `cargo run --example map -- <seed>`.

use sgrl_core::world::{Block, Direction, MobKind, Pos, World, WorldConfig};

fn glyph(b: Block) -> char {
    match b {
        Block::Grass => '.',
        Block::Water => '~',
        Block::Stone => '#',
        Block::Tree => 'T',
        Block::Path => '_',
        Block::Coal => 'c',
        Block::Iron => 'i',
        Block::Diamond => 'D',
        Block::Table => 't',
        Block::Furnace => 'f',
        Block::Sand => ':',
        Block::Lava => 'L',
        Block::Plant | Block::RipePlant => 'p',
        _ => '?',
    }
}

fn main() {
    if std::env::args().nth(1).as_deref() == Some("stats") {
        stats(100);
        return;
    }
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let world = World::reset(seed, &WorldConfig::default()).expect("default config is valid");
    let n = world.size();
    let mut reach = vec![false; (n * n) as usize];
    let mut stack = vec![world.player().pos];
    while let Some(p) = stack.pop() {
        if !world.in_bounds(p) {
            continue;
        }
        let i = (p.y * n + p.x) as usize;
        if reach[i] || !world.block(p).walkable() {
            continue;
        }
        reach[i] = true;
        for d in Direction::ALL {
            stack.push(p.step(d));
        }
    }
    for y in 0..n {
        let row: String = (0..n)
            .map(|x| {
                let p = Pos::new(x, y);
                if p == world.player().pos {
                    return '@';
                }
                match world.mob_at(p).map(|m| m.kind) {
                    Some(MobKind::Zombie) => 'Z',
                    Some(MobKind::Cow) => 'C',
                    Some(MobKind::Skeleton) => 'S',
                    Some(MobKind::Arrow) => '>',
                    None if world.is_tunnel(p) => '=',
                    None if world.block(p).walkable() && !reach[(y * n + x) as usize] => ',',
                    None => glyph(world.block(p)),
                }
            })
            .collect();
        println!("{row}");
    }
    println!("{}", world.render_text());
}

fn stats(seeds: u64) {
    let mut counts = [0usize; 17];
    let mut mobs = [0usize; 4];
    for seed in 0..seeds {
        let w = World::reset(seed, &WorldConfig::default()).expect("valid");
        let n = w.size();
        for y in 0..n {
            for x in 0..n {
                counts[w.block(Pos::new(x, y)) as usize] += 1;
            }
        }
        for m in w.mobs() {
            mobs[m.kind as usize] += 1;
        }
    }
    for b in Block::ALL {
        let c = counts[b as usize] as f64 / seeds as f64;
        if c > 0.0 {
            println!("{:>14}: {:8.1}", b.name(), c);
        }
    }
    for k in MobKind::ALL {
        println!(
            "{:>14}: {:8.1}",
            k.name(),
            mobs[k as usize] as f64 / seeds as f64
        );
    }
}
