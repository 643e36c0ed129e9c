//! Runs the scripted solver: `cargo run --example solve -- <first_seed> <count>`.

use sgrl_core::achievements::AchievementId;
use sgrl_core::solver::ScriptedSolver;
use sgrl_core::world::{Block, World, WorldConfig};

fn main() {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<u64>().unwrap_or(0));
    let first = args.next().unwrap_or(0);
    let count = args.next().unwrap_or(10).max(1);
    let config = WorldConfig::default();
    let mut complete = 0;
    for seed in first..first + count {
        let mut world = World::reset(seed, &config).expect("valid config");
        let mut solver = ScriptedSolver::new(seed);
        let mut last_unlock = 0;
        while !world.is_done() && world.unlocked().len() < 22 {
            let a = solver.act(&world);
            let before = world.player().health;
            let t = world.advance(a).expect("episode running");
            if std::env::var("TRACE").is_ok()
                && (world.player().health < before
                    || world.is_done()
                    || (std::env::var("TRACE").unwrap() == "all" && world.step_count() % 7 == 0))
            {
                let p = world.player();
                let mobs: Vec<_> = world
                    .mobs()
                    .iter()
                    .filter(|m| m.pos.chebyshev(p.pos) <= 3)
                    .map(|m| (m.kind, m.pos.x - p.pos.x, m.pos.y - p.pos.y))
                    .collect();
                println!(
                    "  t={} {a} pos=({},{}) hp {before}->{} food {} drink {} energy {} sleeping {} block {:?} mobs {mobs:?}",
                    world.step_count(), p.pos.x, p.pos.y, p.health, p.food, p.drink, p.energy, p.sleeping,
                    world.block(p.pos)
                );
            }
            if std::env::var("VIEW").ok().and_then(|v| v.parse().ok()) == Some(world.step_count()) {
                let c = world.player().pos;
                for y in c.y - 14..=c.y + 14 {
                    let row: String = (c.x - 16..=c.x + 16)
                        .map(|x| {
                            let p = sgrl_core::world::Pos::new(x, y);
                            if p == c {
                                '@'
                            } else if let Some(m) = world.mob_at(p) {
                                format!("{:?}", m.kind).chars().next().unwrap()
                            } else {
                                match world.block(p) {
                                    Block::Grass => '.',
                                    Block::Water => '~',
                                    Block::Stone => '#',
                                    Block::Sand => ':',
                                    Block::Path => '_',
                                    Block::Tree => 'T',
                                    Block::Coal => 'c',
                                    Block::Iron => 'i',
                                    Block::Lava => 'L',
                                    Block::Table => 't',
                                    Block::Plant | Block::RipePlant => 'p',
                                    b => format!("{b:?}").chars().next().unwrap(),
                                }
                            }
                        })
                        .collect();
                    println!("    {row}");
                }
                println!("    inv {:?}", world.inventory());
            }
            if !t.newly_unlocked.is_empty() {
                last_unlock = world.step_count();
            }
        }
        let missing: Vec<_> = AchievementId::ALL
            .iter()
            .filter(|a| !world.unlocked().contains(**a))
            .map(|a| a.name())
            .collect();
        if missing.is_empty() {
            complete += 1;
        }
        println!(
            "seed {seed}: {} unlocked, steps {}, last unlock {last_unlock}, health {}, missing {missing:?}",
            world.unlocked().len(),
            world.step_count(),
            world.player().health
        );
    }
    println!("{complete}/{count} complete");
}
