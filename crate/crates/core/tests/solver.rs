use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgrl_core::achievements::NUM_ACHIEVEMENTS;
use sgrl_core::solver::ScriptedSolver;
use sgrl_core::world::{World, WorldConfig};

/// Runs the scripted solver until every achievement is unlocked or the
/// episode ends, returning the number unlocked.
pub fn solve(seed: u64) -> usize {
    let mut world = World::reset(seed, &WorldConfig::default()).unwrap();
    let mut solver = ScriptedSolver::new(seed);
    while !world.is_done() && world.unlocked().len() < NUM_ACHIEVEMENTS {
        let a = solver.act(&world);
        world.advance(a).unwrap();
    }
    world.unlocked().len()
}

#[test]
fn solver_unlocks_everything_on_random_seeds() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..10 {
        let seed: u64 = rng.gen();
        assert_eq!(solve(seed), NUM_ACHIEVEMENTS, "seed {seed}");
    }
}
