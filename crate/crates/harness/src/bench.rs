use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgrl_core::world::{derived_seed, Action, BatchEnv, WorldConfig, NUM_ACTIONS};

use crate::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub envs: usize,
    pub steps: u64,
    pub seconds: f64,
    pub sps: f64,
}

pub const BENCH_CSV_HEADER: &str = "envs,env_steps,seconds,sps";

impl BenchReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.6},{:.1}",
            self.envs, self.steps, self.seconds, self.sps
        )
    }
}

/// Steps `envs` worlds with uniform random actions until at least `steps`
/// env-steps have run; action sampling is included in the timing.
pub fn run_bench(
    world: &WorldConfig,
    envs: usize,
    steps: u64,
    seed: u64,
) -> Result<BenchReport, HarnessError> {
    if envs == 0 || steps == 0 {
        return Err(HarnessError::Config(
            "bench needs envs > 0 and steps > 0".into(),
        ));
    }
    let seeds: Vec<u64> = (0..envs as u64).map(|i| derived_seed(seed, i)).collect();
    let mut env = BatchEnv::new(&seeds, world).map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut actions = vec![Action::Noop; envs];
    let mut done = 0u64;
    let start = Instant::now();
    while done < steps {
        for a in actions.iter_mut() {
            *a = Action::ALL[rng.gen_range(0..NUM_ACTIONS)];
        }
        env.step(&actions).map_err(|e| HarnessError::Contract {
            module: "world",
            step: done,
            msg: e.to_string(),
        })?;
        done += envs as u64;
    }
    let seconds = start.elapsed().as_secs_f64().max(1e-9);
    Ok(BenchReport {
        envs,
        steps: done,
        seconds,
        sps: done as f64 / seconds,
    })
}
