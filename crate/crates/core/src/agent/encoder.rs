use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::planner::{GoalId, WeightedGoalSet, NUM_GOALS};

pub const GOAL_DIM: usize = 32;

/// Frozen table of unit-norm goal embeddings drawn from a seed.
#[derive(Debug, Clone, PartialEq)]
pub struct GoalEncoder {
    rows: [[f32; GOAL_DIM]; NUM_GOALS],
}

impl GoalEncoder {
    pub fn new(seed: u64) -> GoalEncoder {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = [[0.0f32; GOAL_DIM]; NUM_GOALS];
        for row in rows.iter_mut() {
            let v: Vec<f64> = (0..GOAL_DIM).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            for (r, x) in row.iter_mut().zip(&v) {
                *r = (x / n) as f32;
            }
        }
        for i in 0..NUM_GOALS {
            for j in 0..i {
                assert_ne!(rows[i], rows[j], "goal embedding rows {i} and {j} coincide");
            }
        }
        GoalEncoder { rows }
    }

    pub fn row(&self, g: GoalId) -> &[f32; GOAL_DIM] {
        &self.rows[g.index()]
    }

    /// Priority-weighted sum of the goals' rows.
    pub fn encode_into(&self, goals: &WeightedGoalSet, out: &mut [f32]) {
        out[..GOAL_DIM].fill(0.0);
        for (g, w) in goals.items {
            let w = w as f32;
            for (o, r) in out.iter_mut().zip(self.row(g)) {
                *o += w * r;
            }
        }
    }

    pub fn encode(&self, goals: &WeightedGoalSet) -> [f32; GOAL_DIM] {
        let mut out = [0.0; GOAL_DIM];
        self.encode_into(goals, &mut out);
        out
    }
}
