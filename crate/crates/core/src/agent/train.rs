use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::encoder::{GoalEncoder, GOAL_DIM};
use super::policy::{greedy_action, mask_logits, sample_action, ActorCritic};
use super::ppo::{Learner, LossReport, PpoConfig, RolloutBuffer};
use super::AgentError;
use crate::achievements::{AchievementSet, EpisodeRecord};
use crate::planner::{
    determine_goal, stage_for_step, AgentProgress, PlannerView, PriorityTable, WeightedGoalSet,
    NUM_GOALS,
};
use crate::provider::PriorityProvider;
use crate::pruner::{
    default_masks, relax_mask, union_masks, ActionMask, AnnealSchedule, ScheduleKind,
};
use crate::world::gen::splitmix64;
use crate::world::{observation_len, Action, BatchEnv, World, WorldConfig, NUM_ACTIONS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalMode {
    /// No planner; the goal input is all zeros.
    Off,
    /// Priority-weighted sum of the goal embeddings.
    Weighted,
    /// Same goals, equal weights.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskMode {
    Off,
    /// Relaxed with the annealing schedule.
    Annealed,
    /// Never relaxed (xi = 0).
    Static,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Guidance {
    pub goals: GoalMode,
    pub masking: MaskMode,
    pub schedule: ScheduleKind,
    /// Exponential time constant; defaults to a fifth of the total steps.
    pub tau: Option<f64>,
    /// Staged priority table with updates, or one uniform table.
    pub staged_priorities: bool,
}

impl Guidance {
    pub fn full() -> Guidance {
        Guidance {
            goals: GoalMode::Weighted,
            masking: MaskMode::Annealed,
            schedule: ScheduleKind::ThreeStageCos,
            tau: None,
            staged_priorities: true,
        }
    }

    pub fn none() -> Guidance {
        Guidance {
            goals: GoalMode::Off,
            masking: MaskMode::Off,
            ..Guidance::full()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub seed: u64,
    pub total_steps: u64,
    pub world: WorldConfig,
    pub ppo: PpoConfig,
    pub guidance: Guidance,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        self.ppo.validate()?;
        self.world.validate()?;
        if self.total_steps == 0 {
            return Err(AgentError::Config {
                field: "total_steps",
                reason: "must be positive".into(),
            });
        }
        if self.guidance.goals == GoalMode::Off && self.guidance.masking != MaskMode::Off {
            return Err(AgentError::Config {
                field: "guidance",
                reason: "masking needs goals".into(),
            });
        }
        Ok(())
    }

    pub fn input_len(&self) -> usize {
        observation_len(&self.world) + GOAL_DIM
    }
}

/// Seed of environment instance `i` for run seed `seed`.
pub fn env_seed(seed: u64, i: usize) -> u64 {
    splitmix64(seed ^ splitmix64(0x5eed_0000 + i as u64))
}

/// Per-instance generator for relaxation draws and action sampling.
pub fn env_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ 0xac71_0a5e));
    r.set_stream(i as u64);
    r
}

/// Everything that decides an action, shared by training and evaluation.
#[derive(Debug, Clone)]
pub struct Guide {
    pub guidance: Guidance,
    pub encoder: GoalEncoder,
    pub encoder_seed: u64,
    pub table: PriorityTable,
    pub masks: [ActionMask; NUM_GOALS],
    pub mask_c: f64,
    pub empty_masks: u64,
}

/// How actions are chosen: with or without the goal mask, sampled or argmax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActMode {
    pub masked: bool,
    pub greedy: bool,
}

impl ActMode {
    pub const TRAIN: ActMode = ActMode {
        masked: true,
        greedy: false,
    };
    /// Default evaluation: unmasked argmax.
    pub const EVAL: ActMode = ActMode {
        masked: false,
        greedy: true,
    };
}

/// One decision: the network input has been written, the action chosen.
#[derive(Debug, Clone, Copy)]
pub struct Decision {
    pub action: Action,
    pub logp: f32,
    pub value: f32,
    pub mask: ActionMask,
    pub goals: Option<WeightedGoalSet>,
}

impl Guide {
    pub fn new(guidance: Guidance, encoder_seed: u64, mask_c: f64) -> Guide {
        let table = if guidance.staged_priorities {
            PriorityTable::builtin()
        } else {
            PriorityTable::uniform()
        };
        Guide {
            guidance,
            encoder: GoalEncoder::new(encoder_seed),
            encoder_seed,
            table,
            masks: default_masks(),
            mask_c,
            empty_masks: 0,
        }
    }

    pub fn goals(&self, world: &World) -> Option<WeightedGoalSet> {
        match self.guidance.goals {
            GoalMode::Off => None,
            GoalMode::Weighted => {
                Some(determine_goal(&PlannerView::from_world(world), &self.table))
            }
            GoalMode::Uniform => {
                Some(determine_goal(&PlannerView::from_world(world), &self.table).uniform())
            }
        }
    }

    /// Writes `obs ++ goal embedding` into `input`, builds the relaxed mask
    /// and picks an action. An unmasked mode ignores the mask entirely.
    #[allow(clippy::too_many_arguments)]
    pub fn decide(
        &mut self,
        ac: &ActorCritic<f32>,
        world: &World,
        obs: &[f32],
        input: &mut [f32],
        xi: f64,
        mode: ActMode,
        rng: &mut ChaCha8Rng,
        acts: &mut [f32],
        zm: &mut [f32; NUM_ACTIONS],
    ) -> Decision {
        let n = obs.len();
        input[..n].copy_from_slice(obs);
        let goals = self.goals(world);
        match &goals {
            Some(ws) => self.encoder.encode_into(ws, &mut input[n..]),
            None => input[n..].fill(0.0),
        }
        let mut mask = ActionMask::ALL;
        if mode.masked && self.guidance.masking != MaskMode::Off {
            if let Some(ws) = &goals {
                let m = union_masks(&ws.goals().map(|g| self.masks[g.index()])).unwrap();
                let xi = if self.guidance.masking == MaskMode::Static {
                    0.0
                } else {
                    xi
                };
                mask = relax_mask(m, xi, rng);
                if mask.is_empty() {
                    self.empty_masks += 1;
                    log::debug!("empty relaxed mask; acting unmasked");
                    mask = ActionMask::ALL;
                }
            }
        }
        let (logits, value) = ac.forward(input, acts);
        mask_logits(logits, mask.bits(), self.mask_c as f32, zm);
        let (a, logp) = if mode.greedy {
            greedy_action(zm)
        } else {
            sample_action(zm, rng)
        };
        Decision {
            action: Action::ALL[a],
            logp,
            value,
            mask,
            goals,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub global_step: u64,
    pub xi: f64,
    pub loss: LossReport,
    pub episodes_finished: usize,
    pub sps: f64,
    pub stage: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Running {
    ret: f64,
    len: u32,
    unlocked: AchievementSet,
}

/// On-policy training loop over a batch of worlds.
pub struct Trainer {
    pub cfg: TrainConfig,
    pub env: BatchEnv,
    pub ac: ActorCritic<f32>,
    pub learner: Learner,
    pub guide: Guide,
    pub schedule: AnnealSchedule,
    pub env_rngs: Vec<ChaCha8Rng>,
    pub update_rng: ChaCha8Rng,
    pub global_step: u64,
    pub boundaries: usize,
    pub progress: AgentProgress,
    pub episodes: Vec<EpisodeRecord>,
    buf: RolloutBuffer,
    running: Vec<Running>,
    acts: Vec<f32>,
    env_steps_time: f64,
}

impl Trainer {
    pub fn new(cfg: TrainConfig) -> Result<Trainer, AgentError> {
        cfg.validate()?;
        let n = cfg.ppo.num_envs;
        let seeds: Vec<u64> = (0..n).map(|i| env_seed(cfg.seed, i)).collect();
        let env = BatchEnv::new(&seeds, &cfg.world)?;
        let mut init_rng = ChaCha8Rng::seed_from_u64(splitmix64(cfg.seed ^ 0x1417));
        let ac = ActorCritic::new(cfg.input_len(), &cfg.ppo.hidden, NUM_ACTIONS, &mut init_rng);
        let schedule = match cfg.guidance.tau {
            Some(tau) => AnnealSchedule::with_tau(cfg.guidance.schedule, cfg.total_steps, tau),
            None => AnnealSchedule::new(cfg.guidance.schedule, cfg.total_steps),
        }
        .map_err(|e| AgentError::Config {
            field: "schedule",
            reason: e.to_string(),
        })?;
        let guide = Guide::new(
            cfg.guidance.clone(),
            splitmix64(cfg.seed ^ 0xe4c0),
            cfg.ppo.mask_c,
        );
        Ok(Trainer {
            learner: Learner::new(ac.net.num_params(), cfg.ppo.weight_decay),
            buf: RolloutBuffer::new(cfg.ppo.rollout_len, n, cfg.input_len()),
            acts: vec![0.0; ac.acts_len()],
            ac,
            env,
            guide,
            schedule,
            env_rngs: (0..n).map(|i| env_rng(cfg.seed, i)).collect(),
            update_rng: ChaCha8Rng::seed_from_u64(splitmix64(cfg.seed ^ 0x0bda7e)),
            global_step: 0,
            boundaries: 0,
            progress: AgentProgress::default(),
            episodes: Vec::new(),
            running: vec![Running::default(); n],
            env_steps_time: 0.0,
            cfg,
        })
    }

    /// The most recent rollout.
    pub fn rollout(&self) -> &RolloutBuffer {
        &self.buf
    }

    pub fn is_done(&self) -> bool {
        self.global_step >= self.cfg.total_steps
    }

    pub fn xi(&self) -> f64 {
        match self.cfg.guidance.masking {
            MaskMode::Off => 1.0,
            MaskMode::Static => 0.0,
            MaskMode::Annealed => self.schedule.xi(self.global_step),
        }
    }

    /// Crosses any stage boundary reached since the last call, asking the
    /// provider for new weights first and falling back to the offline rule.
    fn update_table(&mut self, mut provider: Option<&mut dyn PriorityProvider>) {
        if !self.cfg.guidance.staged_priorities || self.cfg.guidance.goals == GoalMode::Off {
            return;
        }
        let target = stage_for_step(self.global_step, self.cfg.total_steps);
        while self.boundaries < target {
            self.progress.step = self.global_step;
            let proposed = provider
                .as_deref_mut()
                .map(|p| p.update_priorities(self.guide.table.active(), &self.progress));
            match proposed {
                Some(Ok(w)) => {
                    if let Err(e) = self.guide.table.install(w) {
                        log::warn!("rejected provider priorities ({e}); using offline update");
                        self.guide.table.advance(&self.progress);
                    }
                }
                Some(Err(e)) => {
                    log::warn!("priority update failed ({e}); using offline update");
                    self.guide.table.advance(&self.progress);
                }
                None => self.guide.table.advance(&self.progress),
            }
            self.progress.reset_window();
            self.boundaries += 1;
        }
    }

    /// Collects one rollout and runs the PPO update on it.
    pub fn iterate(
        &mut self,
        provider: Option<&mut dyn PriorityProvider>,
    ) -> Result<IterationReport, AgentError> {
        self.update_table(provider);
        let start = Instant::now();
        let n = self.env.len();
        let xi = self.xi();
        let mut finished = 0;
        let mut actions = vec![Action::Noop; n];
        let mut zm = [0.0f32; NUM_ACTIONS];
        for t in 0..self.buf.steps {
            for (e, action) in actions.iter_mut().enumerate() {
                let i = t * n + e;
                let d = self.guide.decide(
                    &self.ac,
                    self.env.world(e),
                    self.env.observation(e),
                    self.buf.input_mut(i),
                    xi,
                    ActMode::TRAIN,
                    &mut self.env_rngs[e],
                    &mut self.acts,
                    &mut zm,
                );
                *action = d.action;
                self.buf.actions[i] = d.action.index() as u8;
                self.buf.logp[i] = d.logp;
                self.buf.values[i] = d.value;
                self.buf.masks[i] = d.mask.bits();
            }
            let trans = self.env.step(&actions)?;
            for (e, tr) in trans.iter().enumerate() {
                let i = t * n + e;
                self.buf.rewards[i] = tr.reward;
                self.buf.dones[i] = tr.done;
                let r = &mut self.running[e];
                r.ret += tr.reward as f64;
                r.len += 1;
                r.unlocked = r.unlocked.union(tr.newly_unlocked);
                if tr.done {
                    self.episodes.push(EpisodeRecord {
                        unlocked: r.unlocked,
                        episode_return: r.ret,
                        length: r.len,
                    });
                    self.progress.record_episode(r.unlocked);
                    *r = Running::default();
                    finished += 1;
                }
            }
            self.global_step += n as u64;
        }
        // Bootstrap from the state after the last step.
        let mut last = vec![0.0f32; n];
        let mut input = vec![0.0f32; self.cfg.input_len()];
        for (e, v) in last.iter_mut().enumerate() {
            let obs = self.env.observation(e);
            input[..obs.len()].copy_from_slice(obs);
            match self.guide.goals(self.env.world(e)) {
                Some(ws) => self.guide.encoder.encode_into(&ws, &mut input[obs.len()..]),
                None => input[obs.len()..].fill(0.0),
            }
            *v = self.ac.forward(&input, &mut self.acts).1;
        }
        self.buf
            .finish(&last, self.cfg.ppo.gamma, self.cfg.ppo.gae_lambda);
        self.env_steps_time += start.elapsed().as_secs_f64();
        let loss =
            self.learner
                .update(&mut self.ac, &self.buf, &self.cfg.ppo, &mut self.update_rng)?;
        let secs = start.elapsed().as_secs_f64().max(1e-9);
        Ok(IterationReport {
            global_step: self.global_step,
            xi,
            loss,
            episodes_finished: finished,
            sps: (self.buf.len() as f64) / secs,
            stage: self.guide.table.stage(),
        })
    }
}

/// Runs `episodes` evaluation episodes on fresh worlds, one at a time.
/// A masked mode applies the strict mask (xi = 0).
pub fn evaluate(
    ac: &ActorCritic<f32>,
    guide: &mut Guide,
    world: &WorldConfig,
    seed: u64,
    episodes: usize,
    mode: ActMode,
) -> Result<Vec<EpisodeRecord>, AgentError> {
    let mut out = Vec::with_capacity(episodes);
    let mut acts = vec![0.0; ac.acts_len()];
    let mut input = vec![0.0; ac.input_len()];
    let mut obs = vec![0.0; observation_len(world)];
    let mut zm = [0.0f32; NUM_ACTIONS];
    for k in 0..episodes {
        let mut w = World::reset(env_seed(seed ^ 0xe7a1, k), world)?;
        let mut rng = env_rng(seed ^ 0xe7a1, k);
        let mut rec = EpisodeRecord {
            unlocked: AchievementSet::EMPTY,
            episode_return: 0.0,
            length: 0,
        };
        while !w.is_done() {
            w.observe_into(&mut obs);
            let d = guide.decide(
                ac, &w, &obs, &mut input, 0.0, mode, &mut rng, &mut acts, &mut zm,
            );
            let t = w.advance(d.action)?;
            rec.episode_return += t.reward as f64;
            rec.length += 1;
            rec.unlocked = rec.unlocked.union(t.newly_unlocked);
        }
        out.push(rec);
    }
    Ok(out)
}
