use super::gen::splitmix64;
use super::types::Action;
use super::{observation_len, StepResult, Transition, World, WorldConfig, WorldError};

/// Seed for the `episode`-th episode of an instance whose first episode
/// used `base`. Episode 0 is `base` itself.
pub fn derived_seed(base: u64, episode: u64) -> u64 {
    if episode == 0 {
        base
    } else {
        splitmix64(base ^ splitmix64(episode))
    }
}

/// Independent worlds stepped in lockstep, with auto-reset and a flat
/// observation buffer (`len() * obs_len` floats, row per instance).
#[derive(Debug, Clone)]
pub struct BatchEnv {
    config: WorldConfig,
    worlds: Vec<World>,
    base_seeds: Vec<u64>,
    episodes: Vec<u64>,
    obs_len: usize,
    obs: Vec<f32>,
    transitions: Vec<Transition>,
}

impl BatchEnv {
    pub fn new(seeds: &[u64], config: &WorldConfig) -> Result<BatchEnv, WorldError> {
        config.validate()?;
        let obs_len = observation_len(config);
        let worlds = seeds
            .iter()
            .map(|s| World::reset(*s, config))
            .collect::<Result<Vec<_>, _>>()?;
        let mut obs = vec![0.0; obs_len * seeds.len()];
        for (w, row) in worlds.iter().zip(obs.chunks_exact_mut(obs_len)) {
            w.observe_into(row);
        }
        Ok(BatchEnv {
            config: config.clone(),
            worlds,
            base_seeds: seeds.to_vec(),
            episodes: vec![0; seeds.len()],
            obs_len,
            obs,
            transitions: Vec::with_capacity(seeds.len()),
        })
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn obs_len(&self) -> usize {
        self.obs_len
    }

    /// Current observations, one row of `obs_len` per instance.
    pub fn observations(&self) -> &[f32] {
        &self.obs
    }

    pub fn observation(&self, i: usize) -> &[f32] {
        &self.obs[i * self.obs_len..(i + 1) * self.obs_len]
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub fn world(&self, i: usize) -> &World {
        &self.worlds[i]
    }

    /// Number of episodes completed so far by instance `i`.
    pub fn episode(&self, i: usize) -> u64 {
        self.episodes[i]
    }

    fn check_len(&self, actions: &[Action]) -> Result<(), WorldError> {
        if actions.len() != self.worlds.len() {
            return Err(WorldError::BatchLength {
                expected: self.worlds.len(),
                got: actions.len(),
            });
        }
        Ok(())
    }

    fn reset_instance(&mut self, i: usize) -> Result<(), WorldError> {
        self.episodes[i] += 1;
        let seed = derived_seed(self.base_seeds[i], self.episodes[i]);
        self.worlds[i] = World::reset(seed, &self.config)?;
        Ok(())
    }

    /// Steps every instance. Finished instances are reset immediately, so
    /// their row in [`BatchEnv::observations`] holds the new episode's
    /// first observation.
    pub fn step(&mut self, actions: &[Action]) -> Result<&[Transition], WorldError> {
        self.check_len(actions)?;
        self.transitions.clear();
        for i in 0..self.worlds.len() {
            let t = self.worlds[i].advance(actions[i])?;
            if t.done {
                self.reset_instance(i)?;
            }
            let row = &mut self.obs[i * self.obs_len..(i + 1) * self.obs_len];
            self.worlds[i].observe_into(row);
            self.transitions.push(t);
        }
        Ok(&self.transitions)
    }

    /// Like [`BatchEnv::step`] but returns full results; a finished
    /// instance reports its terminal observation.
    pub fn step_full(&mut self, actions: &[Action]) -> Result<Vec<StepResult>, WorldError> {
        self.check_len(actions)?;
        let mut out = Vec::with_capacity(self.worlds.len());
        for i in 0..self.worlds.len() {
            let r = self.worlds[i].step(actions[i])?;
            if r.done {
                self.reset_instance(i)?;
            }
            let row = &mut self.obs[i * self.obs_len..(i + 1) * self.obs_len];
            self.worlds[i].observe_into(row);
            out.push(r);
        }
        Ok(out)
    }
}
