//! Binary training checkpoint: little-endian, magic `SGRLCKPT`, version 1.

use rand_chacha::ChaCha8Rng;

use super::policy::ActorCritic;
use super::train::{TrainConfig, Trainer};
use super::AgentError;
use crate::planner::{Weights, NUM_GOALS};
use crate::world::codec::{read_rng, write_rng, Reader, Writer};
use crate::world::CodecError;

const MAGIC: &[u8; 8] = b"SGRLCKPT";
const VERSION: u16 = 1;

/// Model, optimizer and sampling state. Worlds are not stored; a resumed
/// run starts fresh episodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub sizes: Vec<usize>,
    pub n_actions: usize,
    pub params: Vec<f32>,
    pub adam_m: Vec<f32>,
    pub adam_v: Vec<f32>,
    pub adam_t: u64,
    pub global_step: u64,
    pub boundaries: u32,
    pub stage: u32,
    pub active: Weights,
    pub encoder_seed: u64,
    pub update_rng: ChaCha8Rng,
    pub env_rngs: Vec<ChaCha8Rng>,
}

fn write_f32s(w: &mut Writer, v: &[f32]) {
    w.u64(v.len() as u64);
    for x in v {
        w.u32(x.to_bits());
    }
}

fn read_f32s(r: &mut Reader<'_>) -> Result<Vec<f32>, CodecError> {
    let n = r.u64()? as usize;
    if n > r.remaining() / 4 {
        return Err(CodecError::Truncated);
    }
    (0..n).map(|_| r.u32().map(f32::from_bits)).collect()
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer { buf: Vec::new() };
        w.bytes(MAGIC);
        w.u16(VERSION);
        w.u32(self.sizes.len() as u32);
        for s in &self.sizes {
            w.u32(*s as u32);
        }
        w.u32(self.n_actions as u32);
        write_f32s(&mut w, &self.params);
        write_f32s(&mut w, &self.adam_m);
        write_f32s(&mut w, &self.adam_v);
        w.u64(self.adam_t);
        w.u64(self.global_step);
        w.u32(self.boundaries);
        w.u32(self.stage);
        for x in self.active {
            w.u64(x.to_bits());
        }
        w.u64(self.encoder_seed);
        write_rng(&mut w, &self.update_rng);
        w.u32(self.env_rngs.len() as u32);
        for r in &self.env_rngs {
            write_rng(&mut w, r);
        }
        w.buf
    }

    pub fn from_bytes(data: &[u8]) -> Result<Checkpoint, CodecError> {
        let mut r = Reader { data, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(CodecError::BadMagic);
        }
        let version = r.u16()?;
        if version != VERSION {
            return Err(CodecError::Version(version));
        }
        let n = r.u32()? as usize;
        if n < 2 || n > 64 {
            return Err(CodecError::Invalid("layer count"));
        }
        let sizes = (0..n)
            .map(|_| r.u32().map(|s| s as usize))
            .collect::<Result<Vec<_>, _>>()?;
        let n_actions = r.u32()? as usize;
        let params = read_f32s(&mut r)?;
        let adam_m = read_f32s(&mut r)?;
        let adam_v = read_f32s(&mut r)?;
        let adam_t = r.u64()?;
        let global_step = r.u64()?;
        let boundaries = r.u32()?;
        let stage = r.u32()?;
        let mut active = [0.0; NUM_GOALS];
        for x in active.iter_mut() {
            *x = f64::from_bits(r.u64()?);
        }
        let encoder_seed = r.u64()?;
        let update_rng = read_rng(&mut r)?;
        let k = r.u32()? as usize;
        let env_rngs = (0..k)
            .map(|_| read_rng(&mut r))
            .collect::<Result<Vec<_>, _>>()?;
        if r.remaining() != 0 {
            return Err(CodecError::Trailing(r.remaining()));
        }
        let ck = Checkpoint {
            sizes,
            n_actions,
            params,
            adam_m,
            adam_v,
            adam_t,
            global_step,
            boundaries,
            stage,
            active,
            encoder_seed,
            update_rng,
            env_rngs,
        };
        if ck.model().is_none()
            || ck.adam_m.len() != ck.params.len()
            || ck.adam_v.len() != ck.params.len()
        {
            return Err(CodecError::Invalid("parameter count"));
        }
        Ok(ck)
    }

    /// The stored network, if sizes and parameters agree.
    pub fn model(&self) -> Option<ActorCritic<f32>> {
        ActorCritic::from_params(&self.sizes, self.n_actions, self.params.clone())
    }

    pub fn save(&self, path: &std::path::Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_bytes())
    }

    pub fn load(path: &std::path::Path) -> Result<Checkpoint, AgentError> {
        let data = std::fs::read(path)
            .map_err(|e| AgentError::Mismatch(format!("{}: {e}", path.display())))?;
        Ok(Checkpoint::from_bytes(&data)?)
    }
}

impl Trainer {
    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            sizes: self.ac.net.sizes().to_vec(),
            n_actions: self.ac.n_actions,
            params: self.ac.net.params.clone(),
            adam_m: self.learner.adam.m.clone(),
            adam_v: self.learner.adam.v.clone(),
            adam_t: self.learner.adam.t,
            global_step: self.global_step,
            boundaries: self.boundaries as u32,
            stage: self.guide.table.stage() as u32,
            active: *self.guide.table.active(),
            encoder_seed: self.guide.encoder_seed,
            update_rng: self.update_rng.clone(),
            env_rngs: self.env_rngs.clone(),
        }
    }

    /// Rebuilds a trainer from `cfg` and restores the checkpointed state.
    pub fn resume(cfg: TrainConfig, ck: &Checkpoint) -> Result<Trainer, AgentError> {
        let mut t = Trainer::new(cfg)?;
        let ac = ck
            .model()
            .ok_or_else(|| AgentError::Mismatch("parameter count".into()))?;
        if ac.net.sizes() != t.ac.net.sizes() || ac.n_actions != t.ac.n_actions {
            return Err(AgentError::Mismatch(format!(
                "network sizes {:?} vs {:?}",
                ac.net.sizes(),
                t.ac.net.sizes()
            )));
        }
        if ck.env_rngs.len() != t.env_rngs.len() {
            return Err(AgentError::Mismatch(format!(
                "{} environments vs {}",
                ck.env_rngs.len(),
                t.env_rngs.len()
            )));
        }
        if ck.encoder_seed != t.guide.encoder_seed {
            return Err(AgentError::Mismatch("goal encoder seed".into()));
        }
        t.ac = ac;
        t.learner.adam.m = ck.adam_m.clone();
        t.learner.adam.v = ck.adam_v.clone();
        t.learner.adam.t = ck.adam_t;
        t.global_step = ck.global_step;
        t.boundaries = ck.boundaries as usize;
        if let Err(e) = t.guide.table.restore(ck.stage as usize, ck.active) {
            return Err(AgentError::Mismatch(e.to_string()));
        }
        t.update_rng = ck.update_rng.clone();
        t.env_rngs = ck.env_rngs.clone();
        Ok(t)
    }
}
