//! Versioned little-endian binary encoding of a [`World`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::types::*;
use super::{World, WorldConfig};
use crate::achievements::AchievementSet;

const MAGIC: &[u8; 8] = b"SGRLWRLD";
const VERSION: u16 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum CodecError {
    #[error("not a world blob (bad magic)")]
    BadMagic,
    #[error("unsupported world blob version {0}")]
    Version(u16),
    #[error("world blob truncated")]
    Truncated,
    #[error("invalid value for {0}")]
    Invalid(&'static str),
    #[error("{0} trailing bytes after world blob")]
    Trailing(usize),
}

pub(crate) struct Writer {
    pub buf: Vec<u8>,
}

impl Writer {
    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    pub fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    pub fn i32(&mut self, v: i32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    pub fn u128(&mut self, v: u128) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    pub fn bytes(&mut self, v: &[u8]) {
        self.buf.extend_from_slice(v);
    }
}

pub(crate) struct Reader<'a> {
    pub data: &'a [u8],
    pub pos: usize,
}

impl<'a> Reader<'a> {
    pub fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        let end = self.pos.checked_add(n).ok_or(CodecError::Truncated)?;
        let s = self.data.get(self.pos..end).ok_or(CodecError::Truncated)?;
        self.pos = end;
        Ok(s)
    }
    pub fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }
    pub fn u16(&mut self) -> Result<u16, CodecError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    pub fn u32(&mut self) -> Result<u32, CodecError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    pub fn i32(&mut self) -> Result<i32, CodecError> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    pub fn u64(&mut self) -> Result<u64, CodecError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    pub fn u128(&mut self) -> Result<u128, CodecError> {
        Ok(u128::from_le_bytes(self.take(16)?.try_into().unwrap()))
    }
    pub fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }
}

pub(crate) fn write_rng(w: &mut Writer, rng: &ChaCha8Rng) {
    w.bytes(&rng.get_seed());
    w.u64(rng.get_stream());
    w.u128(rng.get_word_pos());
}

pub(crate) fn read_rng(r: &mut Reader<'_>) -> Result<ChaCha8Rng, CodecError> {
    let seed: [u8; 32] = r.take(32)?.try_into().unwrap();
    let stream = r.u64()?;
    let word_pos = r.u128()?;
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(stream);
    rng.set_word_pos(word_pos);
    Ok(rng)
}

fn check(ok: bool, field: &'static str) -> Result<(), CodecError> {
    if ok {
        Ok(())
    } else {
        Err(CodecError::Invalid(field))
    }
}

impl World {
    pub fn to_bytes(&self) -> Vec<u8> {
        let c = &self.config;
        let mut w = Writer {
            buf: Vec::with_capacity(64 + 2 * self.grid.len()),
        };
        w.bytes(MAGIC);
        w.u16(VERSION);
        for v in [
            c.grid_size as u32,
            c.view_w as u32,
            c.view_h as u32,
            c.max_episode_steps,
            c.day_length,
            c.food_decay,
            c.drink_decay,
            c.energy_decay,
            c.starve_interval,
            c.regen_interval,
            c.plant_ripen,
        ] {
            w.u32(v);
        }
        w.u64(self.seed);
        w.u32(self.step_count);
        w.u8(self.done as u8);
        w.u32(self.daylight.to_bits());
        w.u32(self.unlocked.bits());
        let p = &self.player;
        w.i32(p.pos.x);
        w.i32(p.pos.y);
        w.u8(p.facing as u8);
        w.bytes(&[p.health, p.food, p.drink, p.energy, p.sleeping as u8]);
        w.u16(p.hunger);
        w.u16(p.thirst);
        w.u16(p.fatigue as u16);
        w.u16(p.recover as u16);
        w.bytes(&self.inventory.0);
        w.buf.extend(self.grid.iter().map(|b| *b as u8));
        w.buf.extend(self.tunnels.iter().map(|t| *t as u8));
        w.u32(self.plants.len() as u32);
        for pl in &self.plants {
            w.i32(pl.pos.x);
            w.i32(pl.pos.y);
            w.u16(pl.age);
        }
        w.u32(self.mobs.len() as u32);
        for m in &self.mobs {
            w.u8(m.kind as u8);
            w.i32(m.pos.x);
            w.i32(m.pos.y);
            w.u8(m.health as u8);
            w.u8(m.cooldown);
            w.u8(m.facing as u8);
        }
        write_rng(&mut w, &self.rng);
        w.buf
    }

    pub fn from_bytes(data: &[u8]) -> Result<World, CodecError> {
        let mut r = Reader { data, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(CodecError::BadMagic);
        }
        let version = r.u16()?;
        if version != VERSION {
            return Err(CodecError::Version(version));
        }
        let mut f = [0u32; 11];
        for v in f.iter_mut() {
            *v = r.u32()?;
        }
        let config = WorldConfig {
            grid_size: f[0] as usize,
            view_w: f[1] as usize,
            view_h: f[2] as usize,
            max_episode_steps: f[3],
            day_length: f[4],
            food_decay: f[5],
            drink_decay: f[6],
            energy_decay: f[7],
            starve_interval: f[8],
            regen_interval: f[9],
            plant_ripen: f[10],
        };
        config
            .validate()
            .map_err(|_| CodecError::Invalid("config"))?;
        let seed = r.u64()?;
        let step_count = r.u32()?;
        let done = r.u8()?;
        check(done <= 1, "done")?;
        let daylight = f32::from_bits(r.u32()?);
        check((0.0..=1.0).contains(&daylight), "daylight")?;
        let bits = r.u32()?;
        check(bits < (1 << 22), "unlocked")?;
        let pos = Pos::new(r.i32()?, r.i32()?);
        let facing = Direction::from_id(r.u8()?).ok_or(CodecError::Invalid("facing"))?;
        let m = r.take(5)?;
        check(m[..4].iter().all(|v| *v <= 9) && m[4] <= 1, "player meters")?;
        let player = Player {
            pos,
            facing,
            health: m[0],
            food: m[1],
            drink: m[2],
            energy: m[3],
            sleeping: m[4] == 1,
            hunger: r.u16()?,
            thirst: r.u16()?,
            fatigue: r.u16()? as i16,
            recover: r.u16()? as i16,
        };
        let inv: [u8; NUM_ITEMS] = r.take(NUM_ITEMS)?.try_into().unwrap();
        check(inv.iter().all(|v| *v <= MAX_ITEM), "inventory")?;
        let cells = config.grid_size * config.grid_size;
        let grid = r
            .take(cells)?
            .iter()
            .map(|b| Block::from_id(*b).ok_or(CodecError::Invalid("grid")))
            .collect::<Result<Vec<_>, _>>()?;
        let tunnels = r.take(cells)?.iter().map(|t| *t != 0).collect();
        let n_plants = r.u32()? as usize;
        check(n_plants <= cells, "plant count")?;
        let mut plants = Vec::with_capacity(n_plants);
        for _ in 0..n_plants {
            plants.push(PlantState {
                pos: Pos::new(r.i32()?, r.i32()?),
                age: r.u16()?,
            });
        }
        let n_mobs = r.u32()? as usize;
        check(n_mobs <= cells, "mob count")?;
        let mut mobs = Vec::with_capacity(n_mobs);
        for _ in 0..n_mobs {
            let kind = MobKind::from_id(r.u8()?).ok_or(CodecError::Invalid("mob kind"))?;
            let pos = Pos::new(r.i32()?, r.i32()?);
            let health = r.u8()? as i8;
            let cooldown = r.u8()?;
            let facing = Direction::from_id(r.u8()?).ok_or(CodecError::Invalid("mob facing"))?;
            mobs.push(Mob {
                kind,
                pos,
                health,
                cooldown,
                facing,
            });
        }
        let rng = read_rng(&mut r)?;
        if r.remaining() != 0 {
            return Err(CodecError::Trailing(r.remaining()));
        }
        Ok(World {
            config,
            seed,
            grid,
            tunnels,
            plants,
            mobs,
            player,
            inventory: Inventory(inv),
            daylight,
            step_count,
            unlocked: AchievementSet::from_bits(bits),
            done: done == 1,
            rng,
        })
    }
}
