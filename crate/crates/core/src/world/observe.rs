use std::fmt::Write as _;

use super::types::*;
use super::{World, WorldConfig};

/// Symbolic vector plus the text rendering of the same state.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub symbolic: Vec<f32>,
    pub text: TextObservation,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TextObservation(pub String);

impl TextObservation {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for TextObservation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Length of the symbolic vector: view one-hot blocks, mob channels,
/// inventory, meters, daylight and facing.
pub fn observation_len(config: &WorldConfig) -> usize {
    let cells = config.view_w * config.view_h;
    cells * (NUM_BLOCKS + NUM_MOB_KINDS) + NUM_ITEMS + 4 + 1 + 4
}

/// `int(value / 0.09)` as the renderer prints meters.
pub fn percent(value: f64) -> i64 {
    (value / 0.09) as i64
}

/// Which block and mob kinds are in view, in first-seen scan order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ViewSummary {
    pub blocks: Vec<Block>,
    pub mobs: Vec<MobKind>,
}

impl ViewSummary {
    pub fn sees_block(&self, b: Block) -> bool {
        self.blocks.contains(&b)
    }

    pub fn sees_mob(&self, m: MobKind) -> bool {
        self.mobs.contains(&m)
    }
}

impl World {
    fn view_origin(&self) -> Pos {
        Pos::new(
            self.player.pos.x - (self.config.view_w / 2) as i32,
            self.player.pos.y - (self.config.view_h / 2) as i32,
        )
    }

    pub fn observation_len(&self) -> usize {
        observation_len(&self.config)
    }

    pub fn observe(&self) -> Observation {
        let mut symbolic = vec![0.0; self.observation_len()];
        self.observe_into(&mut symbolic);
        Observation {
            symbolic,
            text: self.render_text(),
        }
    }

    /// Writes the symbolic observation into `out`, which must have length
    /// [`World::observation_len`].
    pub fn observe_into(&self, out: &mut [f32]) {
        let (vw, vh) = (self.config.view_w, self.config.view_h);
        let cells = vw * vh;
        assert_eq!(
            out.len(),
            self.observation_len(),
            "observation buffer length"
        );
        out.fill(0.0);
        let o = self.view_origin();
        for vy in 0..vh {
            for vx in 0..vw {
                let cell = vy * vw + vx;
                let b = self.block(Pos::new(o.x + vx as i32, o.y + vy as i32));
                out[cell * NUM_BLOCKS + b as usize] = 1.0;
            }
        }
        let mob_base = cells * NUM_BLOCKS;
        for m in &self.mobs {
            if m.health <= 0 {
                continue;
            }
            let vx = m.pos.x - o.x;
            let vy = m.pos.y - o.y;
            if vx >= 0 && vy >= 0 && (vx as usize) < vw && (vy as usize) < vh {
                let cell = vy as usize * vw + vx as usize;
                out[mob_base + cell * NUM_MOB_KINDS + m.kind as usize] = 1.0;
            }
        }
        let mut k = mob_base + cells * NUM_MOB_KINDS;
        for v in self.inventory.0 {
            out[k] = v as f32 / 9.0;
            k += 1;
        }
        for v in self.player.meters() {
            out[k] = v as f32 / 9.0;
            k += 1;
        }
        out[k] = self.daylight;
        k += 1;
        out[k + self.player.facing as usize] = 1.0;
    }

    pub fn view_summary(&self) -> ViewSummary {
        let mut s = ViewSummary::default();
        let (vw, vh) = (self.config.view_w as i32, self.config.view_h as i32);
        let o = self.view_origin();
        for vy in 0..vh {
            for vx in 0..vw {
                let b = self.block(Pos::new(o.x + vx, o.y + vy));
                if !s.blocks.contains(&b) {
                    s.blocks.push(b);
                }
            }
        }
        for vy in 0..vh {
            for vx in 0..vw {
                let p = Pos::new(o.x + vx, o.y + vy);
                for m in &self.mobs {
                    if m.health > 0 && m.pos == p && !s.mobs.contains(&m.kind) {
                        s.mobs.push(m.kind);
                    }
                }
            }
        }
        s
    }

    /// Bit sets of block ids and mob kinds present in the view window.
    pub fn view_bits(&self) -> (u32, u8) {
        let (vw, vh) = (self.config.view_w as i32, self.config.view_h as i32);
        let o = self.view_origin();
        let mut blocks = 0u32;
        for vy in 0..vh {
            for vx in 0..vw {
                blocks |= 1 << self.block(Pos::new(o.x + vx, o.y + vy)) as u32;
            }
        }
        let mut mobs = 0u8;
        for m in &self.mobs {
            let (dx, dy) = (m.pos.x - o.x, m.pos.y - o.y);
            if m.health > 0 && (0..vw).contains(&dx) && (0..vh).contains(&dy) {
                mobs |= 1 << m.kind as u8;
            }
        }
        (blocks, mobs)
    }

    pub fn render_text(&self) -> TextObservation {
        let view = self.view_summary();
        render_text_parts(&view, &self.inventory, self.player.meters(), self.daylight)
    }
}

/// Renders the four-line text observation from its parts.
pub fn render_text_parts(
    view: &ViewSummary,
    inventory: &Inventory,
    meters: [u8; 4],
    daylight: f32,
) -> TextObservation {
    let mut s = String::with_capacity(256);
    s.push_str("You see: ");
    let names = view
        .blocks
        .iter()
        .map(|b| b.name())
        .chain(view.mobs.iter().map(|m| m.name()));
    for (i, name) in names.enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push_str(name);
    }
    s.push_str("\nInventory: ");
    let mut first = true;
    for (item, name) in Item::RENDER_ORDER {
        let v = inventory.get(item);
        if v > 0 {
            if !first {
                s.push_str(", ");
            }
            first = false;
            let _ = write!(s, "{name}: {v}");
        }
    }
    let labels = ["Health", "Fullness", "Hydration", "Wakefulness"];
    s.push_str("\nStatus: ");
    for (i, (label, v)) in labels.iter().zip(meters).enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{label}: {}%", percent(v as f64));
    }
    let _ = write!(
        s,
        "\nSky brightness level: {}%",
        percent(daylight as f64 * 9.0)
    );
    TextObservation(s)
}
