use crate::world::{Block, Inventory, Item, MobKind};

use super::{PlannerError, PlannerView};

fn err(line: usize, msg: impl Into<String>) -> PlannerError {
    PlannerError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Strips `label` from the start of `s`, ignoring ASCII case.
fn strip_label<'a>(s: &'a str, label: &str) -> Option<&'a str> {
    let head = s.get(..label.len())?;
    head.eq_ignore_ascii_case(label).then(|| &s[label.len()..])
}

fn parse_percent(line: usize, s: &str) -> Result<f64, PlannerError> {
    let v = s.trim().trim_end_matches('%').trim();
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| err(line, format!("bad percentage '{}'", s.trim())))
}

/// Inverse of the renderer's `int(v / 0.09)`.
fn meter(pct: f64) -> u8 {
    (pct * 0.09).round().clamp(0.0, 9.0) as u8
}

fn object(name: &str) -> Option<Result<Block, MobKind>> {
    let n = name.trim().to_ascii_lowercase();
    if n == "table" {
        return Some(Ok(Block::Table));
    }
    if let Some(b) = Block::from_name(&n) {
        return Some(Ok(b));
    }
    let singular = n.strip_suffix('s').unwrap_or(&n);
    MobKind::ALL
        .into_iter()
        .find(|m| m.name() == n || m.name().strip_suffix('s').unwrap_or(m.name()) == singular)
        .map(Err)
}

/// Parses the text observation. Accepts the four-line rendering as well as
/// the variant with the sky brightness folded into the status line. Labels
/// are case-insensitive.
pub fn parse_text_observation(text: &str) -> Result<PlannerView, PlannerError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().trim_end_matches('\\').trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut view = PlannerView {
        daylight: 1.0,
        ..PlannerView::default()
    };
    let mut it = lines.into_iter();

    let (n, l) = it.next().ok_or_else(|| err(1, "empty observation"))?;
    let seen = strip_label(l, "You see:").ok_or_else(|| err(n, "expected 'You see:'"))?;
    for name in seen.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match object(name) {
            Some(Ok(b)) => view.blocks |= 1 << b as u32,
            Some(Err(m)) => view.mobs |= 1 << m as u8,
            None => return Err(err(n, format!("unknown object '{name}'"))),
        }
    }

    let (n, l) = it
        .next()
        .ok_or_else(|| err(n + 1, "missing 'Inventory:' line"))?;
    let inv = strip_label(l, "Inventory:").ok_or_else(|| err(n, "expected 'Inventory:'"))?;
    let mut inventory = Inventory::default();
    for entry in inv.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, count) = entry
            .rsplit_once(':')
            .ok_or_else(|| err(n, format!("bad inventory entry '{entry}'")))?;
        let item = Item::from_render_name(name.trim().to_ascii_lowercase().as_str())
            .ok_or_else(|| err(n, format!("unknown item '{}'", name.trim())))?;
        let count: u8 = count
            .trim()
            .parse()
            .map_err(|_| err(n, format!("bad count in '{entry}'")))?;
        inventory.set(item, count);
    }
    view.inventory = inventory;

    let (n, l) = it
        .next()
        .ok_or_else(|| err(n + 1, "missing 'Status:' line"))?;
    let status = strip_label(l, "Status:").ok_or_else(|| err(n, "expected 'Status:'"))?;
    let mut meters: [Option<u8>; 4] = [None; 4];
    let mut sky = None;
    for field in status.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (label, value) = field
            .split_once(':')
            .ok_or_else(|| err(n, format!("bad status field '{field}'")))?;
        let pct = parse_percent(n, value)?;
        let slot = match label.trim().to_ascii_lowercase().as_str() {
            "health" => 0,
            "fullness" | "food" => 1,
            "hydration" | "drink" => 2,
            "wakefulness" | "energy" => 3,
            "sky brightness level" => {
                sky = Some(pct);
                continue;
            }
            other => return Err(err(n, format!("unknown status '{other}'"))),
        };
        meters[slot] = Some(meter(pct));
    }
    for (i, name) in ["health", "fullness", "hydration", "wakefulness"]
        .iter()
        .enumerate()
    {
        view.meters[i] = meters[i].ok_or_else(|| err(n, format!("missing {name}")))?;
    }

    if let Some((n, l)) = it.next() {
        let v = strip_label(l, "Sky brightness level:")
            .ok_or_else(|| err(n, "expected 'Sky brightness level:'"))?;
        sky = Some(parse_percent(n, v)?);
        if let Some((n, _)) = it.next() {
            return Err(err(n, "unexpected trailing line"));
        }
    }
    if let Some(pct) = sky {
        view.daylight = (pct / 100.0).clamp(0.0, 1.0) as f32;
    }
    Ok(view)
}
