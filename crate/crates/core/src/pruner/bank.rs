use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{ActionMask, PrunerError};

pub const BANK_HEADER: &str = "SGRL-MASKBANK v1";

/// Lower-cased, underscores as spaces, single spaces.
pub fn canonical_goal(text: &str) -> String {
    text.to_lowercase()
        .replace('_', " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Canonical goal text to mask, persisted as a tab-separated text file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MaskBank {
    entries: BTreeMap<String, ActionMask>,
    dirty: bool,
}

impl MaskBank {
    pub fn new() -> MaskBank {
        MaskBank::default()
    }

    pub fn get(&self, goal: &str) -> Option<ActionMask> {
        self.entries.get(&canonical_goal(goal)).copied()
    }

    pub fn insert(&mut self, goal: &str, mask: ActionMask) {
        let key = canonical_goal(goal);
        if self.entries.insert(key, mask) != Some(mask) {
            self.dirty = true;
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, ActionMask)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from(BANK_HEADER);
        s.push('\n');
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k}\t{v}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<MaskBank, PrunerError> {
        let err = |line, msg: String| PrunerError::Bank { line, msg };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim_end() == BANK_HEADER => {}
            Some((_, h)) => {
                return Err(err(
                    1,
                    format!("expected header '{BANK_HEADER}', got '{h}'"),
                ))
            }
            None => return Err(err(1, "missing header".into())),
        }
        let mut bank = MaskBank::new();
        for (i, line) in lines {
            let n = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (goal, bits) = line
                .split_once('\t')
                .ok_or_else(|| err(n, "expected '<goal>\\t<mask>'".into()))?;
            let mask: ActionMask = bits.trim_end().parse().map_err(|e| err(n, e))?;
            let key = canonical_goal(goal);
            if key.is_empty() {
                return Err(err(n, "empty goal".into()));
            }
            if bank.entries.insert(key, mask).is_some() {
                return Err(err(n, format!("duplicate goal '{goal}'")));
            }
        }
        Ok(bank)
    }

    pub fn save(&mut self, path: &Path) -> Result<(), PrunerError> {
        std::fs::write(path, self.to_text())?;
        self.dirty = false;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<MaskBank, PrunerError> {
        MaskBank::parse(&std::fs::read_to_string(path)?)
    }
}
