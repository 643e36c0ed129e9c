use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::template::PromptRole;

/// One request and its outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub index: usize,
    pub role: PromptRole,
    pub attempts: u32,
    pub prompt: String,
    pub response: Option<String>,
    pub error: Option<String>,
}

/// Append-only log of exchanges, mirrored to `dir/NNNN.json` when a
/// directory is configured. No timestamps, so mock runs are reproducible.
#[derive(Debug, Default)]
pub struct Transcript {
    dir: Option<PathBuf>,
    offset: usize,
    entries: Vec<Exchange>,
}

impl Transcript {
    /// Numbering continues after any transcript files already in `dir`.
    pub fn new(dir: Option<PathBuf>) -> Transcript {
        let offset = dir
            .as_deref()
            .and_then(|d| fs::read_dir(d).ok())
            .map(|it| {
                it.filter_map(|e| e.ok())
                    .filter_map(|e| {
                        let name = e.file_name().into_string().ok()?;
                        name.strip_suffix(".json")?.parse::<usize>().ok()
                    })
                    .max()
                    .unwrap_or(0)
            })
            .unwrap_or(0);
        Transcript {
            dir,
            offset,
            entries: Vec::new(),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn entries(&self) -> &[Exchange] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn next_index(&self) -> usize {
        self.offset + self.entries.len() + 1
    }

    pub fn append(&mut self, e: Exchange) -> std::io::Result<()> {
        if let Some(dir) = &self.dir {
            fs::create_dir_all(dir)?;
            let path = dir.join(format!("{:04}.json", e.index));
            let json = serde_json::to_string_pretty(&e).map_err(std::io::Error::other)?;
            let mut f = fs::OpenOptions::new()
                .write(true)
                .create_new(true)
                .open(path)?;
            std::io::Write::write_all(&mut f, json.as_bytes())?;
        }
        self.entries.push(e);
        Ok(())
    }
}
