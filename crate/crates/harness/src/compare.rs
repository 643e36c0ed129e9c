use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sgrl_core::achievements::{sps_hundreds, NUM_ACHIEVEMENTS};

use crate::HarnessError;

/// Reference row for human experts.
pub const HUMAN_ROW: (&str, &str, &str, &str, &str) =
    ("Human", "50.5 ± 6.8", "14.3 ± 2.3", "8", "-");

/// One parsed line of a metrics CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub step: u64,
    pub mean_return: f64,
    pub score: f64,
    pub depth: u8,
    pub sps: f64,
    pub xi: f64,
    pub rates: [f64; NUM_ACHIEVEMENTS],
}

fn schema(path: &Path, msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::Schema {
        path: path.display().to_string(),
        msg: msg.to_string(),
    }
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRow>, HarnessError> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| schema(path, e))?;
    let header = rd.headers().map_err(|e| schema(path, e))?.clone();
    if header.len() != 6 + NUM_ACHIEVEMENTS || &header[0] != "step" {
        return Err(schema(path, "unexpected header"));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| schema(path, e))?;
        let f = |i: usize| -> Result<f64, HarnessError> {
            rec[i]
                .parse::<f64>()
                .map_err(|e| schema(path, format!("column {}: {e}", &header[i])))
        };
        let mut rates = [0.0; NUM_ACHIEVEMENTS];
        for (k, r) in rates.iter_mut().enumerate() {
            *r = f(6 + k)?;
        }
        rows.push(MetricsRow {
            step: rec[0].parse().map_err(|e| schema(path, e))?,
            mean_return: f(1)?,
            score: f(2)?,
            depth: rec[3].parse().map_err(|e| schema(path, e))?,
            sps: f(4)?,
            xi: f(5)?,
            rates,
        });
    }
    Ok(rows)
}

/// `seed_*` directories of a run, sorted.
pub fn seed_dirs(run: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(run)
        .map_err(|e| schema(run, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.is_dir()
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("seed_"))
        })
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(schema(run, "no seed_* directories"));
    }
    Ok(dirs)
}

/// Sample mean and standard deviation (zero for one value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub name: String,
    pub seeds: usize,
    pub score: (f64, f64),
    pub reward: (f64, f64),
    /// Highest depth reached by any seed.
    pub depth: u8,
    pub sps_hundreds: (f64, f64),
}

/// Summarizes the last log point of every seed of a run.
pub fn summarize(run: &Path) -> Result<RunSummary, HarnessError> {
    let mut finals = Vec::new();
    for dir in seed_dirs(run)? {
        let path = dir.join("metrics.csv");
        let rows = read_metrics(&path)?;
        finals.push(
            rows.last()
                .cloned()
                .ok_or_else(|| schema(&path, "no rows"))?,
        );
    }
    let col = |f: fn(&MetricsRow) -> f64| mean_std(&finals.iter().map(f).collect::<Vec<_>>());
    Ok(RunSummary {
        name: run
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        seeds: finals.len(),
        score: col(|r| r.score),
        reward: col(|r| r.mean_return),
        depth: finals.iter().map(|r| r.depth).max().unwrap_or(0),
        sps_hundreds: col(|r| sps_hundreds(r.sps)),
    })
}

fn pm((m, s): (f64, f64)) -> String {
    format!("{m:.1} ± {s:.1}")
}

/// Markdown table of run summaries, optionally with the human row.
pub fn render_table(rows: &[RunSummary], human: bool) -> String {
    let mut out = String::from("| Method | Score (%) | Reward | Depth | SPS (x10^2) |\n");
    out.push_str("|---|---|---|---|---|\n");
    for r in rows {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} |",
            r.name,
            pm(r.score),
            pm(r.reward),
            r.depth,
            pm(r.sps_hundreds)
        );
    }
    if human {
        let (a, b, c, d, e) = HUMAN_ROW;
        let _ = writeln!(out, "| {a} | {b} | {c} | {d} | {e} |");
    }
    out
}
