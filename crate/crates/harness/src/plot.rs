//! Dependency-free SVG charts of run artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sgrl_core::achievements::{AchievementId, NUM_ACHIEVEMENTS};

use crate::compare::{read_metrics, seed_dirs, MetricsRow};
use crate::HarnessError;

/// Log points in the trailing-mean smoothing window.
pub const SMOOTHING: usize = 5;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Trailing mean over at most `window` points ending at each index.
pub fn trailing_mean(xs: &[f64], window: usize) -> Vec<f64> {
    let w = window.max(1);
    (0..xs.len())
        .map(|i| {
            let s = &xs[(i + 1).saturating_sub(w)..=i];
            s.iter().sum::<f64>() / s.len() as f64
        })
        .collect()
}

/// Achievements sorted by depth, then by canonical order.
pub fn depth_order() -> Vec<AchievementId> {
    let mut v = AchievementId::ALL.to_vec();
    v.sort_by_key(|a| (a.depth(), a.index()));
    v
}

/// Per-log-point success rates averaged over seeds; seeds are truncated
/// to the shortest log.
#[derive(Debug, Clone, PartialEq)]
pub struct RunCurves {
    pub name: String,
    pub steps: Vec<u64>,
    pub rates: Vec<[f64; NUM_ACHIEVEMENTS]>,
}

pub fn load_curves(run: &Path) -> Result<RunCurves, HarnessError> {
    let logs: Vec<Vec<MetricsRow>> = seed_dirs(run)?
        .iter()
        .map(|d| read_metrics(&d.join("metrics.csv")))
        .collect::<Result<_, _>>()?;
    let n = logs.iter().map(Vec::len).min().unwrap_or(0);
    let mut rates = vec![[0.0; NUM_ACHIEVEMENTS]; n];
    for log in &logs {
        for (acc, row) in rates.iter_mut().zip(log) {
            for (a, r) in acc.iter_mut().zip(row.rates) {
                *a += r / logs.len() as f64;
            }
        }
    }
    Ok(RunCurves {
        name: run
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        steps: logs
            .first()
            .map(|l| l[..n].iter().map(|r| r.step).collect())
            .unwrap_or_default(),
        rates,
    })
}

struct Svg(String);

impl Svg {
    fn new(w: f64, h: f64) -> Svg {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="10">"#
        );
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        Svg(s)
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, t: &str) {
        let _ = writeln!(
            self.0,
            r#"<text x="{x:.1}" y="{y:.1}" text-anchor="{anchor}">{}</text>"#,
            escape(t)
        );
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(
            self.0,
            r#"<rect x="{x:.1}" y="{y:.1}" width="{w:.1}" height="{h:.1}" fill="{fill}"/>"#
        );
    }

    fn frame(&mut self, x: f64, y: f64, w: f64, h: f64) {
        let _ = writeln!(
            self.0,
            r##"<rect x="{x:.1}" y="{y:.1}" width="{w:.1}" height="{h:.1}" fill="none" stroke="#444"/>"##
        );
    }

    fn polyline(&mut self, pts: &[(f64, f64)], color: &str) {
        if pts.is_empty() {
            return;
        }
        let p: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        let _ = writeln!(
            self.0,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            p.join(" ")
        );
    }

    fn finish(mut self) -> String {
        self.0.push_str("</svg>\n");
        self.0
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn legend(svg: &mut Svg, names: &[&str], x: f64, y: f64) {
    for (i, n) in names.iter().enumerate() {
        let yy = y + 14.0 * i as f64;
        svg.rect(x, yy - 8.0, 10.0, 10.0, PALETTE[i % PALETTE.len()]);
        svg.text(x + 14.0, yy, "start", n);
    }
}

/// Grid of smoothed success-rate curves, one panel per achievement.
pub fn success_curves_svg(runs: &[RunCurves]) -> String {
    let (cols, pw, ph, pad) = (6usize, 180.0, 120.0, 30.0);
    let order = depth_order();
    let rows = order.len().div_ceil(cols);
    let mut svg = Svg::new(
        cols as f64 * (pw + pad) + pad,
        rows as f64 * (ph + pad) + pad + 20.0,
    );
    let max_step = runs
        .iter()
        .flat_map(|r| r.steps.last())
        .max()
        .copied()
        .unwrap_or(1)
        .max(1) as f64;
    for (k, a) in order.iter().enumerate() {
        let x0 = pad + (k % cols) as f64 * (pw + pad);
        let y0 = pad + (k / cols) as f64 * (ph + pad);
        svg.frame(x0, y0, pw, ph);
        svg.text(
            x0 + pw / 2.0,
            y0 - 4.0,
            "middle",
            &format!("{} (d{})", a.name(), a.depth()),
        );
        for (i, run) in runs.iter().enumerate() {
            let ys: Vec<f64> = run.rates.iter().map(|r| r[a.index()]).collect();
            let pts: Vec<(f64, f64)> = trailing_mean(&ys, SMOOTHING)
                .iter()
                .zip(&run.steps)
                .map(|(v, s)| {
                    (
                        x0 + pw * *s as f64 / max_step,
                        y0 + ph * (1.0 - v.clamp(0.0, 100.0) / 100.0),
                    )
                })
                .collect();
            svg.polyline(&pts, PALETTE[i % PALETTE.len()]);
        }
    }
    let names: Vec<&str> = runs.iter().map(|r| r.name.as_str()).collect();
    legend(
        &mut svg,
        &names,
        pad + (order.len() % cols) as f64 * (pw + pad),
        pad + (rows - 1) as f64 * (ph + pad) + 10.0,
    );
    svg.finish()
}

/// Grouped bars of every run's success rates at log point `idx`.
pub fn bar_chart_svg(runs: &[RunCurves], idx: usize) -> String {
    let order = depth_order();
    let (pad, ch) = (40.0, 200.0);
    let group = 8.0 * runs.len().max(1) as f64 + 6.0;
    let w = pad * 2.0 + group * order.len() as f64 + 120.0;
    let mut svg = Svg::new(w, ch + 2.0 * pad + 60.0);
    let step = runs
        .iter()
        .find_map(|r| r.steps.get(idx))
        .copied()
        .unwrap_or(0);
    svg.text(
        w / 2.0,
        16.0,
        "middle",
        &format!("success rate (%) at step {step}"),
    );
    svg.frame(pad, pad, group * order.len() as f64, ch);
    for (k, a) in order.iter().enumerate() {
        let gx = pad + group * k as f64 + 3.0;
        for (i, run) in runs.iter().enumerate() {
            if let Some(r) = run.rates.get(idx) {
                let h = ch * r[a.index()].clamp(0.0, 100.0) / 100.0;
                svg.rect(
                    gx + 8.0 * i as f64,
                    pad + ch - h,
                    7.0,
                    h,
                    PALETTE[i % PALETTE.len()],
                );
            }
        }
        let _ = writeln!(
            svg.0,
            r#"<text x="{x:.1}" y="{y:.1}" transform="rotate(60 {x:.1} {y:.1})">{}</text>"#,
            a.name(),
            x = gx,
            y = pad + ch + 10.0
        );
    }
    let names: Vec<&str> = runs.iter().map(|r| r.name.as_str()).collect();
    legend(&mut svg, &names, w - 110.0, pad + 10.0);
    svg.finish()
}

/// (step, goal, weight) rows of a goal-weight log.
pub fn read_goal_weights(path: &Path) -> Result<Vec<(u64, String, f64)>, HarnessError> {
    let err = |e: &dyn std::fmt::Display| HarnessError::Schema {
        path: path.display().to_string(),
        msg: e.to_string(),
    };
    let mut rd = csv::Reader::from_path(path).map_err(|e| err(&e))?;
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| err(&e))?;
        if rec.len() != 3 {
            return Err(err(&"expected step,goal,weight"));
        }
        out.push((
            rec[0].parse().map_err(|e| err(&e))?,
            rec[1].to_owned(),
            rec[2].parse().map_err(|e| err(&e))?,
        ));
    }
    Ok(out)
}

/// Step plot of every goal's weight over training.
pub fn goal_weight_svg(rows: &[(u64, String, f64)], total_steps: u64) -> String {
    let (pad, pw, ph) = (40.0, 600.0, 240.0);
    let mut svg = Svg::new(pw + 2.0 * pad + 160.0, ph + 2.0 * pad);
    svg.frame(pad, pad, pw, ph);
    svg.text(pad + pw / 2.0, 16.0, "middle", "goal weights");
    let total = total_steps
        .max(rows.iter().map(|r| r.0).max().unwrap_or(0))
        .max(1) as f64;
    let wmax = rows.iter().map(|r| r.2).fold(0.0, f64::max).max(1e-9);
    let mut steps: Vec<u64> = rows.iter().map(|r| r.0).collect();
    steps.dedup();
    let mut goals: Vec<&str> = Vec::new();
    for r in rows {
        if !goals.contains(&r.1.as_str()) {
            goals.push(&r.1);
        }
    }
    for (i, g) in goals.iter().enumerate() {
        let mut pts = Vec::new();
        for (j, s) in steps.iter().enumerate() {
            let w = rows
                .iter()
                .find(|r| r.0 == *s && r.1 == *g)
                .map_or(0.0, |r| r.2);
            let x = pad + pw * *s as f64 / total;
            let x1 = pad + pw * steps.get(j + 1).map_or(total, |n| *n as f64) / total;
            let y = pad + ph * (1.0 - w / wmax);
            pts.push((x, y));
            pts.push((x1, y));
        }
        svg.polyline(&pts, PALETTE[i % PALETTE.len()]);
    }
    legend(&mut svg, &goals, pad + pw + 10.0, pad + 10.0);
    svg.finish()
}

/// Writes `success_curves.svg`, `bars/step_<n>.svg` and, per run with a
/// goal-weight log, `<run>_goal_weights.svg`. No runs: nothing written.
pub fn plot_runs(runs: &[PathBuf], out: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    if runs.is_empty() {
        return Ok(Vec::new());
    }
    let curves: Vec<RunCurves> = runs
        .iter()
        .map(|r| load_curves(r))
        .collect::<Result<_, _>>()?;
    fs::create_dir_all(out.join("bars"))?;
    let mut written = Vec::new();
    let mut put = |path: PathBuf, body: String| -> Result<(), HarnessError> {
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    put(out.join("success_curves.svg"), success_curves_svg(&curves))?;
    let points = curves.iter().map(|c| c.steps.len()).max().unwrap_or(0);
    for idx in 0..points {
        let step = curves
            .iter()
            .find_map(|c| c.steps.get(idx))
            .copied()
            .unwrap_or(0);
        put(
            out.join("bars").join(format!("step_{step}.svg")),
            bar_chart_svg(&curves, idx),
        )?;
    }
    for (run, c) in runs.iter().zip(&curves) {
        let first = &seed_dirs(run)?[0];
        let rows = read_goal_weights(&first.join("goal_weights.csv"))?;
        if !rows.is_empty() {
            let total = c.steps.last().copied().unwrap_or(0);
            put(
                out.join(format!("{}_goal_weights.svg", c.name)),
                goal_weight_svg(&rows, total),
            )?;
        }
    }
    Ok(written)
}
