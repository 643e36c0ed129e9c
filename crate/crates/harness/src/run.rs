use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sgrl_bridge::{Bridge, BridgeError, HttpTransport, LlmMode, Transport};
use sgrl_core::achievements::{metrics_csv_header, metrics_csv_row, EpisodeRecord, MetricsReport};
use sgrl_core::agent::{evaluate, ActMode, Checkpoint, GoalMode, Guide, MaskMode, Trainer};
use sgrl_core::planner::{GoalId, PriorityTable, Weights};
use sgrl_core::provider::{MaskProvider, PriorityProvider};
use sgrl_core::pruner::{goal_mask, MaskBank};

use crate::config::RunConfig;
use crate::HarnessError;

/// Completed episodes per metrics window.
pub const METRICS_WINDOW: usize = 100;

/// Final-window metrics of one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedResult {
    pub seed: u64,
    pub dir: PathBuf,
    pub final_report: Option<MetricsReport>,
    pub episodes: usize,
    pub wall_seconds: f64,
}

fn contract(module: &'static str, step: u64, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Contract {
        module,
        step,
        msg: e.to_string(),
    }
}

/// Metrics over the trailing window of completed episodes.
pub fn window_report(episodes: &[EpisodeRecord], sps: f64) -> Option<MetricsReport> {
    let w = &episodes[episodes.len().saturating_sub(METRICS_WINDOW)..];
    MetricsReport::from_episodes(w, sps).ok()
}

fn load_table(cfg: &RunConfig) -> Result<Option<PriorityTable>, HarnessError> {
    match &cfg.planner.table {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
            PriorityTable::parse(&text)
                .map(Some)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
        }
        None => Ok(None),
    }
}

pub fn load_bank(cfg: &RunConfig) -> Result<MaskBank, HarnessError> {
    match &cfg.pruner.bank {
        Some(p) if p.exists() => MaskBank::load(p).map_err(|e| HarnessError::Config(e.to_string())),
        _ => Ok(MaskBank::new()),
    }
}

/// Fills per-goal masks from the bank, the provider, or the defaults.
pub fn resolve_masks(
    guide: &mut Guide,
    bank: &mut MaskBank,
    mut provider: Option<&mut (dyn MaskProvider + '_)>,
) {
    for g in GoalId::all() {
        guide.masks[g.index()] = goal_mask(g, bank, provider.as_deref_mut());
    }
}

struct Logs {
    metrics: fs::File,
    eval: fs::File,
    weights: fs::File,
    masks: fs::File,
}

impl Logs {
    fn create(dir: &Path) -> Result<Logs, HarnessError> {
        fs::create_dir_all(dir)?;
        let header = metrics_csv_header();
        let mut metrics = fs::File::create(dir.join("metrics.csv"))?;
        writeln!(metrics, "{header}")?;
        let mut eval = fs::File::create(dir.join("eval.csv"))?;
        writeln!(eval, "{header}")?;
        let mut weights = fs::File::create(dir.join("goal_weights.csv"))?;
        writeln!(weights, "step,goal,weight")?;
        let mut masks = fs::File::create(dir.join("mask_events.csv"))?;
        writeln!(masks, "step,xi,mean_allowed,empty_fallbacks")?;
        Ok(Logs {
            metrics,
            eval,
            weights,
            masks,
        })
    }

    fn weights(&mut self, step: u64, w: &Weights) -> std::io::Result<()> {
        for g in GoalId::all() {
            if w[g.index()] > 0.0 {
                writeln!(self.weights, "{step},{},{}", g.name(), w[g.index()])?;
            }
        }
        Ok(())
    }
}

/// Trains one seed, writing `metrics.csv`, `eval.csv`, `goal_weights.csv`,
/// `mask_events.csv` and `checkpoint.bin` into `dir`.
pub fn train_seed<T: Transport>(
    cfg: &RunConfig,
    seed: u64,
    dir: &Path,
    mut bridge: Option<&mut Bridge<T>>,
) -> Result<SeedResult, HarnessError> {
    let tc = cfg.train_config(seed);
    let mut t = Trainer::new(tc)?;
    let guidance = t.cfg.guidance.clone();
    if guidance.staged_priorities {
        if let Some(table) = load_table(cfg)? {
            t.guide.table = table;
        }
    }
    if guidance.masking != MaskMode::Off {
        let mut bank = load_bank(cfg)?;
        resolve_masks(
            &mut t.guide,
            &mut bank,
            bridge.as_deref_mut().map(|b| b as &mut dyn MaskProvider),
        );
        if let Some(path) = &cfg.pruner.bank {
            if bank.is_dirty() {
                bank.save(path).map_err(|e| contract("pruner", 0, e))?;
            }
        }
    }
    let mut logs = Logs::create(dir)?;
    if guidance.goals != GoalMode::Off {
        logs.weights(0, t.guide.table.active())?;
    }
    let start = Instant::now();
    let mut next_log = cfg.run.log_interval;
    let mut last_weights = *t.guide.table.active();
    let mut last_report = None;
    while !t.is_done() {
        let step = t.global_step;
        let provider = bridge
            .as_deref_mut()
            .map(|b| b as &mut dyn PriorityProvider);
        let rep = t
            .iterate(provider)
            .map_err(|e| contract("agent", step, e))?;
        if guidance.goals != GoalMode::Off && *t.guide.table.active() != last_weights {
            last_weights = *t.guide.table.active();
            logs.weights(step, &last_weights)?;
        }
        if t.global_step < next_log && !t.is_done() {
            continue;
        }
        while next_log <= t.global_step {
            next_log += cfg.run.log_interval;
        }
        let sps = t.global_step as f64 / start.elapsed().as_secs_f64().max(1e-9);
        if let Some(r) = window_report(&t.episodes, sps) {
            writeln!(
                logs.metrics,
                "{}",
                metrics_csv_row(t.global_step, &r, rep.xi)
            )?;
            last_report = Some(r);
        }
        if guidance.masking != MaskMode::Off {
            let m = &t.rollout().masks;
            let mean = m.iter().map(|b| b.count_ones() as f64).sum::<f64>() / m.len().max(1) as f64;
            writeln!(
                logs.masks,
                "{},{:.6},{:.4},{}",
                t.global_step, rep.xi, mean, t.guide.empty_masks
            )?;
        }
        if cfg.run.eval_episodes > 0 {
            let mut g = t.guide.clone();
            let e0 = Instant::now();
            let eps = evaluate(
                &t.ac,
                &mut g,
                &cfg.env,
                seed ^ t.global_step,
                cfg.run.eval_episodes,
                ActMode::EVAL,
            )
            .map_err(|e| contract("harness", t.global_step, e))?;
            let steps: u64 = eps.iter().map(|e| e.length as u64).sum();
            let esps = steps as f64 / e0.elapsed().as_secs_f64().max(1e-9);
            let r = MetricsReport::from_episodes(&eps, esps)
                .map_err(|e| contract("metrics", t.global_step, e))?;
            writeln!(logs.eval, "{}", metrics_csv_row(t.global_step, &r, rep.xi))?;
        }
    }
    for f in [
        &mut logs.metrics,
        &mut logs.eval,
        &mut logs.weights,
        &mut logs.masks,
    ] {
        f.flush()?;
    }
    t.checkpoint().save(&dir.join("checkpoint.bin"))?;
    Ok(SeedResult {
        seed,
        dir: dir.to_path_buf(),
        final_report: last_report,
        episodes: t.episodes.len(),
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

impl From<BridgeError> for HarnessError {
    fn from(e: BridgeError) -> HarnessError {
        match e {
            BridgeError::Unavailable { .. } => HarnessError::ProviderUnavailable(e.to_string()),
            BridgeError::Config(m) => HarnessError::Config(m),
            BridgeError::Io(e) => HarnessError::Io(e),
            other => HarnessError::Contract {
                module: "bridge",
                step: 0,
                msg: other.to_string(),
            },
        }
    }
}

/// HTTP bridge for the run, or `None` when the provider is off. Transcripts
/// default to `out_dir/<id>/llm`.
pub fn open_bridge(cfg: &RunConfig) -> Result<Option<Bridge<HttpTransport>>, HarnessError> {
    if cfg.llm.mode == LlmMode::Off {
        return Ok(None);
    }
    let mut llm = cfg.llm.clone();
    if llm.transcript_dir.is_none() {
        llm.transcript_dir = Some(cfg.run.out_dir.join(cfg.id()).join("llm"));
    }
    Ok(Some(Bridge::http(llm)?))
}

/// Runs every configured seed under `out_dir/<id>/seed_<n>/`.
pub fn train<T: Transport>(
    cfg: &RunConfig,
    mut bridge: Option<&mut Bridge<T>>,
) -> Result<Vec<SeedResult>, HarnessError> {
    cfg.validate()?;
    let root = cfg.run.out_dir.join(cfg.id());
    fs::create_dir_all(&root)?;
    fs::write(root.join("config.toml"), cfg.to_toml())?;
    if let Some(b) = bridge.as_deref_mut() {
        if b.config().mode == LlmMode::Full {
            let g = b.generate_planner_code(Some(&root.join("llm").join("planner")))?;
            if !g.verified {
                log::warn!(
                    "generated planner unverified after {} reviews; using the built-in planner",
                    g.reflections
                );
            }
        }
    }
    let mut out = Vec::new();
    for &seed in &cfg.run.seeds {
        let dir = root.join(format!("seed_{seed}"));
        log::info!("training {} seed {seed}", cfg.id());
        out.push(train_seed(cfg, seed, &dir, bridge.as_deref_mut())?);
    }
    Ok(out)
}

/// Greedy evaluation of a saved checkpoint under `cfg`'s variant.
pub fn evaluate_checkpoint(
    cfg: &RunConfig,
    ck: &Checkpoint,
    episodes: usize,
    seed: u64,
    mode: ActMode,
) -> Result<MetricsReport, HarnessError> {
    if episodes == 0 {
        return Err(contract(
            "harness",
            0,
            "evaluation needs at least one episode",
        ));
    }
    let ac = ck.model().ok_or_else(|| {
        contract(
            "agent",
            ck.global_step,
            "checkpoint parameters do not match sizes",
        )
    })?;
    let guidance = cfg.run.variant.guidance(&cfg.pruner);
    let mut guide = Guide::new(guidance.clone(), ck.encoder_seed, cfg.agent.mask_c);
    if guidance.staged_priorities {
        if let Some(table) = load_table(cfg)? {
            guide.table = table;
        }
        guide
            .table
            .restore(ck.stage as usize, ck.active)
            .map_err(|e| contract("planner", ck.global_step, e))?;
    }
    if guidance.masking != MaskMode::Off {
        let mut bank = load_bank(cfg)?;
        resolve_masks(&mut guide, &mut bank, None);
    }
    let start = Instant::now();
    let eps = evaluate(&ac, &mut guide, &cfg.env, seed, episodes, mode)
        .map_err(|e| contract("agent", ck.global_step, e))?;
    let steps: u64 = eps.iter().map(|e| e.length as u64).sum();
    let sps = steps as f64 / start.elapsed().as_secs_f64().max(1e-9);
    MetricsReport::from_episodes(&eps, sps).map_err(|e| contract("metrics", ck.global_step, e))
}
