use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use sgrl_bridge::{Bridge, HttpTransport, LlmMode};
use sgrl_core::achievements::{metrics_csv_header, metrics_csv_row, AchievementId, AchievementSet};
use sgrl_core::agent::{ActMode, Checkpoint, Trainer};
use sgrl_core::planner::{determine_goal_text, GoalId, PriorityTable};
use sgrl_core::provider::MaskProvider;
use sgrl_core::pruner::{canonical_goal, default_mask, goal_mask};
use sgrl_core::world::WorldConfig;
use sgrl_harness::bench::{run_bench, BENCH_CSV_HEADER};
use sgrl_harness::compare::{render_table, summarize};
use sgrl_harness::plot::plot_runs;
use sgrl_harness::run::{evaluate_checkpoint, load_bank, open_bridge, train};
use sgrl_harness::{HarnessError, RunConfig, Variant};

#[derive(Parser)]
#[command(
    name = "sgrl",
    version,
    about = "Goal-guided PPO on a small crafting gridworld"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Train every seed of a run.
    Train(TrainArgs),
    /// Evaluate checkpoints (or an untrained policy).
    Eval(EvalArgs),
    /// Summary table over runs.
    Compare {
        runs: Vec<PathBuf>,
        /// Append the human-expert reference row.
        #[arg(long)]
        human: bool,
    },
    /// SVG charts for runs.
    Plot {
        runs: Vec<PathBuf>,
        #[arg(long, default_value = "plots")]
        out: PathBuf,
    },
    /// Environment throughput with random actions.
    Bench {
        #[arg(long, default_value_t = 256)]
        envs: usize,
        #[arg(long, default_value_t = 2_000_000)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Append the CSV row here as well as printing it.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Goal selection for a text observation.
    Plan {
        /// Observation file, `-` for stdin.
        #[arg(long, required_unless_present = "list_goals")]
        obs: Option<PathBuf>,
        /// Comma-separated achievements already unlocked.
        #[arg(long, default_value = "")]
        unlocked: String,
        /// Staged priority table; the built-in one when unset.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        stage: Option<usize>,
        #[arg(long)]
        list_goals: bool,
    },
    /// Action masks for goals.
    Mask {
        #[arg(long, required_unless_present = "dump")]
        query: Option<String>,
        /// Print the mask bank.
        #[arg(long)]
        dump: bool,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    variant: Option<Variant>,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    total_steps: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    id: Option<String>,
}

#[derive(Args)]
struct EvalArgs {
    /// Run directory holding `config.toml` and `seed_*/checkpoint.bin`.
    #[arg(long, conflicts_with_all = ["config", "checkpoint"])]
    run: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Without one the policy is freshly initialized.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Apply goal masks (strict) during evaluation.
    #[arg(long)]
    masked: bool,
    /// Sample instead of argmax.
    #[arg(long)]
    stochastic: bool,
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, HarnessError> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let mut cfg = load_config(a.config.as_deref())?;
    if let Some(v) = a.variant {
        cfg.run.variant = v;
    }
    if let Some(s) = a.seeds {
        cfg.run.seeds = s;
    }
    if let Some(t) = a.total_steps {
        cfg.run.total_steps = t;
    }
    if let Some(o) = a.out {
        cfg.run.out_dir = o;
    }
    if a.id.is_some() {
        cfg.run.id = a.id;
    }
    cfg.validate()?;
    let mut bridge = open_bridge(&cfg)?;
    let results = train(&cfg, bridge.as_mut())?;
    for r in results {
        match r.final_report {
            Some(m) => println!(
                "seed {} score {:.2} reward {:.2} depth {} episodes {} ({:.0}s) -> {}",
                r.seed,
                m.score,
                m.mean_return,
                m.achievement_depth,
                r.episodes,
                r.wall_seconds,
                r.dir.display()
            ),
            None => println!("seed {} finished without a completed episode", r.seed),
        }
    }
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let mut mode = ActMode::EVAL;
    mode.masked = a.masked;
    mode.greedy = !a.stochastic;
    let mut jobs: Vec<(RunConfig, Option<PathBuf>)> = Vec::new();
    if let Some(run) = &a.run {
        let cfg = RunConfig::load(&run.join("config.toml"))?;
        for dir in sgrl_harness::compare::seed_dirs(run)? {
            jobs.push((cfg.clone(), Some(dir.join("checkpoint.bin"))));
        }
    } else {
        jobs.push((load_config(a.config.as_deref())?, a.checkpoint.clone()));
    }
    println!("{}", metrics_csv_header());
    for (cfg, ck) in jobs {
        let ck = match ck {
            Some(p) => Checkpoint::load(&p).map_err(HarnessError::from)?,
            None => {
                let seed = cfg.run.seeds[0];
                Trainer::new(cfg.train_config(seed))
                    .map_err(HarnessError::from)?
                    .checkpoint()
            }
        };
        let r = evaluate_checkpoint(&cfg, &ck, a.episodes, a.seed, mode)?;
        println!("{}", metrics_csv_row(ck.global_step, &r, 0.0));
    }
    Ok(())
}

fn cmd_plan(
    obs: Option<PathBuf>,
    unlocked: &str,
    table: Option<PathBuf>,
    stage: Option<usize>,
    list: bool,
) -> Result<()> {
    if list {
        for g in GoalId::all() {
            println!(
                "{:2} {:<20} {:<10?} {}",
                g.index(),
                g.name(),
                g.category(),
                g.text()
            );
        }
        return Ok(());
    }
    let mut t = match &table {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| p.display().to_string())?;
            PriorityTable::parse(&text).map_err(|e| HarnessError::Config(e.to_string()))?
        }
        None => PriorityTable::builtin(),
    };
    if let Some(s) = stage {
        if s >= t.num_stages() {
            return Err(HarnessError::Config(format!("stage {s} out of range")).into());
        }
        t.set_stage(s);
    }
    let mut set = AchievementSet::default();
    for name in unlocked.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let a = AchievementId::from_name(name)
            .ok_or_else(|| HarnessError::Config(format!("unknown achievement '{name}'")))?;
        set.insert(a);
    }
    let path = obs.expect("clap requires --obs");
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(&path).with_context(|| path.display().to_string())?;
    }
    let goals = determine_goal_text(&text, set, &t).map_err(|e| HarnessError::Contract {
        module: "planner",
        step: 0,
        msg: e.to_string(),
    })?;
    for (g, w) in goals.items {
        println!("{w:.4} {} ({})", g.text(), g.name());
    }
    Ok(())
}

fn cmd_mask(query: Option<String>, dump: bool, config: Option<PathBuf>) -> Result<()> {
    let cfg = load_config(config.as_deref())?;
    let mut bank = load_bank(&cfg)?;
    if dump {
        if bank.is_empty() {
            for g in GoalId::all() {
                print_mask(&canonical_goal(g.text()), default_mask(g));
            }
        } else {
            print!("{}", bank.to_text());
        }
    }
    let Some(q) = query else { return Ok(()) };
    let goal = GoalId::from_name(&q).or_else(|| GoalId::from_text(&q));
    let key = canonical_goal(goal.map_or(q.as_str(), |g| g.text()));
    let mut bridge: Option<Bridge<HttpTransport>> = if cfg.llm.mode == LlmMode::Off {
        None
    } else {
        open_bridge(&cfg)?
    };
    let mask = match (goal, bank.get(&key)) {
        (_, Some(m)) => m,
        (Some(g), None) => goal_mask(
            g,
            &mut bank,
            bridge.as_mut().map(|b| b as &mut dyn MaskProvider),
        ),
        (None, None) => match bridge.as_mut() {
            Some(b) => {
                let m = b.request_mask(&key).map_err(HarnessError::from)?;
                bank.insert(&key, m);
                m
            }
            None => bail!(HarnessError::Config(format!(
                "'{q}' is not a known goal and no provider is configured"
            ))),
        },
    };
    print_mask(&key, mask);
    if let Some(p) = &cfg.pruner.bank {
        if bank.is_dirty() {
            bank.save(p)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
        }
    }
    Ok(())
}

fn print_mask(key: &str, m: sgrl_core::pruner::ActionMask) {
    let names: Vec<&str> = m.actions().map(|a| a.name()).collect();
    println!("{key}: {}", names.join(", "));
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Train(a) => cmd_train(a),
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Compare { runs, human } => {
            let rows = runs
                .iter()
                .map(|r| summarize(r))
                .collect::<Result<Vec<_>, _>>()?;
            print!("{}", render_table(&rows, human));
            Ok(())
        }
        Cmd::Plot { runs, out } => {
            for p in plot_runs(&runs, &out)? {
                println!("{}", p.display());
            }
            Ok(())
        }
        Cmd::Bench {
            envs,
            steps,
            seed,
            csv,
        } => {
            let r = run_bench(&WorldConfig::default(), envs, steps, seed)?;
            println!("{BENCH_CSV_HEADER}\n{}", r.csv_row());
            if let Some(p) = csv {
                let fresh = !p.exists();
                let mut body = String::new();
                if fresh {
                    body.push_str(BENCH_CSV_HEADER);
                    body.push('\n');
                }
                body.push_str(&r.csv_row());
                body.push('\n');
                use std::io::Write;
                std::fs::OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(&p)?
                    .write_all(body.as_bytes())?;
            }
            Ok(())
        }
        Cmd::Plan {
            obs,
            unlocked,
            table,
            stage,
            list_goals,
        } => cmd_plan(obs, &unlocked, table, stage, list_goals),
        Cmd::Mask {
            query,
            dump,
            config,
        } => cmd_mask(query, dump, config),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(h) = e.downcast_ref::<HarnessError>() {
        return h.exit_code() as u8;
    }
    3
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
