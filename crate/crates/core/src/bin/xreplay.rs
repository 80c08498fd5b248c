use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use xreplay::envs::EnvKind;
use xreplay::harness::{
    build_run, evaluate, load_checkpoint, sweep, train_with, write_run, AgentKind, RunConfig, SweepStatus,
};
use xreplay::rng::{stream, Stream};
use xreplay::{Error, Result};

/// Experience-replay strategy experiments on classic control tasks.
#[derive(Parser)]
#[command(name = "xreplay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one agent and write log.csv, manifest.txt and checkpoint.txt.
    Train {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        combined: bool,
        #[arg(long)]
        prioritized: bool,
        #[arg(long)]
        hindsight: bool,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train all eight strategy combinations, one subdirectory each.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Parallel training runs.
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a checkpoint with exploration off.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, default_value_t = 100)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    /// cartpole, mountaincar or pendulum.
    #[arg(long)]
    env: Option<EnvKind>,
    /// dqn or ddpg; defaults to the one matching the environment.
    #[arg(long)]
    agent: Option<AgentKind>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    episodes: Option<usize>,
    /// key=value config file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` overrides, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Print every episode instead of evaluations only.
    #[arg(long)]
    verbose: bool,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let text = match &self.config {
            Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
            None => String::new(),
        };
        let mut cfg = RunConfig::from_text(&text)?;
        if let Some(env) = self.env {
            cfg.env = env;
            if self.agent.is_none() && !text.lines().any(|l| l.trim_start().starts_with("agent")) {
                cfg.agent = AgentKind::default_for(env);
            }
        }
        if let Some(agent) = self.agent {
            cfg.agent = agent;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(n) = self.episodes {
            cfg.episodes = n;
        }
        for o in &self.overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{o}`")))?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train { run, combined, prioritized, hindsight, out } => {
            let mut cfg = run.config()?;
            cfg.flags.combined |= combined;
            cfg.flags.prioritized |= prioritized;
            cfg.flags.hindsight |= hindsight;
            train_one(cfg, &out, run.verbose)
        }
        Command::Sweep { run, threads, out } => sweep_all(run.config()?, threads, &out),
        Command::Eval { checkpoint, episodes, seed, threads } => {
            let policy = load_checkpoint(&checkpoint)?;
            let stats = evaluate(&policy, episodes, &mut stream(seed, Stream::Eval), threads)?;
            println!("env={} agent={} episodes={episodes} mean={:.4} std={:.4}", policy.env, policy.agent, stats.mean, stats.std);
            Ok(())
        }
    }
}

fn train_one(cfg: RunConfig, out: &Path, verbose: bool) -> Result<()> {
    let exp = build_run(cfg.clone())?;
    let outcome = train_with(exp, |r| {
        if let Some(e) = r.eval {
            eprintln!("episode {:>6}  steps {:>8}  train {:>9.2}  eval {:>9.2} ± {:.2}", r.episode, r.steps, r.train_reward, e.mean, e.std);
        } else if verbose {
            eprintln!("episode {:>6}  steps {:>8}  train {:>9.2}", r.episode, r.steps, r.train_reward);
        }
    })?;
    let files = write_run(out, &cfg, &outcome)?;
    match outcome.converged_at {
        Some(ep) => println!("{}: converged at episode {ep}", cfg.flags.label()),
        None => println!("{}: no convergence within {} episodes", cfg.flags.label(), cfg.episodes),
    }
    println!("wrote {}, {}, {}", files.csv.display(), files.manifest.display(), files.checkpoint.display());
    Ok(())
}

fn sweep_all(base: RunConfig, threads: usize, out: &Path) -> Result<()> {
    let entries = sweep(&base, threads);
    std::fs::create_dir_all(out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    let mut summary = String::from("strategy,result\n");
    for e in &entries {
        let label = e.flags.label();
        if let Some(outcome) = &e.outcome {
            write_run(&out.join(&label), &e.config, outcome)?;
        }
        let detail = match &e.status {
            SweepStatus::Unsupported(why) => format!(" ({why})"),
            SweepStatus::Failed(err) => format!(" ({err})"),
            _ => String::new(),
        };
        println!("{label:<9} {}{detail}", e.status.cell());
        let _ = writeln!(summary, "{label},{}", e.status.cell());
    }
    let path = out.join("summary.csv");
    std::fs::write(&path, summary).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    if entries.iter().any(|e| matches!(e.status, SweepStatus::Failed(_))) {
        return Err(Error::Numerical("one or more sweep runs failed".into()));
    }
    Ok(())
}
