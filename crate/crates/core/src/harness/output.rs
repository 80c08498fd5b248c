//! Files written for a run: CSV log, run manifest and policy checkpoint.
//!
//! The checkpoint is a short header followed by the policy network in the
//! `mlp v1` text format:
//!
//! ```text
//! xreplay checkpoint v1
//! env mountaincar
//! agent dqn
//! hindsight true
//! mlp v1
//! ...
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::{AgentKind, RunConfig};
use super::policy::Policy;
use super::run::{TrainOutcome, TrainRecord};
use crate::envs::EnvKind;
use crate::error::{Error, Result};
use crate::nn::checkpoint::{read_mlp, write_mlp};

pub const CSV_HEADER: &str = "episode,train_reward,eval_mean,eval_std,steps,wallclock_ms";

/// CSV text with six decimals for rewards; evaluation cells are empty on
/// episodes without an evaluation.
pub fn format_csv(records: &[TrainRecord]) -> String {
    let mut s = String::with_capacity(64 * (records.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in records {
        let _ = write!(s, "{},{:.6},", r.episode, r.train_reward);
        if let Some(e) = r.eval {
            let _ = write!(s, "{:.6},{:.6}", e.mean, e.std);
        } else {
            s.push(',');
        }
        let _ = writeln!(s, ",{},{}", r.steps, r.wallclock_ms);
    }
    s
}

pub fn emit_csv(records: &[TrainRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Config("no records to write".into()));
    }
    write_file(path, &format_csv(records))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn format_checkpoint(policy: &Policy) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "xreplay checkpoint v1");
    let _ = writeln!(s, "env {}", policy.env);
    let _ = writeln!(s, "agent {}", policy.agent);
    let _ = writeln!(s, "hindsight {}", policy.hindsight);
    write_mlp(policy.network(), &mut s);
    s
}

pub fn parse_checkpoint(text: &str) -> Result<Policy> {
    let mut lines = text.lines();
    let mut field = |name: &str| -> Result<String> {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("checkpoint ends before `{name}`")))?;
        match line.trim().split_once(' ') {
            Some((k, v)) if k == name => Ok(v.trim().to_string()),
            _ => Err(Error::Parse(format!("expected `{name} ...`, got `{line}`"))),
        }
    };
    if field("xreplay")? != "checkpoint v1" {
        return Err(Error::Parse("unsupported checkpoint version".into()));
    }
    let env: EnvKind = field("env")?.parse()?;
    let agent: AgentKind = field("agent")?.parse()?;
    let hindsight = match field("hindsight")?.as_str() {
        "true" => true,
        "false" => false,
        other => return Err(Error::Parse(format!("invalid hindsight flag `{other}`"))),
    };
    let net = read_mlp(&mut lines)?;
    Policy::new(env, agent, hindsight, net)
}

pub fn save_checkpoint(policy: &Policy, path: &Path) -> Result<()> {
    write_file(path, &format_checkpoint(policy))
}

pub fn load_checkpoint(path: &Path) -> Result<Policy> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_checkpoint(&text)
}

/// Paths of the files written by [`write_run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunFiles {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub checkpoint: PathBuf,
}

/// Writes `log.csv`, `manifest.txt` and `checkpoint.txt` into `dir`,
/// creating it if needed. The manifest is a loadable config followed by
/// result comments.
pub fn write_run(dir: &Path, cfg: &RunConfig, outcome: &TrainOutcome) -> Result<RunFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let files = RunFiles {
        csv: dir.join("log.csv"),
        manifest: dir.join("manifest.txt"),
        checkpoint: dir.join("checkpoint.txt"),
    };
    write_file(&files.csv, &format_csv(&outcome.records))?;
    let mut manifest = cfg.to_text();
    let _ = writeln!(manifest, "# strategy {}", cfg.flags.label());
    let _ = writeln!(manifest, "# episodes_run {}", outcome.records.len());
    match outcome.converged_at {
        Some(ep) => {
            let _ = writeln!(manifest, "# converged_at {ep}");
        }
        None => {
            let _ = writeln!(manifest, "# converged_at none");
        }
    }
    write_file(&files.manifest, &manifest)?;
    save_checkpoint(&outcome.policy, &files.checkpoint)?;
    Ok(files)
}
