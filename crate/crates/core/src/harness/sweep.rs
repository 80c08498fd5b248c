use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use super::config::RunConfig;
use super::run::{build_run, train, TrainOutcome};
use crate::error::Error;
use crate::replay::StrategyFlags;

/// How one strategy combination fared.
#[derive(Debug, Clone)]
pub enum SweepStatus {
    /// The combination cannot run on this environment/agent.
    Unsupported(String),
    Converged(usize),
    NoConvergenceWithinLimit,
    Failed(Error),
}

impl SweepStatus {
    /// Short table cell: the episode count, `unsupported`,
    /// `no-convergence-within-limit` or `failed`.
    pub fn cell(&self) -> String {
        match self {
            SweepStatus::Unsupported(_) => "unsupported".into(),
            SweepStatus::Converged(ep) => ep.to_string(),
            SweepStatus::NoConvergenceWithinLimit => "no-convergence-within-limit".into(),
            SweepStatus::Failed(_) => "failed".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub flags: StrategyFlags,
    pub config: RunConfig,
    pub status: SweepStatus,
    pub outcome: Option<TrainOutcome>,
}

/// Trains every strategy combination of `base` on up to `threads` workers.
/// Entries come back in [`StrategyFlags::ALL`] order.
pub fn sweep(base: &RunConfig, threads: usize) -> Vec<SweepEntry> {
    let configs: Vec<RunConfig> = StrategyFlags::ALL.iter().map(|f| base.clone().with_flags(*f)).collect();
    let slots: Vec<Mutex<Option<SweepEntry>>> = configs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    thread::scope(|scope| {
        for _ in 0..threads.clamp(1, configs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cfg) = configs.get(i) else { break };
                let entry = run_one(cfg.clone());
                *slots[i].lock().unwrap_or_else(|e| e.into_inner()) = Some(entry);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap_or_else(|e| e.into_inner()).expect("every slot filled"))
        .collect()
}

fn run_one(config: RunConfig) -> SweepEntry {
    let flags = config.flags;
    let exp = match build_run(config.clone()) {
        Ok(exp) => exp,
        Err(Error::Config(reason)) | Err(Error::UnsupportedGoal(reason)) => {
            return SweepEntry { flags, config, status: SweepStatus::Unsupported(reason), outcome: None };
        }
        Err(e) => return SweepEntry { flags, config, status: SweepStatus::Failed(e), outcome: None },
    };
    match train(exp) {
        Ok(outcome) => SweepEntry {
            flags,
            config,
            status: match outcome.converged_at {
                Some(ep) => SweepStatus::Converged(ep),
                None => SweepStatus::NoConvergenceWithinLimit,
            },
            outcome: Some(outcome),
        },
        Err(e) => SweepEntry { flags, config, status: SweepStatus::Failed(e), outcome: None },
    }
}
