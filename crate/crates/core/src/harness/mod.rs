//! Experiment runner: builds a run from a [`RunConfig`], trains it with
//! periodic exploration-free evaluation, and writes logs and checkpoints.

mod config;
mod output;
mod policy;
mod run;
mod sweep;

pub use config::{AgentKind, RunConfig};
pub use output::{
    emit_csv, format_checkpoint, format_csv, load_checkpoint, parse_checkpoint, save_checkpoint, write_run, RunFiles,
    CSV_HEADER,
};
pub use policy::{evaluate, evaluate_seeds, EvalStats, Policy};
pub use run::{build_run, check_convergence, first_reaching, train, train_with, Experiment, RunStats, TrainOutcome, TrainRecord};
pub use sweep::{sweep, SweepEntry, SweepStatus};
