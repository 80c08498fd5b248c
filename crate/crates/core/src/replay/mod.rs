//! Transition storage and the uniform / combined sampling paths.

mod buffer;
mod stack;
mod transition;

pub use buffer::{sample_combined, sample_uniform, ReplayBuffer, Sample, DEFAULT_WARMUP};
pub use stack::{ReplayStack, StrategyFlags};
pub use transition::{Action, Transition};
