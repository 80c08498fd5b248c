pub mod agents;
pub mod envs;
pub mod error;
pub mod harness;
pub mod hindsight;
pub mod nn;
pub mod prioritized;
pub mod replay;
pub mod rng;

pub use error::{Error, Result};
