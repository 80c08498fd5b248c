//! Small fully connected networks with hand-written backpropagation.

mod adam;
pub mod checkpoint;
mod mlp;

pub use adam::{adam_step, AdamState};
pub use mlp::{hard_copy, soft_update, Activation, Dense, ForwardCache, Gradients, Mlp, OutputActivation};
