//! DQN and DDPG learners. Both consume sampled batches and return one TD
//! error per sample so the replay stack can refresh priorities.

mod ddpg;
mod dqn;
mod noise;

pub use ddpg::{
    actor_objective_gradient, ddpg_act, ddpg_actor_update, ddpg_critic_update, DdpgAgent, DdpgConfig,
};
pub use dqn::{dqn_act, dqn_td_target, dqn_update, DqnAgent, DqnBatch, DqnConfig};
pub use noise::OuNoise;

use ndarray::Array2;

use crate::envs::{EnvSpec, Scaling};
use crate::error::{Error, Result};
use crate::hindsight::augment_observation;
use crate::replay::Sample;

/// TD errors beyond this magnitude abort training.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

/// Maps raw observations (and goals) to network inputs: each part is scaled
/// by the environment's fixed ranges, then concatenated.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoder {
    obs_dim: usize,
    goal_dim: usize,
    obs_scaling: Scaling,
    goal_scaling: Option<Scaling>,
}

impl Encoder {
    pub fn new(spec: &EnvSpec, hindsight: bool) -> Result<Self> {
        let goal_scaling = if hindsight {
            Some(
                spec.goal_scaling
                    .clone()
                    .ok_or_else(|| Error::UnsupportedGoal(spec.name().into()))?,
            )
        } else {
            None
        };
        Ok(Encoder {
            obs_dim: spec.obs_dim,
            goal_dim: if hindsight { spec.goal_dim.unwrap_or(0) } else { 0 },
            obs_scaling: spec.obs_scaling.clone(),
            goal_scaling,
        })
    }

    /// Identity encoder, for tests and toy problems.
    pub fn identity(obs_dim: usize) -> Self {
        Encoder {
            obs_dim,
            goal_dim: 0,
            obs_scaling: Scaling {
                center: vec![0.0; obs_dim],
                half_range: vec![1.0; obs_dim],
            },
            goal_scaling: None,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.obs_dim + self.goal_dim
    }

    pub fn goal_dim(&self) -> usize {
        self.goal_dim
    }

    pub fn encode(&self, state: &[f64], goal: Option<&[f64]>) -> Result<Vec<f64>> {
        if state.len() != self.obs_dim {
            return Err(Error::shape(self.obs_dim, state.len(), "observation"));
        }
        let obs = self.obs_scaling.apply(state);
        let goal = match (&self.goal_scaling, goal) {
            (Some(scale), Some(g)) => Some(scale.apply(g)),
            (None, None) => None,
            (Some(_), None) => return Err(Error::shape(self.goal_dim, 0, "goal")),
            (None, Some(g)) => return Err(Error::shape(0, g.len(), "goal")),
        };
        augment_observation(&obs, goal.as_deref(), self.obs_dim, self.goal_dim)
    }

    /// Encodes `state` (or `next_state`) of every sample into matrix rows.
    pub fn encode_batch(&self, batch: &[Sample<'_>], next: bool) -> Result<Array2<f64>> {
        let dim = self.input_dim();
        let mut data = Vec::with_capacity(batch.len() * dim);
        for s in batch {
            let t = s.transition;
            let state = if next { &t.next_state } else { &t.state };
            data.extend(self.encode(state, t.goal.as_deref())?);
        }
        Array2::from_shape_vec((batch.len(), dim), data).map_err(|e| Error::Integrity(e.to_string()))
    }
}

fn check_divergence(td: &[f64], what: &str) -> Result<()> {
    if let Some((i, d)) = td.iter().enumerate().find(|(_, d)| !d.is_finite() || d.abs() > DIVERGENCE_LIMIT) {
        return Err(Error::Numerical(format!(
            "{what} diverged: TD error {d} at batch position {i}"
        )));
    }
    Ok(())
}
