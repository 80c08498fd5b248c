use ndarray::{concatenate, s, Array2, ArrayView2, Axis};

use super::{check_divergence, Encoder, OuNoise};
use crate::error::{Error, Result};
use crate::nn::{Activation, AdamState, Gradients, Mlp, OutputActivation};
use crate::replay::Sample;
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct DdpgConfig {
    pub gamma: f64,
    pub tau: f64,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub ou_theta: f64,
    pub ou_sigma: f64,
    pub ou_mu: f64,
    pub batch_size: usize,
    pub warmup: usize,
    pub buffer_capacity: usize,
    pub hidden: Vec<usize>,
}

impl Default for DdpgConfig {
    fn default() -> Self {
        DdpgConfig {
            gamma: 0.99,
            tau: 0.005,
            actor_lr: 1e-4,
            critic_lr: 1e-3,
            ou_theta: 0.15,
            ou_sigma: 0.2,
            ou_mu: 0.0,
            batch_size: 64,
            warmup: 1000,
            buffer_capacity: 100_000,
            hidden: vec![64, 64],
        }
    }
}

impl DdpgConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!("ddpg.gamma must lie in [0,1], got {}", self.gamma)));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::Config(format!("ddpg.tau must lie in (0,1), got {}", self.tau)));
        }
        if !(self.actor_lr > 0.0 && self.critic_lr > 0.0) {
            return Err(Error::Config("ddpg learning rates must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("ddpg.batch_size must be positive".into()));
        }
        if self.ou_sigma < 0.0 || self.ou_theta < 0.0 {
            return Err(Error::Config("ddpg OU parameters must be non-negative".into()));
        }
        Ok(())
    }
}

/// `clip(μ(s) + n, low, high)` after advancing the noise process one step.
pub fn ddpg_act(
    actor: &Mlp,
    input: &[f64],
    noise: &mut OuNoise,
    rng: &mut Rng,
    low: f64,
    high: f64,
) -> Result<Vec<f64>> {
    let mu = actor.predict(input)?;
    let n = noise.sample(rng);
    Ok(mu
        .iter()
        .zip(n)
        .map(|(m, e)| (m + e).clamp(low, high))
        .collect())
}

/// Critic input rows `[state; action / action_scale]`.
fn critic_input(states: ArrayView2<'_, f64>, actions: ArrayView2<'_, f64>, action_scale: f64) -> Result<Array2<f64>> {
    let scaled = actions.mapv(|a| a / action_scale);
    let joined = concatenate(Axis(1), &[states.view(), scaled.view()]);
    joined.map_err(|e| Error::Integrity(e.to_string()))
}

#[derive(Debug, Clone)]
pub struct DdpgBatch {
    pub states: Array2<f64>,
    pub actions: Array2<f64>,
    pub rewards: Vec<f64>,
    pub next_states: Array2<f64>,
    pub dones: Vec<bool>,
    pub weights: Vec<f64>,
}

impl DdpgBatch {
    pub fn from_samples(encoder: &Encoder, samples: &[Sample<'_>], action_dim: usize) -> Result<Self> {
        let mut actions = Vec::with_capacity(samples.len() * action_dim);
        for s in samples {
            let a = s
                .transition
                .action
                .as_continuous()
                .ok_or_else(|| Error::Config("DDPG needs continuous actions".into()))?;
            if a.len() != action_dim {
                return Err(Error::shape(action_dim, a.len(), "action"));
            }
            actions.extend_from_slice(a);
        }
        Ok(DdpgBatch {
            states: encoder.encode_batch(samples, false)?,
            actions: Array2::from_shape_vec((samples.len(), action_dim), actions)
                .map_err(|e| Error::Integrity(e.to_string()))?,
            rewards: samples.iter().map(|s| s.transition.reward).collect(),
            next_states: encoder.encode_batch(samples, true)?,
            dones: samples.iter().map(|s| s.transition.done).collect(),
            weights: samples.iter().map(|s| s.weight).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }
}

/// Weighted squared-TD step on the critic against
/// `y = r + γ·Q'(s', μ'(s'))` (just `r` when terminal). Returns
/// `δ = Q(s, a) − y` under the pre-update critic.
pub fn ddpg_critic_update(
    critic: &mut Mlp,
    critic_target: &Mlp,
    actor_target: &Mlp,
    adam: &mut AdamState,
    batch: &DdpgBatch,
    gamma: f64,
    action_scale: f64,
) -> Result<Vec<f64>> {
    let n = batch.len();
    if n == 0 {
        return Err(Error::Config("empty training batch".into()));
    }
    let (next_actions, _) = actor_target.forward_batch(batch.next_states.view())?;
    let next_in = critic_input(batch.next_states.view(), next_actions.view(), action_scale)?;
    let (q_next, _) = critic_target.forward_batch(next_in.view())?;
    let input = critic_input(batch.states.view(), batch.actions.view(), action_scale)?;
    let (q, cache) = critic.forward_batch(input.view())?;
    let mut grad_out = Array2::zeros((n, 1));
    let mut td = Vec::with_capacity(n);
    for i in 0..n {
        let y = if batch.dones[i] {
            batch.rewards[i]
        } else {
            batch.rewards[i] + gamma * q_next[[i, 0]]
        };
        let delta = q[[i, 0]] - y;
        td.push(delta);
        grad_out[[i, 0]] = 2.0 * batch.weights[i] * delta / n as f64;
    }
    check_divergence(&td, "DDPG critic")?;
    let (grads, _) = critic.backward(&cache, grad_out.view())?;
    adam.step(critic, &grads)?;
    Ok(td)
}

/// Gradient of `mean_i Q(s_i, μ(s_i))` with respect to the actor's
/// parameters, chaining the critic's action gradient through the actor.
pub fn actor_objective_gradient(
    actor: &Mlp,
    critic: &Mlp,
    states: ArrayView2<'_, f64>,
    action_scale: f64,
) -> Result<Gradients> {
    let n = states.nrows();
    if n == 0 {
        return Err(Error::Config("empty training batch".into()));
    }
    let state_dim = states.ncols();
    let (actions, actor_cache) = actor.forward_batch(states)?;
    let input = critic_input(states, actions.view(), action_scale)?;
    if input.ncols() != critic.input_dim() {
        return Err(Error::shape(critic.input_dim(), input.ncols(), "critic input"));
    }
    let (_, critic_cache) = critic.forward_batch(input.view())?;
    let dq = Array2::from_elem((n, 1), 1.0 / n as f64);
    let (_, d_input) = critic.backward(&critic_cache, dq.view())?;
    let d_action = d_input.slice(s![.., state_dim..]).mapv(|g| g / action_scale);
    let (grads, _) = actor.backward(&actor_cache, d_action.view())?;
    Ok(grads)
}

/// One ascent step on `mean Q(s, μ(s))`.
pub fn ddpg_actor_update(
    actor: &mut Mlp,
    critic: &Mlp,
    adam: &mut AdamState,
    states: ArrayView2<'_, f64>,
    action_scale: f64,
) -> Result<()> {
    let mut grads = actor_objective_gradient(actor, critic, states, action_scale)?;
    grads.scale(-1.0);
    adam.step(actor, &grads)
}

#[derive(Debug, Clone)]
pub struct DdpgAgent {
    pub actor: Mlp,
    pub actor_target: Mlp,
    pub critic: Mlp,
    pub critic_target: Mlp,
    pub actor_adam: AdamState,
    pub critic_adam: AdamState,
    pub cfg: DdpgConfig,
    pub encoder: Encoder,
    pub noise: OuNoise,
    low: f64,
    high: f64,
    action_dim: usize,
}

impl DdpgAgent {
    /// Actor outputs are `high·tanh(·)`, so the action range is assumed
    /// symmetric.
    pub fn new(
        cfg: DdpgConfig,
        encoder: Encoder,
        action_dim: usize,
        low: f64,
        high: f64,
        rng: &mut Rng,
    ) -> Result<Self> {
        cfg.validate()?;
        if !(high > 0.0) || low != -high {
            return Err(Error::Config(format!("DDPG needs a symmetric action range, got [{low}, {high}]")));
        }
        let input_dim = encoder.input_dim();
        let mut actor_sizes = vec![input_dim];
        actor_sizes.extend(&cfg.hidden);
        actor_sizes.push(action_dim);
        let actor = Mlp::with_final_scale(&actor_sizes, Activation::Relu, OutputActivation::ScaledTanh(high), 1e-3, rng)?;
        let mut critic_sizes = vec![input_dim + action_dim];
        critic_sizes.extend(&cfg.hidden);
        critic_sizes.push(1);
        let critic = Mlp::new(&critic_sizes, Activation::Relu, OutputActivation::Identity, rng)?;
        Ok(DdpgAgent {
            actor_target: actor.clone(),
            critic_target: critic.clone(),
            actor_adam: AdamState::new(&actor, cfg.actor_lr),
            critic_adam: AdamState::new(&critic, cfg.critic_lr),
            noise: OuNoise::new(action_dim, cfg.ou_theta, cfg.ou_sigma, cfg.ou_mu),
            actor,
            critic,
            cfg,
            encoder,
            low,
            high,
            action_dim,
        })
    }

    pub fn action_bounds(&self) -> (f64, f64) {
        (self.low, self.high)
    }

    pub fn begin_episode(&mut self) {
        self.noise.reset();
    }

    /// Noisy action when exploring, the deterministic policy otherwise.
    pub fn act(&mut self, state: &[f64], goal: Option<&[f64]>, explore: bool, rng: &mut Rng) -> Result<Vec<f64>> {
        let input = self.encoder.encode(state, goal)?;
        if explore {
            ddpg_act(&self.actor, &input, &mut self.noise, rng, self.low, self.high)
        } else {
            Ok(self.actor.predict(&input)?.iter().map(|a| a.clamp(self.low, self.high)).collect())
        }
    }

    /// Critic step, actor step, then soft target updates.
    pub fn learn(&mut self, samples: &[Sample<'_>]) -> Result<Vec<f64>> {
        let batch = DdpgBatch::from_samples(&self.encoder, samples, self.action_dim)?;
        let td = ddpg_critic_update(
            &mut self.critic,
            &self.critic_target,
            &self.actor_target,
            &mut self.critic_adam,
            &batch,
            self.cfg.gamma,
            self.high,
        )?;
        ddpg_actor_update(&mut self.actor, &self.critic, &mut self.actor_adam, batch.states.view(), self.high)?;
        self.sync_targets()?;
        Ok(td)
    }

    pub fn sync_targets(&mut self) -> Result<()> {
        self.actor_target.soft_update_from(&self.actor, self.cfg.tau)?;
        self.critic_target.soft_update_from(&self.critic, self.cfg.tau)
    }
}
