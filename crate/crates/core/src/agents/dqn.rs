use ndarray::{Array2, ArrayView2};
use rand::Rng as _;

use super::{check_divergence, Encoder};
use crate::error::{Error, Result};
use crate::nn::{Activation, AdamState, Mlp, OutputActivation};
use crate::replay::Sample;
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct DqnConfig {
    pub gamma: f64,
    pub eps_start: f64,
    pub eps_end: f64,
    /// Environment steps over which epsilon decays linearly.
    pub eps_decay_steps: u64,
    /// Gradient updates between hard target copies.
    pub target_period: u64,
    pub batch_size: usize,
    pub lr: f64,
    pub warmup: usize,
    pub buffer_capacity: usize,
    pub hidden: Vec<usize>,
}

impl Default for DqnConfig {
    fn default() -> Self {
        DqnConfig {
            gamma: 0.99,
            eps_start: 1.0,
            eps_end: 0.05,
            eps_decay_steps: 10_000,
            target_period: 500,
            batch_size: 32,
            lr: 1e-3,
            warmup: 1000,
            buffer_capacity: 50_000,
            hidden: vec![64, 64],
        }
    }
}

impl DqnConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!("dqn.gamma must lie in [0,1], got {}", self.gamma)));
        }
        if !(0.0..=1.0).contains(&self.eps_start) || !(0.0..=1.0).contains(&self.eps_end) {
            return Err(Error::Config("dqn epsilon values must lie in [0,1]".into()));
        }
        if self.eps_end > self.eps_start {
            return Err(Error::Config("dqn.eps_end must not exceed dqn.eps_start".into()));
        }
        if self.target_period == 0 || self.batch_size == 0 {
            return Err(Error::Config("dqn.target_period and dqn.batch_size must be positive".into()));
        }
        if !(self.lr > 0.0) {
            return Err(Error::Config("dqn.lr must be positive".into()));
        }
        Ok(())
    }

    /// Linearly decayed exploration rate after `steps` environment steps.
    pub fn epsilon(&self, steps: u64) -> f64 {
        if self.eps_decay_steps == 0 {
            return self.eps_end;
        }
        if steps >= self.eps_decay_steps {
            return self.eps_end;
        }
        let frac = steps as f64 / self.eps_decay_steps as f64;
        self.eps_start + (self.eps_end - self.eps_start) * frac
    }
}

/// Index of the largest value; ties go to the lowest index.
fn argmax(q: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in q.iter().enumerate().skip(1) {
        if v > q[best] {
            best = i;
        }
    }
    best
}

/// Epsilon-greedy action for an encoded input.
pub fn dqn_act(net: &Mlp, input: &[f64], epsilon: f64, rng: &mut Rng) -> Result<usize> {
    let n = net.output_dim();
    if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
        return Ok(rng.gen_range(0..n));
    }
    Ok(argmax(&net.predict(input)?))
}

/// `r` for terminal transitions, `r + γ·max_a' Q_target(s', a')` otherwise.
pub fn dqn_td_target(target: &Mlp, next_input: &[f64], reward: f64, done: bool, gamma: f64) -> Result<f64> {
    if done {
        return Ok(reward);
    }
    let q = target.predict(next_input)?;
    let max = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(reward + gamma * max)
}

/// Encoded training batch.
#[derive(Debug, Clone)]
pub struct DqnBatch {
    pub states: Array2<f64>,
    pub actions: Vec<usize>,
    pub rewards: Vec<f64>,
    pub next_states: Array2<f64>,
    pub dones: Vec<bool>,
    pub weights: Vec<f64>,
}

impl DqnBatch {
    pub fn from_samples(encoder: &Encoder, samples: &[Sample<'_>]) -> Result<Self> {
        let actions = samples
            .iter()
            .map(|s| {
                s.transition
                    .action
                    .as_discrete()
                    .ok_or_else(|| Error::Config("DQN needs discrete actions".into()))
            })
            .collect::<Result<_>>()?;
        Ok(DqnBatch {
            states: encoder.encode_batch(samples, false)?,
            actions,
            rewards: samples.iter().map(|s| s.transition.reward).collect(),
            next_states: encoder.encode_batch(samples, true)?,
            dones: samples.iter().map(|s| s.transition.done).collect(),
            weights: samples.iter().map(|s| s.weight).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// Batched bootstrap targets under `target`.
pub fn dqn_targets(target: &Mlp, next_states: ArrayView2<'_, f64>, rewards: &[f64], dones: &[bool], gamma: f64) -> Result<Vec<f64>> {
    let (q_next, _) = target.forward_batch(next_states)?;
    Ok(q_next
        .rows()
        .into_iter()
        .zip(rewards.iter().zip(dones))
        .map(|(row, (&r, &done))| {
            if done {
                r
            } else {
                r + gamma * row.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            }
        })
        .collect())
}

/// One optimizer step on `mean_i w_i·(Q(s_i, a_i) − y_i)²`. Returns
/// `δ_i = Q(s_i, a_i) − y_i` under the pre-update parameters.
pub fn dqn_update(
    online: &mut Mlp,
    target: &Mlp,
    adam: &mut AdamState,
    batch: &DqnBatch,
    gamma: f64,
) -> Result<Vec<f64>> {
    let n = batch.len();
    if n == 0 {
        return Err(Error::Config("empty training batch".into()));
    }
    if batch.weights.len() != n {
        return Err(Error::shape(n, batch.weights.len(), "importance weights"));
    }
    let targets = dqn_targets(target, batch.next_states.view(), &batch.rewards, &batch.dones, gamma)?;
    let (q, cache) = online.forward_batch(batch.states.view())?;
    let n_actions = q.ncols();
    let mut grad_out = Array2::zeros(q.dim());
    let mut td = Vec::with_capacity(n);
    for (i, (&a, &y)) in batch.actions.iter().zip(&targets).enumerate() {
        if a >= n_actions {
            return Err(Error::Bounds { index: a, len: n_actions });
        }
        let delta = q[[i, a]] - y;
        td.push(delta);
        grad_out[[i, a]] = 2.0 * batch.weights[i] * delta / n as f64;
    }
    check_divergence(&td, "DQN")?;
    let (grads, _) = online.backward(&cache, grad_out.view())?;
    adam.step(online, &grads)?;
    Ok(td)
}

/// Online and target Q-networks with their optimizer and schedule.
#[derive(Debug, Clone)]
pub struct DqnAgent {
    pub online: Mlp,
    pub target: Mlp,
    pub adam: AdamState,
    pub cfg: DqnConfig,
    pub encoder: Encoder,
    updates: u64,
}

impl DqnAgent {
    pub fn new(cfg: DqnConfig, encoder: Encoder, n_actions: usize, rng: &mut Rng) -> Result<Self> {
        cfg.validate()?;
        let mut sizes = vec![encoder.input_dim()];
        sizes.extend(&cfg.hidden);
        sizes.push(n_actions);
        let online = Mlp::new(&sizes, Activation::Relu, OutputActivation::Identity, rng)?;
        Self::from_network(cfg, encoder, online)
    }

    pub fn from_network(cfg: DqnConfig, encoder: Encoder, online: Mlp) -> Result<Self> {
        if online.input_dim() != encoder.input_dim() {
            return Err(Error::shape(encoder.input_dim(), online.input_dim(), "Q-network input"));
        }
        let target = online.clone();
        let adam = AdamState::new(&online, cfg.lr);
        Ok(DqnAgent {
            online,
            target,
            adam,
            cfg,
            encoder,
            updates: 0,
        })
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn act(&self, state: &[f64], goal: Option<&[f64]>, epsilon: f64, rng: &mut Rng) -> Result<usize> {
        let input = self.encoder.encode(state, goal)?;
        dqn_act(&self.online, &input, epsilon, rng)
    }

    /// One gradient step followed by the target schedule: the target network
    /// is hard-copied after every `target_period`-th update.
    pub fn learn(&mut self, samples: &[Sample<'_>]) -> Result<Vec<f64>> {
        let batch = DqnBatch::from_samples(&self.encoder, samples)?;
        let td = dqn_update(&mut self.online, &self.target, &mut self.adam, &batch, self.cfg.gamma)?;
        self.updates += 1;
        self.sync_target();
        Ok(td)
    }

    pub fn sync_target(&mut self) {
        if self.updates.is_multiple_of(self.cfg.target_period) {
            self.target.clone_from(&self.online);
        }
    }
}
