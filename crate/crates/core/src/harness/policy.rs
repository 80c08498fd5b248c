use std::thread;

use rand::Rng as _;

use super::config::AgentKind;
use crate::agents::Encoder;
use crate::envs::{ActionSpace, EnvKind};
use crate::error::{Error, Result};
use crate::hindsight::goal_spec_for;
use crate::nn::Mlp;
use crate::replay::Action;
use crate::rng::{seeded, Rng};

/// A frozen network that acts without exploration: greedy over Q-values for
/// DQN, the clipped deterministic actor output for DDPG.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub env: EnvKind,
    pub agent: AgentKind,
    pub hindsight: bool,
    net: Mlp,
    encoder: Encoder,
    goal: Option<Vec<f64>>,
}

impl Policy {
    pub fn new(env: EnvKind, agent: AgentKind, hindsight: bool, net: Mlp) -> Result<Self> {
        let spec = env.spec();
        let encoder = Encoder::new(&spec, hindsight)?;
        let goal = if hindsight {
            Some(goal_spec_for(env, None)?.native_goal())
        } else {
            None
        };
        if net.input_dim() != encoder.input_dim() {
            return Err(Error::shape(encoder.input_dim(), net.input_dim(), "policy network input"));
        }
        let out = match (agent, &spec.action_space) {
            (AgentKind::Dqn, ActionSpace::Discrete(n)) => *n,
            (AgentKind::Ddpg, ActionSpace::Continuous { dim, .. }) => *dim,
            _ => return Err(Error::Config(format!("agent={agent} cannot act in env={env}"))),
        };
        if net.output_dim() != out {
            return Err(Error::shape(out, net.output_dim(), "policy network output"));
        }
        Ok(Policy { env, agent, hindsight, net, encoder, goal })
    }

    pub fn network(&self) -> &Mlp {
        &self.net
    }

    /// The goal the policy is conditioned on, if any.
    pub fn goal(&self) -> Option<&[f64]> {
        self.goal.as_deref()
    }

    pub fn act(&self, state: &[f64]) -> Result<Action> {
        let input = self.encoder.encode(state, self.goal.as_deref())?;
        let out = self.net.predict(&input)?;
        match self.env.spec().action_space {
            ActionSpace::Discrete(_) => Ok(Action::Discrete(argmax(&out))),
            ActionSpace::Continuous { low, high, .. } => {
                Ok(Action::Continuous(out.iter().map(|a| a.clamp(low, high)).collect()))
            }
        }
    }

    /// Undiscounted return of one episode started from `seed`.
    pub fn run_episode(&self, seed: u64) -> Result<f64> {
        let mut env = self.env.make();
        let mut state = env.reset(&mut seeded(seed));
        let mut total = 0.0;
        loop {
            let r = env.step(&self.act(&state)?)?;
            total += r.reward;
            if r.episode_over() {
                return Ok(total);
            }
            state = r.next_state;
        }
    }
}

fn argmax(q: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in q.iter().enumerate() {
        if *v > q[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalStats {
    pub mean: f64,
    /// Population standard deviation of episode returns.
    pub std: f64,
}

impl EvalStats {
    pub fn from_returns(returns: &[f64]) -> Self {
        let n = returns.len().max(1) as f64;
        let mean = returns.iter().sum::<f64>() / n;
        let var = returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
        EvalStats { mean, std: var.sqrt() }
    }
}

/// Runs `episodes` exploration-free episodes. Episode seeds are drawn from
/// `rng` up front, so the result is the same for any thread count.
pub fn evaluate(policy: &Policy, episodes: usize, rng: &mut Rng, threads: usize) -> Result<EvalStats> {
    let seeds: Vec<u64> = (0..episodes).map(|_| rng.gen()).collect();
    evaluate_seeds(policy, &seeds, threads)
}

pub fn evaluate_seeds(policy: &Policy, seeds: &[u64], threads: usize) -> Result<EvalStats> {
    if seeds.is_empty() {
        return Err(Error::Config("evaluation needs at least one episode".into()));
    }
    let threads = threads.clamp(1, seeds.len());
    let returns: Vec<f64> = if threads == 1 {
        seeds.iter().map(|&s| policy.run_episode(s)).collect::<Result<_>>()?
    } else {
        let chunk = seeds.len().div_ceil(threads);
        thread::scope(|scope| {
            let handles: Vec<_> = seeds
                .chunks(chunk)
                .map(|part| scope.spawn(move || part.iter().map(|&s| policy.run_episode(s)).collect::<Result<Vec<_>>>()))
                .collect();
            let mut all = Vec::with_capacity(seeds.len());
            for h in handles {
                all.extend(h.join().map_err(|_| Error::Integrity("evaluation worker panicked".into()))??);
            }
            Ok::<_, Error>(all)
        })?
    };
    Ok(EvalStats::from_returns(&returns))
}
