use std::time::Instant;

use super::config::{AgentKind, RunConfig};
use super::policy::{evaluate, EvalStats, Policy};
use crate::agents::{DdpgAgent, DqnAgent, Encoder};
use crate::envs::{ActionSpace, EnvSpec, Environment};
use crate::error::{Error, Result};
use crate::hindsight::{goal_spec_for, relabel_episode, Episode, GoalSpec};
use crate::replay::{Action, ReplayStack, Transition};
use crate::rng::{stream, Rng, Stream};

/// One line of the training log.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainRecord {
    /// 1-based episode number.
    pub episode: usize,
    pub train_reward: f64,
    /// Set on episodes followed by an evaluation.
    pub eval: Option<EvalStats>,
    /// Environment steps taken so far.
    pub steps: u64,
    pub wallclock_ms: u64,
}

/// Bookkeeping gathered while training, used by tests and diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    pub batches: u64,
    /// Batches whose first entry was the newest stored transition with
    /// weight 1.
    pub batches_led_by_latest: u64,
    /// `(episode length, transitions stored for it)` per episode.
    pub storage: Vec<(usize, usize)>,
    pub updates: u64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub records: Vec<TrainRecord>,
    pub converged_at: Option<usize>,
    pub policy: Policy,
    pub stats: RunStats,
}

// One per run, so the variant size gap does not matter.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone)]
enum Learner {
    Dqn(DqnAgent),
    Ddpg(DdpgAgent),
}

/// Environment, agent and replay stack wired together for one run.
pub struct Experiment {
    cfg: RunConfig,
    spec: EnvSpec,
    env: Box<dyn Environment>,
    learner: Learner,
    stack: ReplayStack,
    goals: Option<Box<dyn GoalSpec>>,
    env_rng: Rng,
    explore_rng: Rng,
    sample_rng: Rng,
    eval_rng: Rng,
}

/// Validates `cfg` and assembles the run.
pub fn build_run(cfg: RunConfig) -> Result<Experiment> {
    cfg.validate()?;
    let spec = cfg.env.spec();
    let encoder = Encoder::new(&spec, cfg.flags.hindsight)?;
    let mut init_rng = stream(cfg.seed, Stream::Init);
    let learner = match (cfg.agent, &spec.action_space) {
        (AgentKind::Dqn, ActionSpace::Discrete(n)) => Learner::Dqn(DqnAgent::new(cfg.dqn.clone(), encoder, *n, &mut init_rng)?),
        (AgentKind::Ddpg, ActionSpace::Continuous { dim, low, high }) => {
            Learner::Ddpg(DdpgAgent::new(cfg.ddpg.clone(), encoder, *dim, *low, *high, &mut init_rng)?)
        }
        _ => unreachable!("validated above"),
    };
    let per = cfg.flags.prioritized.then_some(cfg.per);
    let stack = ReplayStack::new(cfg.buffer_capacity(), cfg.flags.combined, per)?;
    let goals = if cfg.flags.hindsight {
        Some(goal_spec_for(cfg.env, cfg.her_tolerance)?)
    } else {
        None
    };
    Ok(Experiment {
        env: cfg.env.make(),
        spec,
        learner,
        stack,
        goals,
        env_rng: stream(cfg.seed, Stream::Env),
        explore_rng: stream(cfg.seed, Stream::Explore),
        sample_rng: stream(cfg.seed, Stream::Sample),
        eval_rng: stream(cfg.seed, Stream::Eval),
        cfg,
    })
}

impl Experiment {
    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    pub fn stack(&self) -> &ReplayStack {
        &self.stack
    }

    /// Input width of the agent's networks.
    pub fn network_input_dim(&self) -> usize {
        match &self.learner {
            Learner::Dqn(a) => a.online.input_dim(),
            Learner::Ddpg(a) => a.actor.input_dim(),
        }
    }

    /// Snapshot of the current acting network.
    pub fn policy(&self) -> Result<Policy> {
        let net = match &self.learner {
            Learner::Dqn(a) => a.online.clone(),
            Learner::Ddpg(a) => a.actor.clone(),
        };
        Policy::new(self.cfg.env, self.cfg.agent, self.cfg.flags.hindsight, net)
    }

    fn exploring_action(&mut self, state: &[f64], goal: Option<&[f64]>, steps: u64) -> Result<Action> {
        match &mut self.learner {
            Learner::Dqn(a) => {
                let eps = a.cfg.epsilon(steps);
                Ok(Action::Discrete(a.act(state, goal, eps, &mut self.explore_rng)?))
            }
            Learner::Ddpg(a) => Ok(Action::Continuous(a.act(state, goal, true, &mut self.explore_rng)?)),
        }
    }

    fn learn_step(&mut self, stats: &mut RunStats) -> Result<()> {
        let batch = self.cfg.batch_size();
        if self.stack.len() < self.cfg.warmup().max(batch) {
            return Ok(());
        }
        let samples = self.stack.sample(batch, &mut self.sample_rng)?;
        stats.batches += 1;
        let latest = self.stack.buffer().latest_index();
        if samples.first().is_some_and(|s| Some(s.index) == latest && s.weight == 1.0) {
            stats.batches_led_by_latest += 1;
        }
        let td = match &mut self.learner {
            Learner::Dqn(a) => a.learn(&samples)?,
            Learner::Ddpg(a) => a.learn(&samples)?,
        };
        let indices: Vec<usize> = samples.iter().map(|s| s.index).collect();
        stats.updates += 1;
        self.stack.update_priorities(&indices, &td)
    }

    /// Plays one training episode; returns its reward and length.
    fn episode(&mut self, total_steps: &mut u64, stats: &mut RunStats) -> Result<(f64, usize)> {
        if let Learner::Ddpg(a) = &mut self.learner {
            a.begin_episode();
        }
        let goal = self.goals.as_ref().map(|g| g.native_goal());
        let mut state = self.env.reset(&mut self.env_rng);
        let mut trajectory = Vec::new();
        let mut reward_sum = 0.0;
        let mut len = 0;
        loop {
            let action = self.exploring_action(&state, goal.as_deref(), *total_steps)?;
            let r = self.env.step(&action)?;
            *total_steps += 1;
            len += 1;
            reward_sum += r.reward;
            let mut t = Transition::new(state, action, r.reward, r.next_state.clone(), r.done);
            if let Some(g) = &goal {
                t = t.with_goal(g.clone());
            }
            if self.goals.is_some() {
                trajectory.push(t.clone());
            }
            self.stack.push(t)?;
            self.learn_step(stats)?;
            if r.episode_over() {
                break;
            }
            state = r.next_state;
        }
        let mut stored = len;
        if let Some(spec) = &self.goals {
            let episode = Episode::new(trajectory)?;
            let relabeled = relabel_episode(&episode, spec.as_ref());
            for t in relabeled.into_iter().skip(len) {
                self.stack.push(t)?;
                stored += 1;
            }
        }
        stats.storage.push((len, stored));
        Ok((reward_sum, len))
    }
}

/// Trains until the episode limit or, if enabled, convergence.
pub fn train(exp: Experiment) -> Result<TrainOutcome> {
    train_with(exp, |_| {})
}

/// Like [`train`], calling `observe` after every episode.
pub fn train_with(mut exp: Experiment, mut observe: impl FnMut(&TrainRecord)) -> Result<TrainOutcome> {
    let start = Instant::now();
    let threshold = exp.cfg.solve_threshold();
    let mut stats = RunStats::default();
    let mut records = Vec::with_capacity(exp.cfg.episodes);
    let mut converged_at = None;
    let mut steps = 0u64;
    for episode in 1..=exp.cfg.episodes {
        let (train_reward, _) = exp
            .episode(&mut steps, &mut stats)
            .map_err(|e| with_episode(e, episode))?;
        let eval = if exp.cfg.eval_interval > 0 && episode % exp.cfg.eval_interval == 0 {
            let policy = exp.policy()?;
            Some(evaluate(&policy, exp.cfg.eval_episodes, &mut exp.eval_rng, exp.cfg.eval_threads)?)
        } else {
            None
        };
        let record = TrainRecord {
            episode,
            train_reward,
            eval,
            steps,
            wallclock_ms: if exp.cfg.log_wallclock { start.elapsed().as_millis() as u64 } else { 0 },
        };
        observe(&record);
        records.push(record);
        if converged_at.is_none() {
            converged_at = first_reaching(&records[records.len() - 1..], threshold);
        }
        if converged_at.is_some() && exp.cfg.stop_on_convergence {
            break;
        }
    }
    Ok(TrainOutcome {
        policy: exp.policy()?,
        records,
        converged_at,
        stats,
    })
}

fn with_episode(e: Error, episode: usize) -> Error {
    match e {
        Error::Numerical(m) => Error::Numerical(format!("episode {episode}: {m}")),
        other => other,
    }
}

/// First episode whose evaluation mean reaches the environment's solve
/// threshold; `None` for environments without one.
pub fn check_convergence(records: &[TrainRecord], spec: &EnvSpec) -> Option<usize> {
    first_reaching(records, spec.solve_reward)
}

pub fn first_reaching(records: &[TrainRecord], threshold: Option<f64>) -> Option<usize> {
    let threshold = threshold?;
    records
        .iter()
        .find(|r| r.eval.is_some_and(|e| e.mean >= threshold))
        .map(|r| r.episode)
}
