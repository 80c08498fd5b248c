use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use crate::agents::{DdpgConfig, DqnConfig};
use crate::envs::{ActionSpace, EnvKind};
use crate::error::{Error, Result};
use crate::prioritized::PerConfig;
use crate::replay::StrategyFlags;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentKind {
    Dqn,
    Ddpg,
}

impl AgentKind {
    pub fn name(&self) -> &'static str {
        match self {
            AgentKind::Dqn => "dqn",
            AgentKind::Ddpg => "ddpg",
        }
    }

    /// The agent that fits the environment's action space.
    pub fn default_for(env: EnvKind) -> Self {
        match env.spec().action_space {
            ActionSpace::Discrete(_) => AgentKind::Dqn,
            ActionSpace::Continuous { .. } => AgentKind::Ddpg,
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dqn" => Ok(AgentKind::Dqn),
            "ddpg" => Ok(AgentKind::Ddpg),
            other => Err(Error::Config(format!("unknown agent `{other}` (expected dqn or ddpg)"))),
        }
    }
}

/// Everything that determines a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub env: EnvKind,
    pub agent: AgentKind,
    pub flags: StrategyFlags,
    pub seed: u64,
    pub episodes: usize,
    /// Training episodes between evaluations; 0 disables evaluation.
    pub eval_interval: usize,
    pub eval_episodes: usize,
    /// Worker threads for evaluation episodes. Results do not depend on it.
    pub eval_threads: usize,
    pub stop_on_convergence: bool,
    /// Overrides the environment's solve threshold.
    pub solve_reward: Option<f64>,
    /// When false the wall-clock column is written as 0 so logs are
    /// reproducible byte for byte.
    pub log_wallclock: bool,
    /// Overrides the environment's default goal tolerance.
    pub her_tolerance: Option<f64>,
    pub dqn: DqnConfig,
    pub ddpg: DdpgConfig,
    pub per: PerConfig,
}

impl RunConfig {
    pub fn new(env: EnvKind, agent: AgentKind) -> Self {
        RunConfig {
            env,
            agent,
            flags: StrategyFlags::default(),
            seed: 0,
            episodes: 1000,
            eval_interval: 50,
            eval_episodes: 100,
            eval_threads: 1,
            stop_on_convergence: true,
            solve_reward: None,
            log_wallclock: false,
            her_tolerance: None,
            dqn: DqnConfig::default(),
            ddpg: DdpgConfig::default(),
            per: PerConfig::default(),
        }
    }

    pub fn with_flags(mut self, flags: StrategyFlags) -> Self {
        self.flags = flags;
        self
    }

    /// Rejects strategy/agent/environment pairings that cannot run.
    pub fn validate(&self) -> Result<()> {
        let spec = self.env.spec();
        if self.flags.hindsight && spec.goal_dim.is_none() {
            return Err(Error::Config(format!("hindsight=true conflicts with env={}: no goal space", self.env)));
        }
        match (self.agent, &spec.action_space) {
            (AgentKind::Dqn, ActionSpace::Continuous { .. }) => {
                return Err(Error::Config(format!("agent=dqn conflicts with env={}: continuous actions", self.env)));
            }
            (AgentKind::Ddpg, ActionSpace::Discrete(_)) => {
                return Err(Error::Config(format!("agent=ddpg conflicts with env={}: discrete actions", self.env)));
            }
            _ => {}
        }
        if self.eval_interval > 0 && self.eval_episodes == 0 {
            return Err(Error::Config("eval_episodes must be positive when evaluation is on".into()));
        }
        if let Some(t) = self.her_tolerance {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("her_tolerance must be a non-negative number, got {t}")));
            }
        }
        match self.agent {
            AgentKind::Dqn => self.dqn.validate()?,
            AgentKind::Ddpg => self.ddpg.validate()?,
        }
        if self.flags.prioritized {
            self.per.validate()?;
        }
        Ok(())
    }

    pub fn solve_threshold(&self) -> Option<f64> {
        self.solve_reward.or(self.env.spec().solve_reward)
    }

    pub fn batch_size(&self) -> usize {
        match self.agent {
            AgentKind::Dqn => self.dqn.batch_size,
            AgentKind::Ddpg => self.ddpg.batch_size,
        }
    }

    pub fn warmup(&self) -> usize {
        match self.agent {
            AgentKind::Dqn => self.dqn.warmup,
            AgentKind::Ddpg => self.ddpg.warmup,
        }
    }

    pub fn buffer_capacity(&self) -> usize {
        match self.agent {
            AgentKind::Dqn => self.dqn.buffer_capacity,
            AgentKind::Ddpg => self.ddpg.buffer_capacity,
        }
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "env" => self.env = v.parse()?,
            "agent" => self.agent = v.parse()?,
            "combined" => self.flags.combined = parse(key, v)?,
            "prioritized" => self.flags.prioritized = parse(key, v)?,
            "hindsight" => self.flags.hindsight = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "episodes" => self.episodes = parse(key, v)?,
            "eval_interval" => self.eval_interval = parse(key, v)?,
            "eval_episodes" => self.eval_episodes = parse(key, v)?,
            "eval_threads" => self.eval_threads = parse(key, v)?,
            "stop_on_convergence" => self.stop_on_convergence = parse(key, v)?,
            "solve_reward" => self.solve_reward = parse_opt(key, v)?,
            "log_wallclock" => self.log_wallclock = parse(key, v)?,
            "her_tolerance" => self.her_tolerance = parse_opt(key, v)?,
            "dqn.gamma" => self.dqn.gamma = parse(key, v)?,
            "dqn.eps_start" => self.dqn.eps_start = parse(key, v)?,
            "dqn.eps_end" => self.dqn.eps_end = parse(key, v)?,
            "dqn.eps_decay_steps" => self.dqn.eps_decay_steps = parse(key, v)?,
            "dqn.target_period" => self.dqn.target_period = parse(key, v)?,
            "dqn.batch_size" => self.dqn.batch_size = parse(key, v)?,
            "dqn.lr" => self.dqn.lr = parse(key, v)?,
            "dqn.warmup" => self.dqn.warmup = parse(key, v)?,
            "dqn.buffer_capacity" => self.dqn.buffer_capacity = parse(key, v)?,
            "dqn.hidden" => self.dqn.hidden = parse_list(key, v)?,
            "ddpg.gamma" => self.ddpg.gamma = parse(key, v)?,
            "ddpg.tau" => self.ddpg.tau = parse(key, v)?,
            "ddpg.actor_lr" => self.ddpg.actor_lr = parse(key, v)?,
            "ddpg.critic_lr" => self.ddpg.critic_lr = parse(key, v)?,
            "ddpg.ou_theta" => self.ddpg.ou_theta = parse(key, v)?,
            "ddpg.ou_sigma" => self.ddpg.ou_sigma = parse(key, v)?,
            "ddpg.ou_mu" => self.ddpg.ou_mu = parse(key, v)?,
            "ddpg.batch_size" => self.ddpg.batch_size = parse(key, v)?,
            "ddpg.warmup" => self.ddpg.warmup = parse(key, v)?,
            "ddpg.buffer_capacity" => self.ddpg.buffer_capacity = parse(key, v)?,
            "ddpg.hidden" => self.ddpg.hidden = parse_list(key, v)?,
            "per.alpha" => self.per.alpha = parse(key, v)?,
            "per.beta" => self.per.beta = parse(key, v)?,
            "per.epsilon" => self.per.epsilon = parse(key, v)?,
            "per.max_priority_init" => self.per.max_priority_init = parse(key, v)?,
            other => return Err(Error::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a `key = value` text, one setting per line. Blank lines and
    /// `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value, got `{line}`", n + 1)))?;
            self.set(k, v)
                .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    /// Parses a complete config; `env` and `agent` default to cartpole and
    /// the agent suited to the environment.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut env = EnvKind::CartPole;
        let mut agent = None;
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            match line.split_once('=').map(|(k, v)| (k.trim(), v)) {
                Some(("env", v)) => env = v.trim().parse()?,
                Some(("agent", v)) => agent = Some(v.trim().parse()?),
                _ => {}
            }
        }
        let mut cfg = RunConfig::new(env, agent.unwrap_or_else(|| AgentKind::default_for(env)));
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Every effective setting as `key=value` lines, readable by
    /// [`RunConfig::from_text`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: &dyn fmt::Display| {
            let _ = writeln!(s, "{k}={v}");
        };
        kv("env", &self.env);
        kv("agent", &self.agent);
        kv("combined", &self.flags.combined);
        kv("prioritized", &self.flags.prioritized);
        kv("hindsight", &self.flags.hindsight);
        kv("seed", &self.seed);
        kv("episodes", &self.episodes);
        kv("eval_interval", &self.eval_interval);
        kv("eval_episodes", &self.eval_episodes);
        kv("eval_threads", &self.eval_threads);
        kv("stop_on_convergence", &self.stop_on_convergence);
        kv("solve_reward", &OptDisplay(self.solve_reward));
        kv("log_wallclock", &self.log_wallclock);
        kv("her_tolerance", &OptDisplay(self.her_tolerance));
        let d = &self.dqn;
        kv("dqn.gamma", &d.gamma);
        kv("dqn.eps_start", &d.eps_start);
        kv("dqn.eps_end", &d.eps_end);
        kv("dqn.eps_decay_steps", &d.eps_decay_steps);
        kv("dqn.target_period", &d.target_period);
        kv("dqn.batch_size", &d.batch_size);
        kv("dqn.lr", &d.lr);
        kv("dqn.warmup", &d.warmup);
        kv("dqn.buffer_capacity", &d.buffer_capacity);
        kv("dqn.hidden", &ListDisplay(&d.hidden));
        let g = &self.ddpg;
        kv("ddpg.gamma", &g.gamma);
        kv("ddpg.tau", &g.tau);
        kv("ddpg.actor_lr", &g.actor_lr);
        kv("ddpg.critic_lr", &g.critic_lr);
        kv("ddpg.ou_theta", &g.ou_theta);
        kv("ddpg.ou_sigma", &g.ou_sigma);
        kv("ddpg.ou_mu", &g.ou_mu);
        kv("ddpg.batch_size", &g.batch_size);
        kv("ddpg.warmup", &g.warmup);
        kv("ddpg.buffer_capacity", &g.buffer_capacity);
        kv("ddpg.hidden", &ListDisplay(&g.hidden));
        let p = &self.per;
        kv("per.alpha", &p.alpha);
        kv("per.beta", &p.beta);
        kv("per.epsilon", &p.epsilon);
        kv("per.max_priority_init", &p.max_priority_init);
        s
    }
}

struct OptDisplay(Option<f64>);

impl fmt::Display for OptDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("none"),
        }
    }
}

struct ListDisplay<'a>(&'a [usize]);

impl fmt::Display for ListDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("invalid value `{v}` for `{}`", key.trim())))
}

fn parse_opt(key: &str, v: &str) -> Result<Option<f64>> {
    if v.eq_ignore_ascii_case("none") || v.is_empty() {
        Ok(None)
    } else {
        parse(key, v).map(Some)
    }
}

fn parse_list(key: &str, v: &str) -> Result<Vec<usize>> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|p| parse(key, p.trim())).collect()
}
