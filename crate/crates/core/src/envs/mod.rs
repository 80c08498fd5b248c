//! Classic-control environments, reimplemented without external
//! dependencies. Dynamics follow the standard definitions of the named
//! tasks; randomness enters only through the generator passed to `reset`.

pub mod cartpole;
pub mod mountaincar;
pub mod pendulum;

use std::fmt;
use std::str::FromStr;

pub use cartpole::CartPole;
pub use mountaincar::MountainCar;
pub use pendulum::{angle_of, pendulum_reward, wrap_angle, Pendulum};

use crate::error::{Error, Result};
use crate::replay::Action;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvKind {
    CartPole,
    MountainCar,
    Pendulum,
}

impl EnvKind {
    pub const ALL: [EnvKind; 3] = [EnvKind::CartPole, EnvKind::MountainCar, EnvKind::Pendulum];

    pub fn name(&self) -> &'static str {
        match self {
            EnvKind::CartPole => "cartpole",
            EnvKind::MountainCar => "mountaincar",
            EnvKind::Pendulum => "pendulum",
        }
    }

    pub fn spec(&self) -> EnvSpec {
        match self {
            EnvKind::CartPole => cartpole::spec(),
            EnvKind::MountainCar => mountaincar::spec(),
            EnvKind::Pendulum => pendulum::spec(),
        }
    }

    pub fn make(&self) -> Box<dyn Environment> {
        match self {
            EnvKind::CartPole => Box::new(CartPole::new()),
            EnvKind::MountainCar => Box::new(MountainCar::new()),
            EnvKind::Pendulum => Box::new(Pendulum::new()),
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cartpole" => Ok(EnvKind::CartPole),
            "mountaincar" => Ok(EnvKind::MountainCar),
            "pendulum" => Ok(EnvKind::Pendulum),
            other => Err(Error::Config(format!(
                "unknown environment `{other}` (expected cartpole, mountaincar or pendulum)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActionSpace {
    Discrete(usize),
    Continuous { dim: usize, low: f64, high: f64 },
}

/// Fixed affine map `(x - center) / half_range` applied to observations and
/// goals before they reach a network.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaling {
    pub center: Vec<f64>,
    pub half_range: Vec<f64>,
}

impl Scaling {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.center.iter().zip(&self.half_range))
            .map(|(v, (c, h))| (v - c) / h)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvSpec {
    pub kind: EnvKind,
    pub obs_dim: usize,
    pub action_space: ActionSpace,
    pub max_episode_steps: usize,
    /// Evaluation mean at or above which the task counts as solved.
    pub solve_reward: Option<f64>,
    /// Goal dimension when hindsight relabeling is supported.
    pub goal_dim: Option<usize>,
    pub obs_scaling: Scaling,
    pub goal_scaling: Option<Scaling>,
}

impl EnvSpec {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub next_state: Vec<f64>,
    pub reward: f64,
    /// Task termination; stops bootstrapping.
    pub done: bool,
    /// Time limit reached without termination; bootstrapping continues.
    pub truncated: bool,
}

impl StepResult {
    pub fn episode_over(&self) -> bool {
        self.done || self.truncated
    }
}

pub trait Environment: Send {
    fn spec(&self) -> EnvSpec;

    fn reset(&mut self, rng: &mut Rng) -> Vec<f64>;

    fn step(&mut self, action: &Action) -> Result<StepResult>;

    fn observation(&self) -> Vec<f64>;
}

/// Goal achieved by `state`: cart position for MountainCar, pole angle for
/// Pendulum.
pub fn extract_achieved_goal(kind: EnvKind, state: &[f64]) -> Result<Vec<f64>> {
    let spec = kind.spec();
    if state.len() != spec.obs_dim {
        return Err(Error::shape(spec.obs_dim, state.len(), "observation"));
    }
    match kind {
        EnvKind::CartPole => Err(Error::UnsupportedGoal(kind.name().into())),
        EnvKind::MountainCar => Ok(vec![state[0]]),
        EnvKind::Pendulum => Ok(vec![angle_of(state)]),
    }
}

/// Tracks elapsed steps and whether the episode has ended.
#[derive(Debug, Clone, Default)]
pub(crate) struct EpisodeClock {
    pub steps: usize,
    pub finished: bool,
}

impl EpisodeClock {
    pub fn restart(&mut self) {
        self.steps = 0;
        self.finished = false;
    }

    pub fn guard(&self, name: &str) -> Result<()> {
        if self.finished {
            Err(Error::Domain(format!("{name}: step after episode end; call reset")))
        } else {
            Ok(())
        }
    }

    /// Advances one step; returns whether the time limit was hit.
    pub fn tick(&mut self, limit: usize, done: bool) -> bool {
        self.steps += 1;
        let truncated = !done && self.steps >= limit;
        self.finished = done || truncated;
        truncated
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        for kind in EnvKind::ALL {
            assert_eq!(kind.name().parse::<EnvKind>().unwrap(), kind);
        }
        assert!("acrobot".parse::<EnvKind>().is_err());
    }

    #[test]
    fn solve_thresholds() {
        assert_eq!(EnvKind::CartPole.spec().solve_reward, Some(200.0));
        assert_eq!(EnvKind::MountainCar.spec().solve_reward, Some(-110.0));
        assert_eq!(EnvKind::Pendulum.spec().solve_reward, None);
    }

    #[test]
    fn achieved_goals() {
        assert_eq!(extract_achieved_goal(EnvKind::MountainCar, &[-0.5, 0.01]).unwrap(), vec![-0.5]);
        assert_eq!(
            extract_achieved_goal(EnvKind::Pendulum, &[0f64.cos(), 0f64.sin(), 0.3]).unwrap(),
            vec![0.0]
        );
        assert!(matches!(
            extract_achieved_goal(EnvKind::CartPole, &[0.0; 4]),
            Err(Error::UnsupportedGoal(_))
        ));
    }
}
