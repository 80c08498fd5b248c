use std::f64::consts::PI;

use rand::Rng as _;

use super::{ActionSpace, EnvKind, EnvSpec, Environment, EpisodeClock, Scaling, StepResult};
use crate::error::{Error, Result};
use crate::replay::Action;
use crate::rng::Rng;

pub const GRAVITY: f64 = 10.0;
pub const MASS: f64 = 1.0;
pub const LENGTH: f64 = 1.0;
pub const DT: f64 = 0.05;
pub const MAX_TORQUE: f64 = 2.0;
pub const MAX_SPEED: f64 = 8.0;
pub const MAX_STEPS: usize = 200;

pub(super) fn spec() -> EnvSpec {
    EnvSpec {
        kind: EnvKind::Pendulum,
        obs_dim: 3,
        action_space: ActionSpace::Continuous {
            dim: 1,
            low: -MAX_TORQUE,
            high: MAX_TORQUE,
        },
        max_episode_steps: MAX_STEPS,
        solve_reward: None,
        goal_dim: Some(1),
        obs_scaling: Scaling {
            center: vec![0.0; 3],
            half_range: vec![1.0, 1.0, MAX_SPEED],
        },
        goal_scaling: Some(Scaling {
            center: vec![0.0],
            half_range: vec![PI],
        }),
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let w = x - two_pi * ((x - PI) / two_pi).ceil();
    if w <= -PI {
        w + two_pi
    } else {
        w
    }
}

/// Pole angle recovered from a `[cos θ, sin θ, θ_dot]` observation.
pub fn angle_of(obs: &[f64]) -> f64 {
    obs[1].atan2(obs[0])
}

/// `-(θ² + 0.1·θ_dot² + 0.001·torque²)` for an angle already in `(-π, π]`.
pub fn pendulum_reward(theta: f64, theta_dot: f64, torque: f64) -> f64 {
    -(theta * theta + 0.1 * theta_dot * theta_dot + 0.001 * torque * torque)
}

/// Frictionless torque-driven pendulum; θ = 0 is upright. Never terminates,
/// only truncates.
#[derive(Debug, Clone, Default)]
pub struct Pendulum {
    theta: f64,
    theta_dot: f64,
    clock: EpisodeClock,
    last_torque: f64,
}

impl Pendulum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_state(&mut self, theta: f64, theta_dot: f64) {
        self.theta = theta;
        self.theta_dot = theta_dot;
        self.clock.restart();
    }

    /// Torque actually applied by the previous step, after clipping.
    pub fn last_torque(&self) -> f64 {
        self.last_torque
    }

    pub fn dynamics(theta: f64, theta_dot: f64, torque: f64) -> (f64, f64) {
        let u = torque.clamp(-MAX_TORQUE, MAX_TORQUE);
        let acc = 3.0 * GRAVITY / (2.0 * LENGTH) * theta.sin() + 3.0 / (MASS * LENGTH * LENGTH) * u;
        let theta_dot = (theta_dot + acc * DT).clamp(-MAX_SPEED, MAX_SPEED);
        (theta + theta_dot * DT, theta_dot)
    }
}

impl Environment for Pendulum {
    fn spec(&self) -> EnvSpec {
        spec()
    }

    fn reset(&mut self, rng: &mut Rng) -> Vec<f64> {
        self.theta = rng.gen_range(-PI..=PI);
        self.theta_dot = rng.gen_range(-1.0..=1.0);
        self.clock.restart();
        self.observation()
    }

    fn step(&mut self, action: &Action) -> Result<StepResult> {
        self.clock.guard("pendulum")?;
        let torque = match action {
            Action::Continuous(v) if v.len() == 1 => v[0],
            other => {
                return Err(Error::Domain(format!("pendulum expects a 1-d torque, got {other:?}")))
            }
        };
        if !torque.is_finite() {
            return Err(Error::Domain(format!("non-finite torque {torque}")));
        }
        let u = torque.clamp(-MAX_TORQUE, MAX_TORQUE);
        // Angle taken from the observation so the native reward and the
        // goal-conditioned reward at goal 0 share one code path.
        let obs = self.observation();
        let reward = pendulum_reward(wrap_angle(angle_of(&obs) - 0.0), self.theta_dot, u);
        let (theta, theta_dot) = Self::dynamics(self.theta, self.theta_dot, u);
        self.theta = theta;
        self.theta_dot = theta_dot;
        self.last_torque = u;
        let truncated = self.clock.tick(MAX_STEPS, false);
        Ok(StepResult {
            next_state: self.observation(),
            reward,
            done: false,
            truncated,
        })
    }

    fn observation(&self) -> Vec<f64> {
        vec![self.theta.cos(), self.theta.sin(), self.theta_dot]
    }
}
