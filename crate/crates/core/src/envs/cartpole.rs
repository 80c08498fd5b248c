use rand::Rng as _;

use super::{ActionSpace, EnvKind, EnvSpec, Environment, EpisodeClock, Scaling, StepResult};
use crate::error::{Error, Result};
use crate::replay::Action;
use crate::rng::Rng;

pub const GRAVITY: f64 = 9.8;
pub const CART_MASS: f64 = 1.0;
pub const POLE_MASS: f64 = 0.1;
pub const HALF_LENGTH: f64 = 0.5;
pub const FORCE: f64 = 10.0;
pub const DT: f64 = 0.02;
pub const X_LIMIT: f64 = 2.4;
pub const THETA_LIMIT: f64 = 12.0 * 2.0 * std::f64::consts::PI / 360.0;
pub const MAX_STEPS: usize = 200;

pub(super) fn spec() -> EnvSpec {
    EnvSpec {
        kind: EnvKind::CartPole,
        obs_dim: 4,
        action_space: ActionSpace::Discrete(2),
        max_episode_steps: MAX_STEPS,
        solve_reward: Some(200.0),
        goal_dim: None,
        obs_scaling: Scaling {
            center: vec![0.0; 4],
            half_range: vec![X_LIMIT, 3.0, THETA_LIMIT, 3.5],
        },
        goal_scaling: None,
    }
}

/// Cart-pole balancing with Euler integration. State is
/// `[x, x_dot, theta, theta_dot]`.
#[derive(Debug, Clone, Default)]
pub struct CartPole {
    state: [f64; 4],
    clock: EpisodeClock,
}

impl CartPole {
    pub fn new() -> Self {
        Self::default()
    }

    /// Places the system in an arbitrary state and restarts the step count.
    pub fn set_state(&mut self, state: [f64; 4]) {
        self.state = state;
        self.clock.restart();
    }

    /// One Euler step; returns the next state and whether it is terminal.
    pub fn dynamics(state: [f64; 4], action: usize) -> ([f64; 4], bool) {
        let [x, x_dot, theta, theta_dot] = state;
        let force = if action == 1 { FORCE } else { -FORCE };
        let total_mass = CART_MASS + POLE_MASS;
        let pole_mass_length = POLE_MASS * HALF_LENGTH;
        let (sin, cos) = theta.sin_cos();
        let temp = (force + pole_mass_length * theta_dot * theta_dot * sin) / total_mass;
        let theta_acc = (GRAVITY * sin - cos * temp)
            / (HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos * cos / total_mass));
        let x_acc = temp - pole_mass_length * theta_acc * cos / total_mass;
        let next = [
            x + DT * x_dot,
            x_dot + DT * x_acc,
            theta + DT * theta_dot,
            theta_dot + DT * theta_acc,
        ];
        let done = next[0].abs() > X_LIMIT || next[2].abs() > THETA_LIMIT;
        (next, done)
    }
}

impl Environment for CartPole {
    fn spec(&self) -> EnvSpec {
        spec()
    }

    fn reset(&mut self, rng: &mut Rng) -> Vec<f64> {
        for v in self.state.iter_mut() {
            *v = rng.gen_range(-0.05..0.05);
        }
        self.clock.restart();
        self.state.to_vec()
    }

    fn step(&mut self, action: &Action) -> Result<StepResult> {
        self.clock.guard("cartpole")?;
        let a = match action {
            Action::Discrete(a @ (0 | 1)) => *a,
            other => return Err(Error::Domain(format!("cartpole action must be 0 or 1, got {other:?}"))),
        };
        let (next, done) = Self::dynamics(self.state, a);
        self.state = next;
        let truncated = self.clock.tick(MAX_STEPS, done);
        Ok(StepResult {
            next_state: next.to_vec(),
            reward: 1.0,
            done,
            truncated,
        })
    }

    fn observation(&self) -> Vec<f64> {
        self.state.to_vec()
    }
}
