use rand::Rng as _;

use super::{ActionSpace, EnvKind, EnvSpec, Environment, EpisodeClock, Scaling, StepResult};
use crate::error::{Error, Result};
use crate::replay::Action;
use crate::rng::Rng;

pub const FORCE: f64 = 0.001;
pub const GRAVITY: f64 = 0.0025;
pub const MIN_POSITION: f64 = -1.2;
pub const MAX_POSITION: f64 = 0.6;
pub const MAX_SPEED: f64 = 0.07;
pub const GOAL_POSITION: f64 = 0.5;
pub const MAX_STEPS: usize = 200;

pub(super) fn spec() -> EnvSpec {
    let position = Scaling {
        center: vec![-0.3],
        half_range: vec![0.9],
    };
    EnvSpec {
        kind: EnvKind::MountainCar,
        obs_dim: 2,
        action_space: ActionSpace::Discrete(3),
        max_episode_steps: MAX_STEPS,
        solve_reward: Some(-110.0),
        goal_dim: Some(1),
        obs_scaling: Scaling {
            center: vec![-0.3, 0.0],
            half_range: vec![0.9, MAX_SPEED],
        },
        goal_scaling: Some(position),
    }
}

/// Under-powered car in a valley. Actions: 0 push left, 1 no push,
/// 2 push right. State is `[position, velocity]`.
#[derive(Debug, Clone, Default)]
pub struct MountainCar {
    state: [f64; 2],
    clock: EpisodeClock,
}

impl MountainCar {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_state(&mut self, state: [f64; 2]) {
        self.state = state;
        self.clock.restart();
    }

    pub fn dynamics(state: [f64; 2], action: usize) -> ([f64; 2], bool) {
        let [mut position, mut velocity] = state;
        velocity += (action as f64 - 1.0) * FORCE - GRAVITY * (3.0 * position).cos();
        velocity = velocity.clamp(-MAX_SPEED, MAX_SPEED);
        position += velocity;
        position = position.clamp(MIN_POSITION, MAX_POSITION);
        if position == MIN_POSITION && velocity < 0.0 {
            velocity = 0.0;
        }
        ([position, velocity], position >= GOAL_POSITION)
    }
}

impl Environment for MountainCar {
    fn spec(&self) -> EnvSpec {
        spec()
    }

    fn reset(&mut self, rng: &mut Rng) -> Vec<f64> {
        self.state = [rng.gen_range(-0.6..-0.4), 0.0];
        self.clock.restart();
        self.state.to_vec()
    }

    fn step(&mut self, action: &Action) -> Result<StepResult> {
        self.clock.guard("mountaincar")?;
        let a = match action {
            Action::Discrete(a @ 0..=2) => *a,
            other => {
                return Err(Error::Domain(format!("mountaincar action must be 0, 1 or 2, got {other:?}")))
            }
        };
        let (next, done) = Self::dynamics(self.state, a);
        self.state = next;
        let truncated = self.clock.tick(MAX_STEPS, done);
        Ok(StepResult {
            next_state: next.to_vec(),
            reward: if done { 0.0 } else { -1.0 },
            done,
            truncated,
        })
    }

    fn observation(&self) -> Vec<f64> {
        self.state.to_vec()
    }
}
