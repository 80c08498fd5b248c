//! Hindsight relabeling with the "final" strategy: every episode is stored a
//! second time with the goal replaced by the goal achieved in its last state.

use crate::envs::{angle_of, pendulum_reward, wrap_angle, EnvKind};
use crate::envs::mountaincar::{GOAL_POSITION, MAX_POSITION};
use crate::error::{Error, Result};
use crate::replay::{Action, Transition};

pub const MOUNTAINCAR_TOLERANCE: f64 = 0.05;
pub const PENDULUM_TOLERANCE: f64 = 0.1;

/// Goal standing for the MountainCar flag: the centre of the region
/// `[GOAL_POSITION, MAX_POSITION]`. With the default tolerance the success
/// band is exactly that region, so the goal-conditioned reward at this goal
/// equals the native reward.
pub const MOUNTAINCAR_NATIVE_GOAL: f64 = 0.5 * (GOAL_POSITION + MAX_POSITION);

/// Goal semantics of an environment.
pub trait GoalSpec: Send + Sync {
    fn goal_dim(&self) -> usize;

    fn tolerance(&self) -> f64;

    /// The goal the task itself asks for.
    fn native_goal(&self) -> Vec<f64>;

    /// The goal achieved by an observation.
    fn achieved_goal(&self, state: &[f64]) -> Vec<f64>;

    /// Reward and success of a transition when pursuing `goal`.
    fn transition_reward(&self, t: &Transition, goal: &[f64]) -> (f64, bool);
}

/// Success iff `|position - goal| <= tolerance`; reward 0 on success, -1
/// otherwise.
pub fn mountaincar_goal_reward(state: &[f64], _action: &Action, goal: &[f64], tolerance: f64) -> (f64, bool) {
    let position = state[0];
    // Two-sided comparison avoids the rounding of |a - b| at the band edges.
    let success = goal[0] - tolerance <= position && position <= goal[0] + tolerance;
    (if success { 0.0 } else { -1.0 }, success)
}

/// Pendulum cost measured against a goal angle; success iff the wrapped
/// angular distance is within tolerance.
pub fn pendulum_goal_reward(state: &[f64], action: &Action, goal: &[f64], tolerance: f64) -> (f64, bool) {
    let delta = wrap_angle(angle_of(state) - goal[0]);
    let torque = action.as_continuous().map_or(0.0, |a| a[0]);
    (pendulum_reward(delta, state[2], torque), delta.abs() <= tolerance)
}

#[derive(Debug, Clone, Copy)]
pub struct MountainCarGoals {
    pub tolerance: f64,
}

impl GoalSpec for MountainCarGoals {
    fn goal_dim(&self) -> usize {
        1
    }

    fn tolerance(&self) -> f64 {
        self.tolerance
    }

    fn native_goal(&self) -> Vec<f64> {
        vec![MOUNTAINCAR_NATIVE_GOAL]
    }

    fn achieved_goal(&self, state: &[f64]) -> Vec<f64> {
        vec![state[0]]
    }

    fn transition_reward(&self, t: &Transition, goal: &[f64]) -> (f64, bool) {
        mountaincar_goal_reward(&t.next_state, &t.action, goal, self.tolerance)
    }
}

/// The cost is charged on the state the action was taken in (as the native
/// reward is); success is judged on the state reached.
#[derive(Debug, Clone, Copy)]
pub struct PendulumGoals {
    pub tolerance: f64,
}

impl GoalSpec for PendulumGoals {
    fn goal_dim(&self) -> usize {
        1
    }

    fn tolerance(&self) -> f64 {
        self.tolerance
    }

    fn native_goal(&self) -> Vec<f64> {
        vec![0.0]
    }

    fn achieved_goal(&self, state: &[f64]) -> Vec<f64> {
        vec![angle_of(state)]
    }

    fn transition_reward(&self, t: &Transition, goal: &[f64]) -> (f64, bool) {
        let (reward, _) = pendulum_goal_reward(&t.state, &t.action, goal, self.tolerance);
        let (_, success) = pendulum_goal_reward(&t.next_state, &t.action, goal, self.tolerance);
        (reward, success)
    }
}

/// Goal semantics for `kind`, with the default tolerance unless overridden.
pub fn goal_spec_for(kind: EnvKind, tolerance: Option<f64>) -> Result<Box<dyn GoalSpec>> {
    if let Some(tol) = tolerance {
        if !(tol >= 0.0) {
            return Err(Error::Config(format!("goal tolerance must be non-negative, got {tol}")));
        }
    }
    match kind {
        EnvKind::CartPole => Err(Error::UnsupportedGoal(kind.name().into())),
        EnvKind::MountainCar => Ok(Box::new(MountainCarGoals {
            tolerance: tolerance.unwrap_or(MOUNTAINCAR_TOLERANCE),
        })),
        EnvKind::Pendulum => Ok(Box::new(PendulumGoals {
            tolerance: tolerance.unwrap_or(PENDULUM_TOLERANCE),
        })),
    }
}

/// An episode's transitions, chained `next_state -> state`, with only the
/// last one possibly terminal.
#[derive(Debug, Clone)]
pub struct Episode {
    transitions: Vec<Transition>,
}

impl Episode {
    pub fn new(transitions: Vec<Transition>) -> Result<Self> {
        if transitions.is_empty() {
            return Err(Error::Integrity("episode has no transitions".into()));
        }
        for (i, pair) in transitions.windows(2).enumerate() {
            if pair[0].next_state != pair[1].state {
                return Err(Error::Integrity(format!(
                    "transition {i} next_state does not match transition {} state",
                    i + 1
                )));
            }
            if pair[0].done {
                return Err(Error::Integrity(format!("transition {i} is terminal but not last")));
            }
        }
        Ok(Episode { transitions })
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn final_state(&self) -> &[f64] {
        &self.transitions[self.transitions.len() - 1].next_state
    }
}

/// Returns the episode's transitions followed by their relabeled copies.
///
/// Copies carry the goal achieved in the final state; reward and `done` are
/// recomputed under it, `done` being set on every successful step.
pub fn relabel_episode(ep: &Episode, spec: &dyn GoalSpec) -> Vec<Transition> {
    let goal = spec.achieved_goal(ep.final_state());
    let mut out = Vec::with_capacity(2 * ep.len());
    out.extend(ep.transitions.iter().cloned());
    out.extend(ep.transitions.iter().map(|t| {
        let (reward, success) = spec.transition_reward(t, &goal);
        Transition {
            reward,
            done: success,
            goal: Some(goal.clone()),
            ..t.clone()
        }
    }));
    out
}

/// `[state; goal]`, or `state` alone when `goal_dim` is 0.
pub fn augment_observation(
    state: &[f64],
    goal: Option<&[f64]>,
    state_dim: usize,
    goal_dim: usize,
) -> Result<Vec<f64>> {
    if state.len() != state_dim {
        return Err(Error::shape(state_dim, state.len(), "state"));
    }
    let goal_len = goal.map_or(0, <[f64]>::len);
    if goal_len != goal_dim {
        return Err(Error::shape(goal_dim, goal_len, "goal"));
    }
    let mut out = Vec::with_capacity(state_dim + goal_dim);
    out.extend_from_slice(state);
    if let Some(g) = goal {
        out.extend_from_slice(g);
    }
    Ok(out)
}
