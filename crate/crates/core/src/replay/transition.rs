use crate::error::{Error, Result};

/// An action as stored in a transition.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Discrete(usize),
    Continuous(Vec<f64>),
}

impl Action {
    /// Length of the action when fed to a network: 1 for a discrete index,
    /// the vector length otherwise.
    pub fn dim(&self) -> usize {
        match self {
            Action::Discrete(_) => 1,
            Action::Continuous(v) => v.len(),
        }
    }

    pub fn as_discrete(&self) -> Option<usize> {
        match self {
            Action::Discrete(a) => Some(*a),
            Action::Continuous(_) => None,
        }
    }

    pub fn as_continuous(&self) -> Option<&[f64]> {
        match self {
            Action::Discrete(_) => None,
            Action::Continuous(v) => Some(v),
        }
    }
}

/// One step of agent-environment interaction.
///
/// `done` marks task termination only; time-limit truncation is never stored
/// as `done` so that bootstrapping continues through it.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: Action,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub done: bool,
    pub goal: Option<Vec<f64>>,
}

impl Transition {
    pub fn new(
        state: Vec<f64>,
        action: Action,
        reward: f64,
        next_state: Vec<f64>,
        done: bool,
    ) -> Self {
        Transition {
            state,
            action,
            reward,
            next_state,
            done,
            goal: None,
        }
    }

    pub fn with_goal(mut self, goal: Vec<f64>) -> Self {
        self.goal = Some(goal);
        self
    }

    /// Checks the per-transition invariants.
    pub fn validate(&self) -> Result<()> {
        if self.state.len() != self.next_state.len() {
            return Err(Error::shape(
                self.state.len(),
                self.next_state.len(),
                "next_state dimension",
            ));
        }
        if !self.reward.is_finite() {
            return Err(Error::Numerical(format!("non-finite reward {}", self.reward)));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.state) || !finite(&self.next_state) {
            return Err(Error::Numerical("non-finite state component".into()));
        }
        if let Some(goal) = &self.goal {
            if !finite(goal) {
                return Err(Error::Numerical("non-finite goal component".into()));
            }
        }
        if let Action::Continuous(a) = &self.action {
            if !finite(a) {
                return Err(Error::Numerical("non-finite action component".into()));
            }
        }
        Ok(())
    }
}
