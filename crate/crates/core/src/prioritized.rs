//! Proportional prioritized replay.
//!
//! Leaves of the [`SumTree`] hold `p_i^alpha`, so the root is the normaliser
//! of the sampling distribution and a draw is a single root-to-leaf descent.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::replay::{ReplayBuffer, Sample};
use crate::rng::Rng;

/// Array-backed complete binary tree whose internal nodes hold the sum of
/// their children.
///
/// The leaf level is padded to a power of two so that leaf order matches
/// prefix-sum order; padding leaves stay at zero.
#[derive(Debug, Clone)]
pub struct SumTree {
    leaf_capacity: usize,
    width: usize,
    nodes: Vec<f64>,
}

impl SumTree {
    pub fn new(leaf_capacity: usize) -> Result<Self> {
        if leaf_capacity == 0 {
            return Err(Error::Config("sum tree capacity must be at least 1".into()));
        }
        let width = leaf_capacity.next_power_of_two();
        Ok(SumTree {
            leaf_capacity,
            width,
            nodes: vec![0.0; 2 * width - 1],
        })
    }

    pub fn leaf_capacity(&self) -> usize {
        self.leaf_capacity
    }

    /// Sum of all leaves.
    pub fn total(&self) -> f64 {
        self.nodes[0]
    }

    pub fn leaf(&self, index: usize) -> Result<f64> {
        self.check_index(index)?;
        Ok(self.nodes[self.width - 1 + index])
    }

    /// Flat node array, root first; internal node `i` has children `2i+1`
    /// and `2i+2`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.leaf_capacity {
            Err(Error::Bounds {
                index,
                len: self.leaf_capacity,
            })
        } else {
            Ok(())
        }
    }

    /// Writes `value` to a leaf and recomputes every ancestor from its
    /// children, so internal nodes never accumulate update drift.
    pub fn set(&mut self, index: usize, value: f64) -> Result<()> {
        self.check_index(index)?;
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::Domain(format!(
                "sum tree values must be finite and non-negative, got {value}"
            )));
        }
        let mut node = self.width - 1 + index;
        self.nodes[node] = value;
        while node > 0 {
            node = (node - 1) / 2;
            self.nodes[node] = self.nodes[2 * node + 1] + self.nodes[2 * node + 2];
        }
        Ok(())
    }

    /// Returns the leaf whose prefix-sum interval contains `u`.
    pub fn sample(&self, u: f64) -> Result<usize> {
        let total = self.total();
        if !(total > 0.0) {
            return Err(Error::NotReady("sum tree holds no mass".into()));
        }
        if !(u >= 0.0) || !u.is_finite() {
            return Err(Error::Domain(format!("sample point {u} outside [0, {total})")));
        }
        let mut u = u;
        let mut node = 0;
        while node < self.width - 1 {
            let left = 2 * node + 1;
            let right = left + 1;
            // Rounding can leave u at or past the left mass while the right
            // subtree is empty; stay left in that case.
            if u >= self.nodes[left] && self.nodes[right] > 0.0 {
                u -= self.nodes[left];
                node = right;
            } else {
                node = left;
            }
        }
        Ok(node - (self.width - 1))
    }
}

/// Hyperparameters of proportional prioritization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerConfig {
    /// Prioritization exponent; 0 recovers uniform sampling.
    pub alpha: f64,
    /// Importance-sampling exponent, held fixed for a run.
    pub beta: f64,
    /// Additive floor keeping every priority strictly positive.
    pub epsilon: f64,
    /// Raw priority given to transitions before any TD error has been seen.
    pub max_priority_init: f64,
}

impl Default for PerConfig {
    fn default() -> Self {
        PerConfig {
            alpha: 0.6,
            beta: 0.4,
            epsilon: 0.01,
            max_priority_init: 1.0,
        }
    }
}

impl PerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!("per.alpha must lie in [0,1], got {}", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::Config(format!("per.beta must lie in [0,1], got {}", self.beta)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config(format!("per.epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.max_priority_init > 0.0) {
            return Err(Error::Config(format!(
                "per.max_priority_init must be positive, got {}",
                self.max_priority_init
            )));
        }
        Ok(())
    }
}

/// Sum tree plus the running maximum raw priority used for new insertions.
#[derive(Debug, Clone)]
pub struct PriorityIndex {
    pub tree: SumTree,
    pub cfg: PerConfig,
    max_raw: Option<f64>,
}

impl PriorityIndex {
    pub fn new(capacity: usize, cfg: PerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(PriorityIndex {
            tree: SumTree::new(capacity)?,
            cfg,
            max_raw: None,
        })
    }

    /// Largest raw priority `|δ| + ε` written so far, if any.
    pub fn max_raw_priority(&self) -> Option<f64> {
        self.max_raw
    }

    /// Gives a freshly stored transition the largest raw priority seen so far
    /// (or `max_priority_init`), raised to alpha.
    pub fn insert(&mut self, leaf: usize) -> Result<()> {
        let raw = self.max_raw.unwrap_or(self.cfg.max_priority_init);
        self.tree.set(leaf, raw.powf(self.cfg.alpha))
    }

    /// Sets each leaf to `(|δ| + ε)^alpha`.
    pub fn update(&mut self, indices: &[usize], td_errors: &[f64]) -> Result<()> {
        if indices.len() != td_errors.len() {
            return Err(Error::shape(indices.len(), td_errors.len(), "one TD error per index"));
        }
        for (&i, &delta) in indices.iter().zip(td_errors) {
            if !delta.is_finite() {
                return Err(Error::Numerical(format!("non-finite TD error {delta} for slot {i}")));
            }
            let raw = delta.abs() + self.cfg.epsilon;
            self.tree.set(i, raw.powf(self.cfg.alpha))?;
            self.max_raw = Some(self.max_raw.map_or(raw, |m| m.max(raw)));
        }
        Ok(())
    }

    /// Probability of drawing `leaf` under the current priorities.
    pub fn probability(&self, leaf: usize) -> Result<f64> {
        Ok(self.tree.leaf(leaf)? / self.tree.total())
    }
}

/// Stratified proportional sampling: the total mass is cut into `batch_size`
/// equal segments and one point drawn uniformly inside each.
///
/// Weights are `(N·P(i))^-β` divided by the batch maximum.
pub fn per_sample<'a>(
    buf: &'a ReplayBuffer,
    index: &PriorityIndex,
    batch_size: usize,
    rng: &mut Rng,
) -> Result<Vec<Sample<'a>>> {
    if buf.is_empty() {
        return Err(Error::NotReady("replay buffer is empty".into()));
    }
    if batch_size == 0 {
        return Ok(Vec::new());
    }
    let tree = &index.tree;
    let total = tree.total();
    if !(total > 0.0) {
        return Err(Error::NotReady("priority tree holds no mass".into()));
    }
    let n = buf.len() as f64;
    let segment = total / batch_size as f64;
    let mut picks = Vec::with_capacity(batch_size);
    for k in 0..batch_size {
        let lo = segment * k as f64;
        let u = (lo + rng.gen::<f64>() * segment).min(total * (1.0 - f64::EPSILON));
        let leaf = tree.sample(u)?;
        let transition = buf.get(leaf).ok_or_else(|| {
            Error::Integrity(format!("priority tree selected unoccupied slot {leaf}"))
        })?;
        let p = tree.leaf(leaf)? / total;
        picks.push((leaf, transition, (n * p).powf(-index.cfg.beta)));
    }
    let max_w = picks.iter().map(|p| p.2).fold(f64::MIN, f64::max);
    Ok(picks
        .into_iter()
        .map(|(index, transition, w)| Sample {
            index,
            transition,
            weight: w / max_w,
        })
        .collect())
}
