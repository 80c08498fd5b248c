use rand::Rng as _;

use super::transition::{Action, Transition};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Number of stored transitions required before learning starts.
pub const DEFAULT_WARMUP: usize = 1000;

/// A sampled transition together with its storage slot and
/// importance-sampling weight (1.0 unless drawn by priority).
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub index: usize,
    pub transition: &'a Transition,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Layout {
    state_dim: usize,
    action: ActionLayout,
    goal_dim: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ActionLayout {
    Discrete,
    Continuous(usize),
}

impl Layout {
    fn of(t: &Transition) -> Self {
        Layout {
            state_dim: t.state.len(),
            action: match &t.action {
                Action::Discrete(_) => ActionLayout::Discrete,
                Action::Continuous(v) => ActionLayout::Continuous(v.len()),
            },
            goal_dim: t.goal.as_ref().map(Vec::len),
        }
    }

    fn check(&self, t: &Transition) -> Result<()> {
        let other = Layout::of(t);
        if other.state_dim != self.state_dim {
            return Err(Error::shape(self.state_dim, other.state_dim, "state dimension"));
        }
        match (self.action, other.action) {
            (ActionLayout::Discrete, ActionLayout::Discrete) => {}
            (ActionLayout::Continuous(a), ActionLayout::Continuous(b)) if a == b => {}
            (ActionLayout::Continuous(a), ActionLayout::Continuous(b)) => {
                return Err(Error::shape(a, b, "action dimension"))
            }
            _ => return Err(Error::Config("mixed discrete and continuous actions".into())),
        }
        match (self.goal_dim, other.goal_dim) {
            (None, None) => Ok(()),
            (Some(a), Some(b)) if a == b => Ok(()),
            (Some(a), Some(b)) => Err(Error::shape(a, b, "goal dimension")),
            (Some(a), None) => Err(Error::shape(a, 0, "goal dimension")),
            (None, Some(b)) => Err(Error::shape(0, b, "goal dimension")),
        }
    }
}

/// Fixed-capacity ring of transitions with FIFO eviction.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    storage: Vec<Transition>,
    write_cursor: usize,
    layout: Option<Layout>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Config("replay capacity must be at least 1".into()));
        }
        Ok(ReplayBuffer {
            capacity,
            storage: Vec::with_capacity(capacity.min(1 << 16)),
            write_cursor: 0,
            layout: None,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.storage.len() == self.capacity
    }

    /// Slot the next append will write to.
    pub fn write_cursor(&self) -> usize {
        self.write_cursor
    }

    /// Stores `t`, evicting the oldest transition when full. Returns the slot
    /// written.
    pub fn append(&mut self, t: Transition) -> Result<usize> {
        t.validate()?;
        match &self.layout {
            Some(layout) => layout.check(&t)?,
            None => self.layout = Some(Layout::of(&t)),
        }
        let slot = self.write_cursor;
        if self.storage.len() < self.capacity {
            self.storage.push(t);
        } else {
            self.storage[slot] = t;
        }
        self.write_cursor = (slot + 1) % self.capacity;
        Ok(slot)
    }

    pub fn get(&self, index: usize) -> Option<&Transition> {
        self.storage.get(index)
    }

    /// Slot of the most recently appended transition.
    pub fn latest_index(&self) -> Option<usize> {
        if self.storage.is_empty() {
            None
        } else {
            Some((self.write_cursor + self.capacity - 1) % self.capacity)
        }
    }

    pub fn latest(&self) -> Option<&Transition> {
        self.latest_index().map(|i| &self.storage[i])
    }

    /// Stored transitions from oldest to newest.
    pub fn iter_chronological(&self) -> impl Iterator<Item = &Transition> {
        let split = if self.is_full() { self.write_cursor } else { 0 };
        self.storage[split..].iter().chain(self.storage[..split].iter())
    }
}

/// Draws `batch_size` transitions uniformly with replacement.
pub fn sample_uniform<'a>(
    buf: &'a ReplayBuffer,
    batch_size: usize,
    rng: &mut Rng,
) -> Result<Vec<Sample<'a>>> {
    if buf.is_empty() {
        return Err(Error::NotReady("replay buffer is empty".into()));
    }
    let n = buf.len();
    Ok((0..batch_size)
        .map(|_| {
            let index = rng.gen_range(0..n);
            Sample {
                index,
                transition: &buf.storage[index],
                weight: 1.0,
            }
        })
        .collect())
}

/// Combined replay: position 0 holds the latest transition with weight 1.0,
/// the remaining `batch_size - 1` entries come from `inner`. Duplicates of the
/// latest transition drawn by `inner` are kept.
pub fn sample_combined<'a, F>(
    buf: &'a ReplayBuffer,
    batch_size: usize,
    rng: &mut Rng,
    inner: F,
) -> Result<Vec<Sample<'a>>>
where
    F: FnOnce(&'a ReplayBuffer, usize, &mut Rng) -> Result<Vec<Sample<'a>>>,
{
    if batch_size == 0 {
        return Err(Error::Config("batch size must be at least 1".into()));
    }
    let index = buf
        .latest_index()
        .ok_or_else(|| Error::NotReady("replay buffer is empty".into()))?;
    let mut batch = Vec::with_capacity(batch_size);
    batch.push(Sample {
        index,
        transition: &buf.storage[index],
        weight: 1.0,
    });
    if batch_size > 1 {
        batch.extend(inner(buf, batch_size - 1, rng)?);
    }
    Ok(batch)
}
