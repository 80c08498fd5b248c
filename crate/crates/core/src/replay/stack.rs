use super::buffer::{sample_combined, sample_uniform, ReplayBuffer, Sample};
use super::transition::Transition;
use crate::error::Result;
use crate::prioritized::{per_sample, PerConfig, PriorityIndex};
use crate::rng::Rng;

/// Which replay strategies are switched on for a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct StrategyFlags {
    pub combined: bool,
    pub prioritized: bool,
    pub hindsight: bool,
}

impl StrategyFlags {
    pub const ALL: [StrategyFlags; 8] = {
        let mut out = [StrategyFlags {
            combined: false,
            prioritized: false,
            hindsight: false,
        }; 8];
        let mut i = 0;
        while i < 8 {
            out[i] = StrategyFlags {
                combined: i & 1 != 0,
                prioritized: i & 2 != 0,
                hindsight: i & 4 != 0,
            };
            i += 1;
        }
        out
    };

    /// Conventional short name: `Baseline`, `CER`, `PER`, `HER`, `CPER`,
    /// `HPER`, `CHER`, `CHPER`.
    pub fn label(&self) -> String {
        let mut s = String::new();
        if self.combined {
            s.push('C');
        }
        if self.hindsight {
            s.push('H');
        }
        if self.prioritized {
            s.push('P');
        }
        if s.is_empty() {
            "Baseline".to_string()
        } else {
            format!("{s}ER")
        }
    }
}

/// Ring buffer with an optional priority sampler and optional combined-replay
/// decoration on top.
#[derive(Debug, Clone)]
pub struct ReplayStack {
    buffer: ReplayBuffer,
    priorities: Option<PriorityIndex>,
    combined: bool,
}

impl ReplayStack {
    pub fn new(capacity: usize, combined: bool, per: Option<PerConfig>) -> Result<Self> {
        let buffer = ReplayBuffer::new(capacity)?;
        let priorities = per.map(|cfg| PriorityIndex::new(capacity, cfg)).transpose()?;
        Ok(ReplayStack {
            buffer,
            priorities,
            combined,
        })
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn priorities(&self) -> Option<&PriorityIndex> {
        self.priorities.as_ref()
    }

    pub fn is_combined(&self) -> bool {
        self.combined
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    pub fn push(&mut self, t: Transition) -> Result<usize> {
        let slot = self.buffer.append(t)?;
        if let Some(p) = &mut self.priorities {
            p.insert(slot)?;
        }
        Ok(slot)
    }

    pub fn sample(&self, batch_size: usize, rng: &mut Rng) -> Result<Vec<Sample<'_>>> {
        let buf = &self.buffer;
        match (&self.priorities, self.combined) {
            (None, false) => sample_uniform(buf, batch_size, rng),
            (None, true) => sample_combined(buf, batch_size, rng, sample_uniform),
            (Some(p), false) => per_sample(buf, p, batch_size, rng),
            (Some(p), true) => {
                sample_combined(buf, batch_size, rng, |b, n, r| per_sample(b, p, n, r))
            }
        }
    }

    /// Feeds TD errors back into the priority tree; a no-op without PER.
    pub fn update_priorities(&mut self, indices: &[usize], td_errors: &[f64]) -> Result<()> {
        match &mut self.priorities {
            Some(p) => p.update(indices, td_errors),
            None => Ok(()),
        }
    }
}
