use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::stream::Instance;

/// Bounded queue of the most recent scaled, labeled instances, oldest
/// first.
#[derive(Debug, Clone)]
pub struct RecentBuffer {
    capacity: usize,
    entries: VecDeque<Instance>,
}

impl RecentBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "buffer capacity must be positive");
        Self {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry at `position`, 0 being the oldest.
    pub fn get(&self, position: usize) -> Option<&Instance> {
        self.entries.get(position)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &Instance> + ExactSizeIterator {
        self.entries.iter()
    }

    /// Appends `x`, evicting the oldest entry when full.
    pub fn push(&mut self, x: Instance) -> Result<()> {
        x.require_label()?;
        if let Some(last) = self.entries.back() {
            if x.time_index <= last.time_index {
                return Err(Error::config(format!(
                    "time index {} does not follow {}",
                    x.time_index, last.time_index
                )));
            }
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(x);
        Ok(())
    }

    /// Projects every entry onto the feature layout of `target`.
    ///
    /// Features can only disappear: an entry lacking one of the target's
    /// features is an error.
    pub fn resize_to_target(&mut self, target: &Instance) -> Result<()> {
        for entry in self.entries.iter_mut() {
            if entry.dimension() == target.dimension() && entry.feature_keys == target.feature_keys
            {
                continue;
            }
            let positions = entry.positions_for(target)?;
            *entry = entry.project(&positions);
        }
        Ok(())
    }

    pub fn size_bytes(&self) -> usize {
        std::mem::size_of::<Self>()
            + self
                .entries
                .iter()
                .map(|x| std::mem::size_of::<Instance>() + 8 * x.dimension())
                .sum::<usize>()
    }
}
