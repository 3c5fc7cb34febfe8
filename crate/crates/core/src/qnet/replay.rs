//! Bounded FIFO experience store with uniform with-replacement sampling.

use rand::Rng;
use std::collections::VecDeque;

/// One stored transition, with the observation already normalized for
/// network input (times divided by T).
#[derive(Debug, Clone, PartialEq)]
pub struct Experience {
    pub state: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub terminal: bool,
}

#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    entries: VecDeque<Experience>,
    capacity: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        Self { entries: VecDeque::with_capacity(capacity.min(1 << 20)), capacity }
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

    /// Appends, evicting the oldest entry once full.
    pub fn push(&mut self, experience: Experience) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(experience);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Experience> {
        self.entries.iter()
    }

    /// Uniform sample of `n` entries with replacement.
    pub fn sample_with_replacement<'a, R: Rng>(
        &'a self,
        n: usize,
        rng: &mut R,
    ) -> Vec<&'a Experience> {
        assert!(!self.entries.is_empty(), "cannot sample an empty buffer");
        (0..n).map(|_| &self.entries[rng.gen_range(0..self.entries.len())]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn exp(tag: f64) -> Experience {
        Experience { state: vec![tag], action: 0, reward: tag, next_state: vec![tag], terminal: false }
    }

    #[test]
    fn fifo_eviction_preserves_order() {
        let capacity = 8;
        let extra = 3;
        let mut buffer = ReplayBuffer::new(capacity);
        for i in 0..capacity + extra {
            buffer.push(exp(i as f64));
        }
        assert_eq!(buffer.len(), capacity);
        let tags: Vec<f64> = buffer.iter().map(|e| e.reward).collect();
        // The `extra` oldest entries are gone, the rest keep insertion order.
        let expected: Vec<f64> = (extra..capacity + extra).map(|i| i as f64).collect();
        assert_eq!(tags, expected);
    }

    #[test]
    fn sampling_covers_the_buffer() {
        let mut buffer = ReplayBuffer::new(16);
        for i in 0..10 {
            buffer.push(exp(i as f64));
        }
        let mut generator = rng::seeded_rng(5);
        let sample = buffer.sample_with_replacement(1000, &mut generator);
        assert_eq!(sample.len(), 1000);
        let mut seen = std::collections::HashSet::new();
        for e in sample {
            seen.insert(e.reward.to_bits());
        }
        assert_eq!(seen.len(), 10, "with-replacement sampling should hit every entry");
    }
}
