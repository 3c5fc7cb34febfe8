//! Performance-driven exploration schedule.
//!
//! The running best reward is tracked after every episode. At each review
//! point (every 50 completed episodes) an improvement over the current
//! threshold commits: the threshold moves to the best reward and
//! ε ← 1 − (r_max − r_initial)/(1 − r_initial), so exploration dies out
//! exactly as the agent closes the gap to the maximum possible reward.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonSchedule {
    epsilon: f64,
    r_initial: f64,
    r_threshold: f64,
    r_max: f64,
    review_period: usize,
}

impl EpsilonSchedule {
    pub const DEFAULT_REVIEW_PERIOD: usize = 50;

    /// `r_initial` is the reward of the untouched initial sequence; it
    /// seeds both the threshold and the running maximum.
    pub fn new(r_initial: f64, epsilon_initial: f64, review_period: usize) -> Result<Self> {
        if r_initial >= 1.0 {
            return Err(Error::Config(format!(
                "initial reward {r_initial} leaves no headroom; schedule undefined"
            )));
        }
        if !(0.0..=1.0).contains(&epsilon_initial) {
            return Err(Error::Config(format!("epsilon {epsilon_initial} outside [0, 1]")));
        }
        if review_period == 0 {
            return Err(Error::Config("review period must be positive".into()));
        }
        Ok(Self {
            epsilon: epsilon_initial,
            r_initial,
            r_threshold: r_initial,
            r_max: r_initial,
            review_period,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn r_threshold(&self) -> f64 {
        self.r_threshold
    }

    /// Records a finished episode. `episodes_completed` counts from 1;
    /// reviews fire when it is a multiple of the review period.
    pub fn record_episode(&mut self, episodes_completed: usize, reward: f64) {
        if reward > self.r_max {
            self.r_max = reward;
        }
        if episodes_completed % self.review_period == 0 && self.r_max > self.r_threshold {
            self.r_threshold = self.r_max;
            self.epsilon = (1.0 - (self.r_max - self.r_initial) / (1.0 - self.r_initial))
                .clamp(0.0, 1.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schedule(r_initial: f64) -> EpsilonSchedule {
        EpsilonSchedule::new(r_initial, 1.0, 50).unwrap()
    }

    #[test]
    fn review_point_update() {
        let mut s = schedule(0.2);
        s.record_episode(1, 0.6);
        assert_eq!(s.epsilon(), 1.0, "no review before the period elapses");
        for ep in 2..=50 {
            s.record_episode(ep, 0.1);
        }
        // r_max = 0.6, r_initial = 0.2 → ε = 1 − 0.4/0.8 = 0.5
        assert!((s.epsilon() - 0.5).abs() < 1e-15);
        assert_eq!(s.r_threshold(), 0.6);
    }

    #[test]
    fn no_improvement_means_no_change() {
        let mut s = schedule(0.3);
        for ep in 1..=200 {
            s.record_episode(ep, 0.3);
        }
        assert_eq!(s.epsilon(), 1.0);
        assert_eq!(s.r_threshold(), 0.3);
    }

    #[test]
    fn perfect_reward_extinguishes_exploration() {
        let mut s = schedule(0.4);
        s.record_episode(1, 1.0);
        for ep in 2..=50 {
            s.record_episode(ep, 0.0);
        }
        assert_eq!(s.epsilon(), 0.0);
    }

    #[test]
    fn epsilon_is_monotone_nonincreasing() {
        let mut s = schedule(0.1);
        let mut last = s.epsilon();
        let rewards = [0.2, 0.15, 0.5, 0.4, 0.55, 0.9, 0.85, 1.0];
        let mut ep = 0;
        for &r in rewards.iter().cycle().take(400) {
            ep += 1;
            s.record_episode(ep, r);
            assert!((0.0..=1.0).contains(&s.epsilon()));
            assert!(s.epsilon() <= last);
            last = s.epsilon();
        }
    }

    #[test]
    fn degenerate_initial_reward_rejected() {
        assert!(EpsilonSchedule::new(1.0, 1.0, 50).is_err());
    }
}
