//! Population statistics with the linear-interpolation quantile rule:
//! quantile q sits at rank h = (n − 1)·q, interpolated between the
//! neighbouring order statistics.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

/// Quantile of a sorted slice by linear interpolation.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    assert!((0.0..=1.0).contains(&q));
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl Stats {
    pub fn compute(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite statistic"));
        Some(Self {
            min: sorted[0],
            q1: quantile(&sorted, 0.25),
            median: quantile(&sorted, 0.5),
            q3: quantile(&sorted, 0.75),
            max: sorted[sorted.len() - 1],
            mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_population_collapses() {
        let s = Stats::compute(&[0.5; 7]).unwrap();
        for v in [s.min, s.q1, s.median, s.q3, s.max, s.mean] {
            assert_eq!(v, 0.5);
        }
    }

    #[test]
    fn four_point_population() {
        // {1,2,3,4} under linear interpolation: Q1 = 1.75, Q3 = 3.25.
        let s = Stats::compute(&[4.0, 2.0, 1.0, 3.0]).unwrap();
        assert_eq!(s.median, 2.5);
        assert_eq!(s.mean, 2.5);
        assert_eq!(s.q1, 1.75);
        assert_eq!(s.q3, 3.25);
        assert_eq!(s.min, 1.0);
        assert_eq!(s.max, 4.0);
    }

    #[test]
    fn quantile_order_holds() {
        let s = Stats::compute(&[0.9, 0.03, 0.5, 0.22, 0.77, 0.15]).unwrap();
        assert!(s.min <= s.q1 && s.q1 <= s.median && s.median <= s.q3 && s.q3 <= s.max);
    }

    #[test]
    fn permutation_invariance() {
        let a = Stats::compute(&[3.0, 1.0, 2.0]).unwrap();
        let b = Stats::compute(&[2.0, 3.0, 1.0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_population_is_none() {
        assert!(Stats::compute(&[]).is_none());
    }
}
