//! Canonical initial pulse sequences: PDD, CPMG, UDD, CDD, PRDD.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterfn::PulseSequence;
use crate::rng;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Pdd,
    Cpmg,
    Udd,
    Cdd,
    Prdd,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 5] =
        [FamilyKind::Pdd, FamilyKind::Cpmg, FamilyKind::Udd, FamilyKind::Cdd, FamilyKind::Prdd];

    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Pdd => "pdd",
            FamilyKind::Cpmg => "cpmg",
            FamilyKind::Udd => "udd",
            FamilyKind::Cdd => "cdd",
            FamilyKind::Prdd => "prdd",
        }
    }
}

impl std::fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pdd" => Ok(FamilyKind::Pdd),
            "cpmg" => Ok(FamilyKind::Cpmg),
            "udd" => Ok(FamilyKind::Udd),
            "cdd" => Ok(FamilyKind::Cdd),
            "prdd" => Ok(FamilyKind::Prdd),
            other => Err(Error::InvalidFamily(format!("unknown family '{other}'"))),
        }
    }
}

/// A fully specified initial-sequence request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceFamily {
    pub kind: FamilyKind,
    pub n_pulses: usize,
    pub total_time: f64,
    /// Required for PRDD, ignored otherwise.
    pub rng_seed: Option<u64>,
    /// Required for CDD; its post-cancellation pulse count must equal
    /// `n_pulses`.
    pub cdd_order: Option<u32>,
}

impl SequenceFamily {
    pub fn new(kind: FamilyKind, n_pulses: usize, total_time: f64) -> Self {
        Self { kind, n_pulses, total_time, rng_seed: None, cdd_order: None }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = Some(seed);
        self
    }

    pub fn with_cdd_order(mut self, order: u32) -> Self {
        self.cdd_order = Some(order);
        self
    }
}

/// Concatenation word items for the CDD recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Item {
    /// Free evolution lasting this many base units.
    Free(u64),
    Pulse,
}

/// Pushes an item onto a normalized word, merging adjacent free segments
/// and cancelling adjacent pulse pairs (two coincident π pulses undo each
/// other, which may in turn merge the segments around them).
fn push_normalized(word: &mut Vec<Item>, item: Item) {
    match (word.last_mut(), item) {
        (Some(Item::Free(a)), Item::Free(b)) => *a += b,
        (Some(Item::Pulse), Item::Pulse) => {
            word.pop();
            if let Some(Item::Free(_)) = word.last() {
                if word.len() >= 2 {
                    if let Item::Free(b) = word[word.len() - 1] {
                        if let Item::Free(a) = word[word.len() - 2] {
                            word.truncate(word.len() - 2);
                            push_normalized(word, Item::Free(a + b));
                        }
                    }
                }
            }
        }
        _ => word.push(item),
    }
}

fn cdd_word(order: u32) -> Vec<Item> {
    let mut word = vec![Item::Free(1)];
    for _ in 0..order {
        let lower = word.clone();
        let mut next = Vec::with_capacity(2 * lower.len() + 2);
        for &it in &lower {
            push_normalized(&mut next, it);
        }
        push_normalized(&mut next, Item::Pulse);
        for &it in &lower {
            push_normalized(&mut next, it);
        }
        push_normalized(&mut next, Item::Pulse);
        word = next;
    }
    word
}

/// Exact pulse positions of the order-`order` concatenated sequence as
/// fractions (numerator, 2^order) of the total time. Odd orders end with
/// a pulse at the very boundary (numerator = denominator); such sequences
/// cannot form a valid [`PulseSequence`].
pub fn cdd_pulse_fractions(order: u32) -> Vec<(u64, u64)> {
    let denom = 1u64 << order;
    let mut positions = Vec::new();
    let mut cursor = 0u64;
    for item in cdd_word(order) {
        match item {
            Item::Free(len) => cursor += len,
            Item::Pulse => positions.push((cursor, denom)),
        }
    }
    positions
}

/// Smallest concatenation order whose post-cancellation pulse count is
/// `n_pulses`, if one exists within practical orders.
pub fn cdd_order_for_pulses(n_pulses: usize) -> Option<u32> {
    (1..=16).find(|&order| cdd_pulse_fractions(order).len() == n_pulses)
}

/// Builds the requested initial sequence.
pub fn make_sequence(family: &SequenceFamily) -> Result<PulseSequence> {
    let n = family.n_pulses;
    let t_total = family.total_time;
    if n == 0 {
        return Err(Error::InvalidFamily("n_pulses must be at least 1".into()));
    }
    if !(t_total > 0.0) {
        return Err(Error::InvalidFamily(format!("total_time must be positive, got {t_total}")));
    }
    let times: Vec<f64> = match family.kind {
        FamilyKind::Pdd => {
            (1..=n).map(|j| j as f64 * t_total / (n as f64 + 1.0)).collect()
        }
        FamilyKind::Cpmg => {
            (1..=n).map(|j| (j as f64 - 0.5) * t_total / n as f64).collect()
        }
        FamilyKind::Udd => {
            let half_arg = std::f64::consts::PI / (2.0 * n as f64 + 2.0);
            (1..=n).map(|j| t_total * (j as f64 * half_arg).sin().powi(2)).collect()
        }
        FamilyKind::Cdd => {
            let order = family.cdd_order.ok_or_else(|| {
                Error::InvalidFamily("CDD requires an explicit concatenation order".into())
            })?;
            let fractions = cdd_pulse_fractions(order);
            if fractions.len() != n {
                return Err(Error::InvalidFamily(format!(
                    "CDD order {order} yields {} pulses, not the requested {n}",
                    fractions.len()
                )));
            }
            fractions.iter().map(|&(num, den)| t_total * num as f64 / den as f64).collect()
        }
        FamilyKind::Prdd => {
            let seed = family
                .rng_seed
                .ok_or_else(|| Error::InvalidFamily("PRDD requires an rng seed".into()))?;
            let mut generator = rng::seeded_rng(seed);
            let width = t_total / n as f64;
            (0..n)
                .map(|j| {
                    // u in (0, 1) so subinterval boundaries are never hit.
                    let mut u: f64 = generator.gen();
                    while u == 0.0 {
                        u = generator.gen();
                    }
                    (j as f64 + u) * width
                })
                .collect()
        }
    };
    PulseSequence::new(times, t_total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn udd_single_pulse_is_the_spin_echo() {
        let seq =
            make_sequence(&SequenceFamily::new(FamilyKind::Udd, 1, 1.0)).unwrap();
        assert!((seq.times()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cpmg_two_pulse_placement() {
        let seq =
            make_sequence(&SequenceFamily::new(FamilyKind::Cpmg, 2, 1.0)).unwrap();
        assert_eq!(seq.times(), &[0.25, 0.75]);
    }

    #[test]
    fn pdd_is_equally_spaced() {
        let seq = make_sequence(&SequenceFamily::new(FamilyKind::Pdd, 3, 2.0)).unwrap();
        assert_eq!(seq.times(), &[0.5, 1.0, 1.5]);
    }

    #[test]
    fn cdd_counts_follow_the_recursion() {
        let counts: Vec<usize> = (1..=4).map(|o| cdd_pulse_fractions(o).len()).collect();
        assert_eq!(counts, vec![2, 2, 6, 10]);
    }

    #[test]
    fn cdd_order_four_positions() {
        let seq = make_sequence(
            &SequenceFamily::new(FamilyKind::Cdd, 10, 1.0).with_cdd_order(4),
        )
        .unwrap();
        let expected: Vec<f64> = [1.0, 3.0, 4.0, 5.0, 7.0, 9.0, 11.0, 12.0, 13.0, 15.0]
            .iter()
            .map(|n| n / 16.0)
            .collect();
        assert_eq!(seq.times(), expected.as_slice());
    }

    #[test]
    fn cdd_count_mismatch_is_an_error() {
        let bad = SequenceFamily::new(FamilyKind::Cdd, 10, 1.0).with_cdd_order(3);
        assert!(make_sequence(&bad).is_err());
    }

    #[test]
    fn cdd_order_lookup() {
        assert_eq!(cdd_order_for_pulses(10), Some(4));
        assert_eq!(cdd_order_for_pulses(2), Some(1));
        assert_eq!(cdd_order_for_pulses(7), None);
    }

    #[test]
    fn deterministic_families_are_time_symmetric() {
        for kind in [FamilyKind::Pdd, FamilyKind::Cpmg, FamilyKind::Udd] {
            let seq = make_sequence(&SequenceFamily::new(kind, 7, 1.0)).unwrap();
            let mirrored = seq.mirrored();
            for (a, b) in seq.times().iter().zip(mirrored.times()) {
                assert!((a - b).abs() < 1e-12, "{kind}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn prdd_is_seeded_and_stratified() {
        let fam = SequenceFamily::new(FamilyKind::Prdd, 10, 1.0).with_seed(21);
        let a = make_sequence(&fam).unwrap();
        let b = make_sequence(&fam).unwrap();
        assert_eq!(a, b);
        for (j, &t) in a.times().iter().enumerate() {
            let lo = j as f64 / 10.0;
            let hi = (j as f64 + 1.0) / 10.0;
            assert!(t > lo && t < hi, "pulse {j} at {t} outside ({lo}, {hi})");
        }
        let c = make_sequence(&SequenceFamily::new(FamilyKind::Prdd, 10, 1.0).with_seed(22))
            .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn prdd_without_seed_is_an_error() {
        assert!(make_sequence(&SequenceFamily::new(FamilyKind::Prdd, 4, 1.0)).is_err());
    }
}
