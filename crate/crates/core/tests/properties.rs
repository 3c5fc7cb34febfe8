//! Property tests for the physics and action-algebra invariants.

use proptest::prelude::*;

use ddrl_core::filterfn::{self, PulseSequence};
use ddrl_core::thompson::{apply_map, generator, ActionId, PiecewiseLinearMap};

/// Strategy: a valid interior, strictly increasing pulse sequence on [0, 1].
fn pulse_sequence() -> impl Strategy<Value = PulseSequence> {
    prop::collection::vec(0.001f64..0.999, 0..10).prop_map(|mut times| {
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        times.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        PulseSequence::new(times, 1.0).unwrap()
    })
}

fn action_word(max_len: usize) -> impl Strategy<Value = Vec<ActionId>> {
    prop::collection::vec(0usize..5, 0..max_len)
        .prop_map(|ixs| ixs.into_iter().map(|i| ActionId::from_index(i).unwrap()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn filter_is_nonnegative(seq in pulse_sequence(), omega in 0.0f64..500.0) {
        prop_assert!(filterfn::filter_value(&seq, omega) >= 0.0);
    }

    #[test]
    fn filter_has_time_reversal_symmetry(seq in pulse_sequence(), omega in 0.0f64..200.0) {
        let a = filterfn::filter_value(&seq, omega);
        let b = filterfn::filter_value(&seq.mirrored(), omega);
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn maps_preserve_strict_ordering(seq in pulse_sequence(), word in action_word(16)) {
        let mut current = seq;
        for action in word {
            current = apply_map(&generator(action), &current);
            let times = current.times();
            prop_assert!(times.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(times.iter().all(|&t| t > 0.0 && t < current.total_time()));
        }
    }

    #[test]
    fn apply_then_inverse_round_trips(seq in pulse_sequence(), action_index in 0usize..5) {
        let action = ActionId::from_index(action_index).unwrap();
        let map = generator(action);
        let back = apply_map(&map.inverse(), &apply_map(&map, &seq));
        for (a, b) in seq.times().iter().zip(back.times()) {
            prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn composition_evaluates_like_the_fold(word in action_word(32), x_grid in 0u32..1000) {
        let composed = word
            .iter()
            .rev()
            .fold(PiecewiseLinearMap::identity(), |acc, &a| generator(a).compose(&acc));
        let x = x_grid as f64 / 999.0;
        let mut folded = x;
        for &a in &word {
            folded = generator(a).eval_f64(folded);
        }
        prop_assert!((composed.eval_f64(x) - folded).abs() <= 1e-14);
    }
}
