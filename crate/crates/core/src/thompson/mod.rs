//! The action algebra: exact piecewise-linear order-preserving
//! homeomorphisms of [0, 1] with dyadic breakpoints and power-of-two
//! slopes, i.e. elements of Thompson's group F.
//!
//! The agent's five actions are the two standard generators, their
//! inverses, and the identity. Maps are stored with exact dyadic
//! breakpoints; floating point only enters when a map is applied to pulse
//! times, so arbitrarily long composition chains cannot drift.

mod dyadic;

pub use dyadic::Dyadic;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterfn::PulseSequence;

/// An order-preserving piecewise-linear self-map of [0, 1].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseLinearMap {
    /// Breakpoints (x, y), strictly increasing in both coordinates, with
    /// (0,0) first and (1,1) last.
    breakpoints: Vec<(Dyadic, Dyadic)>,
}

impl PiecewiseLinearMap {
    pub fn identity() -> Self {
        Self { breakpoints: vec![(Dyadic::zero(), Dyadic::zero()), (Dyadic::one(), Dyadic::one())] }
    }

    pub fn from_breakpoints(breakpoints: Vec<(Dyadic, Dyadic)>) -> Result<Self> {
        let map = Self { breakpoints }.simplified();
        map.validate()?;
        Ok(map)
    }

    pub fn breakpoints(&self) -> &[(Dyadic, Dyadic)] {
        &self.breakpoints
    }

    fn validate(&self) -> Result<()> {
        if self.breakpoints.len() < 2 {
            return Err(Error::InvalidMap("need at least the two corner breakpoints".into()));
        }
        let first = &self.breakpoints[0];
        let last = &self.breakpoints[self.breakpoints.len() - 1];
        if !(first.0.is_zero() && first.1.is_zero()) {
            return Err(Error::InvalidMap("first breakpoint must be (0, 0)".into()));
        }
        if !(*last == (Dyadic::one(), Dyadic::one())) {
            return Err(Error::InvalidMap("last breakpoint must be (1, 1)".into()));
        }
        for w in self.breakpoints.windows(2) {
            if w[0].0 >= w[1].0 || w[0].1 >= w[1].1 {
                return Err(Error::InvalidMap(
                    "breakpoints must increase strictly in both coordinates".into(),
                ));
            }
        }
        for i in 0..self.breakpoints.len() - 1 {
            if self.segment_slope_exp(i).is_none() {
                return Err(Error::InvalidMap(format!(
                    "segment {i} slope is not a power of two"
                )));
            }
        }
        Ok(())
    }

    /// log₂ of segment `i`'s slope, or None if the slope is not an exact
    /// power of two. With normalized dyadics Δy/Δx is a power of two
    /// exactly when the (odd) numerators coincide.
    pub fn segment_slope_exp(&self, i: usize) -> Option<i64> {
        let (x0, y0) = &self.breakpoints[i];
        let (x1, y1) = &self.breakpoints[i + 1];
        let dx = x1.sub(x0);
        let dy = y1.sub(y0);
        if dx.numerator() == dy.numerator() && !dx.is_negative() && !dx.is_zero() {
            Some(dx.exponent() as i64 - dy.exponent() as i64)
        } else {
            None
        }
    }

    /// Drops interior breakpoints that are collinear with their neighbours.
    fn simplified(mut self) -> Self {
        let mut out: Vec<(Dyadic, Dyadic)> = Vec::with_capacity(self.breakpoints.len());
        for bp in self.breakpoints.drain(..) {
            while out.len() >= 2 {
                let a = &out[out.len() - 2];
                let b = &out[out.len() - 1];
                // b is redundant when (a→b) and (b→bp) have equal slope:
                // Δy1·Δx2 == Δy2·Δx1.
                let lhs = b.1.sub(&a.1).mul(&bp.0.sub(&b.0));
                let rhs = bp.1.sub(&b.1).mul(&b.0.sub(&a.0));
                if lhs == rhs {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(bp);
        }
        Self { breakpoints: out }
    }

    /// Exact evaluation at a dyadic x in [0, 1].
    pub fn eval(&self, x: &Dyadic) -> Dyadic {
        debug_assert!(!x.is_negative() && *x <= Dyadic::one());
        let i = self.segment_left_of_x(x);
        let (x0, y0) = &self.breakpoints[i];
        let s = self.segment_slope_exp(i).expect("validated map");
        y0.add(&x.sub(x0).mul_pow2(s))
    }

    /// Exact evaluation of the inverse at a dyadic y in [0, 1].
    pub fn eval_inverse(&self, y: &Dyadic) -> Dyadic {
        debug_assert!(!y.is_negative() && *y <= Dyadic::one());
        let i = self.segment_left_of_y(y);
        let (x0, y0) = &self.breakpoints[i];
        let s = self.segment_slope_exp(i).expect("validated map");
        x0.add(&y.sub(y0).mul_pow2(-s))
    }

    fn segment_left_of_x(&self, x: &Dyadic) -> usize {
        let n = self.breakpoints.len();
        match self.breakpoints.binary_search_by(|(bx, _)| bx.cmp(x)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    fn segment_left_of_y(&self, y: &Dyadic) -> usize {
        let n = self.breakpoints.len();
        match self.breakpoints.binary_search_by(|(_, by)| by.cmp(y)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    /// Floating-point evaluation at x in [0, 1].
    pub fn eval_f64(&self, x: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&x));
        let xs: Vec<f64> = self.breakpoints.iter().map(|(bx, _)| bx.to_f64()).collect();
        let i = match xs.binary_search_by(|bx| bx.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(xs.len() - 2),
        };
        let x0 = xs[i];
        let y0 = self.breakpoints[i].1.to_f64();
        let slope = (self.segment_slope_exp(i).expect("validated map") as f64).exp2();
        y0 + (x - x0) * slope
    }

    /// The group inverse: breakpoints reflected across the diagonal.
    pub fn inverse(&self) -> Self {
        Self {
            breakpoints: self.breakpoints.iter().map(|(x, y)| (y.clone(), x.clone())).collect(),
        }
    }

    /// Exact composition self ∘ inner (apply `inner` first).
    ///
    /// Breakpoints of the result lie at inner's breakpoints and at the
    /// inner-preimages of self's breakpoints; both sets are dyadic because
    /// slopes are powers of two. Collinear points are merged, so the
    /// breakpoint count never exceeds the sum of the inputs' counts.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut xs: Vec<Dyadic> =
            inner.breakpoints.iter().map(|(x, _)| x.clone()).collect();
        for (ox, _) in &self.breakpoints {
            xs.push(inner.eval_inverse(ox));
        }
        xs.sort();
        xs.dedup();
        let breakpoints = xs
            .into_iter()
            .map(|x| {
                let y = self.eval(&inner.eval(&x));
                (x, y)
            })
            .collect();
        let composed = Self { breakpoints }.simplified();
        debug_assert!(composed.validate().is_ok());
        composed
    }
}

/// The five agent actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionId {
    X0,
    X0Inv,
    X1,
    X1Inv,
    Id,
}

impl ActionId {
    pub const ALL: [ActionId; 5] =
        [ActionId::X0, ActionId::X0Inv, ActionId::X1, ActionId::X1Inv, ActionId::Id];

    pub const COUNT: usize = 5;

    pub fn index(&self) -> usize {
        match self {
            ActionId::X0 => 0,
            ActionId::X0Inv => 1,
            ActionId::X1 => 2,
            ActionId::X1Inv => 3,
            ActionId::Id => 4,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(&self) -> &'static str {
        match self {
            ActionId::X0 => "x0",
            ActionId::X0Inv => "x0^-1",
            ActionId::X1 => "x1",
            ActionId::X1Inv => "x1^-1",
            ActionId::Id => "id",
        }
    }
}

impl std::fmt::Display for ActionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ActionId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x0" => Ok(ActionId::X0),
            "x0^-1" => Ok(ActionId::X0Inv),
            "x1" => Ok(ActionId::X1),
            "x1^-1" => Ok(ActionId::X1Inv),
            "id" => Ok(ActionId::Id),
            other => Err(Error::MalformedActionWord(format!("unknown action '{other}'"))),
        }
    }
}

/// Serializes an action list as a space-separated word.
pub fn format_action_word(word: &[ActionId]) -> String {
    word.iter().map(ActionId::name).collect::<Vec<_>>().join(" ")
}

/// Parses a space-separated action word.
pub fn parse_action_word(text: &str) -> Result<Vec<ActionId>> {
    text.split_whitespace().map(str::parse).collect()
}

fn d(num: i64, exp: u32) -> Dyadic {
    Dyadic::new(num, exp)
}

/// The exact breakpoint representation of an action.
///
/// x₀ sends 1/2 ↦ 1/4 (the standard orientation); x₁ is the identity on
/// [0, 1/2] and a half-scale copy of x₀ on [1/2, 1]; inverses are the
/// diagonal reflections.
pub fn generator(action: ActionId) -> PiecewiseLinearMap {
    let x0 = || PiecewiseLinearMap {
        breakpoints: vec![
            (Dyadic::zero(), Dyadic::zero()),
            (d(1, 1), d(1, 2)),
            (d(3, 2), d(1, 1)),
            (Dyadic::one(), Dyadic::one()),
        ],
    };
    let x1 = || PiecewiseLinearMap {
        breakpoints: vec![
            (Dyadic::zero(), Dyadic::zero()),
            (d(1, 1), d(1, 1)),
            (d(3, 2), d(5, 3)),
            (d(7, 3), d(3, 2)),
            (Dyadic::one(), Dyadic::one()),
        ],
    };
    match action {
        ActionId::X0 => x0(),
        ActionId::X0Inv => x0().inverse(),
        ActionId::X1 => x1(),
        ActionId::X1Inv => x1().inverse(),
        ActionId::Id => PiecewiseLinearMap::identity(),
    }
}

/// Applies a map to a pulse sequence: t ↦ T·map(t/T).
///
/// Monotonicity keeps the times ordered; rounding in the f64 evaluation
/// may collapse neighbouring times onto each other, which the physics
/// evaluation cancels in pairs.
pub fn apply_map(map: &PiecewiseLinearMap, seq: &PulseSequence) -> PulseSequence {
    let t_total = seq.total_time();
    let times: Vec<f64> = seq.times().iter().map(|&t| t_total * map.eval_f64(t / t_total)).collect();
    PulseSequence::from_mapped_times(times, t_total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_breakpoint_values() {
        let x0 = generator(ActionId::X0);
        assert_eq!(x0.eval(&d(1, 1)), d(1, 2)); // x0(1/2) = 1/4
        let x1 = generator(ActionId::X1);
        assert_eq!(x1.eval(&d(1, 2)), d(1, 2)); // identity below 1/2
        assert_eq!(x1.eval(&d(3, 2)), d(5, 3)); // x1(3/4) = 5/8
        let id = generator(ActionId::Id);
        for i in 0..=16 {
            let x = d(i, 4);
            assert_eq!(id.eval(&x), x);
        }
    }

    #[test]
    fn inverse_composes_to_identity() {
        for action in [ActionId::X0, ActionId::X1] {
            let g = generator(action);
            let composed = g.compose(&g.inverse());
            assert_eq!(composed, PiecewiseLinearMap::identity(), "{action}");
            let composed = g.inverse().compose(&g);
            assert_eq!(composed, PiecewiseLinearMap::identity(), "{action}");
        }
    }

    #[test]
    fn identity_is_neutral() {
        let id = PiecewiseLinearMap::identity();
        for action in ActionId::ALL {
            let m = generator(action);
            assert_eq!(id.compose(&m), m);
            assert_eq!(m.compose(&id), m);
        }
    }

    #[test]
    fn composition_matches_pointwise_application() {
        let f = generator(ActionId::X0);
        let g = generator(ActionId::X1Inv);
        let fg = f.compose(&g);
        for i in 0..=64 {
            let x = d(i, 6);
            assert_eq!(fg.eval(&x), f.eval(&g.eval(&x)));
        }
    }

    #[test]
    fn breakpoint_count_is_bounded_by_sum() {
        let f = generator(ActionId::X0);
        let g = generator(ActionId::X1);
        let fg = f.compose(&g);
        assert!(fg.breakpoints().len() <= f.breakpoints().len() + g.breakpoints().len());
    }

    #[test]
    fn slopes_are_powers_of_two_after_composition() {
        let mut m = PiecewiseLinearMap::identity();
        for action in [ActionId::X0, ActionId::X1, ActionId::X0Inv, ActionId::X1, ActionId::X0] {
            m = generator(action).compose(&m);
        }
        for i in 0..m.breakpoints().len() - 1 {
            assert!(m.segment_slope_exp(i).is_some());
        }
    }

    #[test]
    fn apply_map_examples() {
        let echo = PulseSequence::new(vec![0.5], 1.0).unwrap();
        let id_applied = apply_map(&generator(ActionId::Id), &echo);
        assert_eq!(id_applied.times(), echo.times());

        let squeezed = apply_map(&generator(ActionId::X0), &echo);
        assert_eq!(squeezed.times(), &[0.25]);

        // Same map rescaled onto [0, 2].
        let long = PulseSequence::new(vec![1.0], 2.0).unwrap();
        let mapped = apply_map(&generator(ActionId::X0), &long);
        assert_eq!(mapped.times(), &[0.5]);
        assert_eq!(mapped.total_time(), 2.0);
    }

    #[test]
    fn apply_map_round_trip() {
        let seq = PulseSequence::new(vec![0.13, 0.27, 0.5, 0.61, 0.93], 1.0).unwrap();
        for action in ActionId::ALL {
            let m = generator(action);
            let there = apply_map(&m, &seq);
            let back = apply_map(&m.inverse(), &there);
            for (a, b) in seq.times().iter().zip(back.times()) {
                assert!((a - b).abs() < 1e-12, "{action}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn action_word_round_trip() {
        let word = vec![ActionId::X0, ActionId::X1Inv, ActionId::Id, ActionId::X0Inv];
        let text = format_action_word(&word);
        assert_eq!(text, "x0 x1^-1 id x0^-1");
        assert_eq!(parse_action_word(&text).unwrap(), word);
        assert!(parse_action_word("x0 bogus").is_err());
    }

    #[test]
    fn from_breakpoints_validates() {
        // Slope 3 segment is rejected.
        let bad = vec![
            (Dyadic::zero(), Dyadic::zero()),
            (d(1, 2), d(3, 2)),
            (Dyadic::one(), Dyadic::one()),
        ];
        assert!(PiecewiseLinearMap::from_breakpoints(bad).is_err());
        // Non-monotone y is rejected.
        let bad = vec![
            (Dyadic::zero(), Dyadic::zero()),
            (d(1, 1), d(3, 2)),
            (d(3, 2), d(1, 1)),
            (Dyadic::one(), Dyadic::one()),
        ];
        assert!(PiecewiseLinearMap::from_breakpoints(bad).is_err());
    }
}
