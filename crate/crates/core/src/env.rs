//! The deterministic episode MDP: state = pulse sequence, actions = five
//! piecewise-linear maps, reward = 0 except at the terminal step.
//!
//! The agent sees the raw time vector scaled to [0, 1]; the step counter
//! stays inside the environment because fixed-length episodes make the
//! horizon implicit. Per episode the fidelity is evaluated exactly once,
//! at the terminal step.

use crate::error::{Error, Result};
use crate::filterfn::{self, PulseSequence, QuadratureConfig};
use crate::spectra::NoiseSpectrum;
use crate::thompson::{apply_map, generator, ActionId};

/// Everything a single episode needs, with the initial fidelity cached.
#[derive(Debug, Clone)]
pub struct EpisodeConfig {
    pub initial_sequence: PulseSequence,
    pub spectrum: NoiseSpectrum,
    pub max_steps: usize,
    pub quad: QuadratureConfig,
    /// Fidelity of `initial_sequence`, evaluated once at construction.
    pub p_initial: f64,
}

impl EpisodeConfig {
    pub fn new(
        initial_sequence: PulseSequence,
        spectrum: NoiseSpectrum,
        max_steps: usize,
        quad: Option<QuadratureConfig>,
    ) -> Result<Self> {
        if max_steps == 0 {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        let quad = quad.unwrap_or_else(|| QuadratureConfig::for_sequence(&initial_sequence));
        let p_initial = filterfn::chi(&initial_sequence, &spectrum, &quad)?.p_avg;
        if p_initial >= 1.0 {
            return Err(Error::DegenerateInitialFidelity(p_initial));
        }
        Ok(Self { initial_sequence, spectrum, max_steps, quad, p_initial })
    }
}

/// One step of experience.
#[derive(Debug, Clone)]
pub struct Transition {
    pub state: PulseSequence,
    pub action: ActionId,
    pub reward: f64,
    pub next_state: PulseSequence,
    pub terminal: bool,
}

/// A single-agent environment instance. Distinct instances share nothing
/// and may run concurrently.
#[derive(Debug, Clone)]
pub struct Environment {
    config: EpisodeConfig,
    current: PulseSequence,
    step_index: usize,
    fidelity_evaluations: u64,
    last_terminal_fidelity: Option<f64>,
}

impl Environment {
    pub fn new(config: EpisodeConfig) -> Self {
        let current = config.initial_sequence.clone();
        Self {
            config,
            current,
            step_index: 0,
            fidelity_evaluations: 0,
            last_terminal_fidelity: None,
        }
    }

    pub fn config(&self) -> &EpisodeConfig {
        &self.config
    }

    /// Starts a fresh episode; no state carries over.
    pub fn reset(&mut self) -> &PulseSequence {
        self.current = self.config.initial_sequence.clone();
        self.step_index = 0;
        self.last_terminal_fidelity = None;
        &self.current
    }

    pub fn state(&self) -> &PulseSequence {
        &self.current
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    /// Total number of fidelity (χ) evaluations this instance performed.
    pub fn fidelity_evaluations(&self) -> u64 {
        self.fidelity_evaluations
    }

    /// p_avg measured at the last terminal step of a completed episode.
    pub fn last_terminal_fidelity(&self) -> Option<f64> {
        self.last_terminal_fidelity
    }

    /// Applies one action. The reward is zero until the terminal step,
    /// where the fidelity is measured (the episode's single evaluation)
    /// and fed through [`reward_fn`].
    pub fn step(&mut self, action: ActionId) -> Result<Transition> {
        assert!(
            self.step_index < self.config.max_steps,
            "episode is over; call reset() before stepping again"
        );
        let state = self.current.clone();
        let next_state = apply_map(&generator(action), &state);
        let terminal = self.step_index + 1 == self.config.max_steps;
        let reward = if terminal {
            self.fidelity_evaluations += 1;
            let p_final =
                filterfn::chi(&next_state, &self.config.spectrum, &self.config.quad)?.p_avg;
            self.last_terminal_fidelity = Some(p_final);
            reward_fn(self.config.p_initial, p_final)?
        } else {
            0.0
        };
        self.current = next_state.clone();
        self.step_index += 1;
        Ok(Transition { state, action, reward, next_state, terminal })
    }
}

/// Terminal reward (1 − p_i)·p_f / ((1 − p_i) + (1 − p_f)), bounded in
/// [0, 1], strictly increasing in p_f, and increasingly steep near
/// p_f = 1 as p_i → 1 so late marginal gains stay incentivized.
pub fn reward_fn(p_initial: f64, p_final: f64) -> Result<f64> {
    if p_initial >= 1.0 {
        return Err(Error::DegenerateInitialFidelity(p_initial));
    }
    debug_assert!((0.5..1.0).contains(&p_initial), "p_initial {p_initial}");
    debug_assert!((0.5..=1.0).contains(&p_final), "p_final {p_final}");
    let a = 1.0 - p_initial;
    let b = 1.0 - p_final;
    Ok((a * p_final) / (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{Lorentzian, NoiseSpectrum};
    use std::f64::consts::PI;

    fn config(max_steps: usize) -> EpisodeConfig {
        let seq = PulseSequence::new(vec![0.25, 0.75], 1.0).unwrap();
        let spectrum = NoiseSpectrum::new(vec![Lorentzian::new(4.0, 0.0, PI)], 0.0);
        EpisodeConfig::new(seq, spectrum, max_steps, None).unwrap()
    }

    #[test]
    fn reward_examples() {
        assert_eq!(reward_fn(0.5, 1.0).unwrap(), 1.0);
        for p in [0.5, 0.7, 0.9] {
            let r = reward_fn(p, p).unwrap();
            assert!((r - p / 2.0).abs() < 1e-15, "p {p}: {r}");
        }
        // Improvement reported for the worked training example.
        let r = reward_fn(0.633, 0.911).unwrap();
        let direct = (1.0 - 0.633) * 0.911 / ((1.0 - 0.633) + (1.0 - 0.911));
        assert_eq!(r, direct);
        assert!(r > 0.0 && r < 1.0);
    }

    #[test]
    fn reward_rejects_degenerate_start() {
        assert!(matches!(reward_fn(1.0, 0.9), Err(Error::DegenerateInitialFidelity(_))));
    }

    #[test]
    fn reward_is_increasing_in_p_final() {
        for &p_initial in &[0.5, 0.6, 0.75, 0.9, 0.99] {
            let mut last = -1.0;
            for i in 0..=100 {
                let p_final = 0.5 + 0.5 * i as f64 / 100.0;
                let r = reward_fn(p_initial, p_final).unwrap();
                assert!((0.0..=1.0).contains(&r));
                assert!(r > last, "p_initial {p_initial}, p_final {p_final}");
                last = r;
            }
        }
    }

    #[test]
    fn reward_slope_near_one_grows_with_p_initial() {
        let slope = |p_initial: f64| {
            let h = 1e-6;
            (reward_fn(p_initial, 0.99 + h).unwrap() - reward_fn(p_initial, 0.99 - h).unwrap())
                / (2.0 * h)
        };
        assert!(slope(0.9) > slope(0.6));
    }

    #[test]
    fn reset_restores_the_initial_state() {
        let mut env = Environment::new(config(4));
        let initial = env.config().initial_sequence.clone();
        assert_eq!(env.reset(), &initial);
        env.step(ActionId::X0).unwrap();
        assert_ne!(env.state(), &initial);
        assert_eq!(env.reset(), &initial);
        assert_eq!(env.reset(), &initial);
        assert_eq!(env.step_index(), 0);
    }

    #[test]
    fn rewards_are_sparse_and_terminal() {
        let m = 5;
        let mut env = Environment::new(config(m));
        env.reset();
        for i in 0..m {
            let tr = env.step(ActionId::X1).unwrap();
            if i + 1 < m {
                assert_eq!(tr.reward, 0.0);
                assert!(!tr.terminal);
            } else {
                assert!(tr.terminal);
                assert!(tr.reward > 0.0);
            }
        }
        assert_eq!(env.fidelity_evaluations(), 1);
    }

    #[test]
    fn all_identity_episode_scores_the_initial_fidelity() {
        let m = 6;
        let mut env = Environment::new(config(m));
        env.reset();
        let mut last = None;
        for _ in 0..m {
            last = Some(env.step(ActionId::Id).unwrap());
        }
        let tr = last.unwrap();
        let p = env.config().p_initial;
        assert_eq!(tr.next_state, env.config().initial_sequence);
        assert_eq!(tr.reward, reward_fn(p, p).unwrap());
        assert_eq!(env.last_terminal_fidelity(), Some(env.config().p_initial));
    }

    #[test]
    fn single_squeeze_on_the_spin_echo() {
        let seq = PulseSequence::new(vec![0.5], 1.0).unwrap();
        let spectrum = NoiseSpectrum::new(vec![Lorentzian::new(4.0, 0.0, PI)], 0.0);
        let cfg = EpisodeConfig::new(seq, spectrum, 2, None).unwrap();
        let mut env = Environment::new(cfg);
        env.reset();
        let tr = env.step(ActionId::X0).unwrap();
        assert_eq!(tr.next_state.times(), &[0.25]);
    }

    #[test]
    fn one_fidelity_evaluation_per_episode() {
        let m = 3;
        let mut env = Environment::new(config(m));
        for episode in 1..=4 {
            env.reset();
            for _ in 0..m {
                env.step(ActionId::X0Inv).unwrap();
            }
            assert_eq!(env.fidelity_evaluations(), episode);
        }
    }

    #[test]
    fn episodes_are_bitwise_deterministic() {
        let word = [ActionId::X0, ActionId::X1, ActionId::X1Inv, ActionId::X0Inv, ActionId::X1];
        let run = || {
            let mut env = Environment::new(config(word.len()));
            env.reset();
            let mut reward = 0.0;
            for &a in &word {
                reward = env.step(a).unwrap().reward;
            }
            (reward, env.state().times().to_vec())
        };
        let (r1, t1) = run();
        let (r2, t2) = run();
        assert_eq!(r1.to_bits(), r2.to_bits());
        assert_eq!(t1, t2);
    }

    #[test]
    fn zero_spectrum_start_is_degenerate() {
        let seq = PulseSequence::new(vec![0.5], 1.0).unwrap();
        let spectrum = NoiseSpectrum::new(vec![], 0.0);
        assert!(matches!(
            EpisodeConfig::new(seq, spectrum, 4, None),
            Err(Error::DegenerateInitialFidelity(_))
        ));
    }
}
