//! Value-function machinery: network, optimizer, replay buffer, double-Q
//! targets, behavior policy, and the exploration schedule.

mod adam;
mod checkpoint;
mod network;
mod replay;
mod schedule;

pub use adam::Adam;
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CheckpointHeader};
pub use network::{argmax_lowest, ParamGrads, QNetwork};
pub use replay::{Experience, ReplayBuffer};
pub use schedule::EpsilonSchedule;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::thompson::ActionId;

/// Training hyperparameters. Defaults are the benchmark values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentHyperparams {
    pub gamma: f64,
    /// Soft-update rate τ.
    pub tau: f64,
    pub learning_rate: f64,
    pub hidden_size: usize,
    pub buffer_capacity: usize,
    pub minibatch_size: usize,
    /// Below this buffer fill no gradient step is taken.
    pub min_minibatch: usize,
    pub epsilon_initial: f64,
    pub epsilon_review_period: usize,
    /// When true the soft update reads θ⁻ ← (1−τ)·θ⁻ + τ·θ (slow
    /// tracking) instead of the default θ⁻ ← τ·θ⁻ + (1−τ)·θ.
    pub soft_update_transposed: bool,
}

impl Default for AgentHyperparams {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            tau: 0.01,
            learning_rate: 5e-4,
            hidden_size: 32,
            buffer_capacity: 100_000,
            minibatch_size: 128,
            min_minibatch: 25,
            epsilon_initial: 1.0,
            epsilon_review_period: EpsilonSchedule::DEFAULT_REVIEW_PERIOD,
            soft_update_transposed: false,
        }
    }
}

impl AgentHyperparams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("learning_rate", self.learning_rate),
            ("tau", self.tau),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!("gamma must be in [0, 1], got {}", self.gamma)));
        }
        if self.tau >= 1.0 {
            return Err(Error::Config(format!("tau must be in (0, 1), got {}", self.tau)));
        }
        if !(0.0..=1.0).contains(&self.epsilon_initial) {
            return Err(Error::Config(format!(
                "epsilon_initial must be in [0, 1], got {}",
                self.epsilon_initial
            )));
        }
        if self.hidden_size == 0
            || self.buffer_capacity == 0
            || self.minibatch_size == 0
            || self.min_minibatch == 0
            || self.epsilon_review_period == 0
        {
            return Err(Error::Config("sizes and periods must be positive".into()));
        }
        Ok(())
    }

    /// Network shape for `n_pulses` inputs: [N, hidden, hidden, 5].
    pub fn layer_sizes(&self, n_pulses: usize) -> Vec<usize> {
        vec![n_pulses, self.hidden_size, self.hidden_size, ActionId::COUNT]
    }
}

/// ε-greedy behavior policy over the online network's action values.
/// Greedy ties break toward the lowest action index.
pub fn select_action<R: Rng>(
    net: &QNetwork,
    state: &[f64],
    epsilon: f64,
    rng: &mut R,
) -> Result<ActionId> {
    debug_assert!((0.0..=1.0).contains(&epsilon));
    if rng.gen::<f64>() < epsilon {
        let i = rng.gen_range(0..ActionId::COUNT);
        return Ok(ActionId::from_index(i).unwrap());
    }
    let q = net.forward(state)?;
    Ok(ActionId::from_index(argmax_lowest(&q)).unwrap())
}

/// Double-Q targets: the online network picks the follow-up action, the
/// target network prices it. Terminal transitions bootstrap nothing.
pub fn ddqn_targets(
    batch: &[&Experience],
    online: &QNetwork,
    target: &QNetwork,
    gamma: f64,
) -> Result<Vec<f64>> {
    batch
        .iter()
        .map(|e| {
            if e.terminal {
                Ok(e.reward)
            } else {
                let q_online = online.forward(&e.next_state)?;
                let best = argmax_lowest(&q_online);
                let q_target = target.forward(&e.next_state)?;
                Ok(e.reward + gamma * q_target[best])
            }
        })
        .collect()
}

/// Mean-squared temporal-difference loss over the batch and its gradient
/// with respect to the online parameters, targets held fixed.
pub fn loss_and_gradients(
    online: &QNetwork,
    batch: &[&Experience],
    targets: &[f64],
) -> Result<(f64, ParamGrads)> {
    assert_eq!(batch.len(), targets.len());
    assert!(!batch.is_empty());
    let batch_size = batch.len() as f64;
    let mut grads = online.zeros_like_grads();
    let mut loss = 0.0;
    let n_layers = online.layer_sizes().len() - 1;
    for (e, &y) in batch.iter().zip(targets) {
        if e.state.len() != online.input_size() {
            return Err(Error::ShapeMismatch(format!(
                "experience state length {} vs input layer {}",
                e.state.len(),
                online.input_size()
            )));
        }
        let (activations, preactivations) = online.forward_trace_unchecked(&e.state);
        let q = activations.last().unwrap();
        let diff = q[e.action] - y;
        loss += diff * diff / batch_size;

        // Seed: d(loss)/d(q_a) on the taken action only, through the
        // output rectifier.
        let mut delta = vec![0.0; online.output_size()];
        if preactivations[n_layers - 1][e.action] > 0.0 {
            delta[e.action] = 2.0 * diff / batch_size;
        }
        for l in (0..n_layers).rev() {
            let n_in = online.layer_sizes()[l];
            let x = &activations[l];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                let row_w = &mut grads.weights[l][o * n_in..(o + 1) * n_in];
                for (g, xi) in row_w.iter_mut().zip(x) {
                    *g += d * xi;
                }
                grads.biases[l][o] += d;
            }
            if l == 0 {
                break;
            }
            let mut prev = vec![0.0; n_in];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                let row = &online.weights()[l][o * n_in..(o + 1) * n_in];
                for (p, w) in prev.iter_mut().zip(row) {
                    *p += d * w;
                }
            }
            for (p, z) in prev.iter_mut().zip(&preactivations[l - 1]) {
                if *z <= 0.0 {
                    *p = 0.0;
                }
            }
            delta = prev;
        }
    }
    if !loss.is_finite() {
        return Err(Error::NonFinite { context: "temporal-difference loss".into(), value: loss });
    }
    Ok((loss, grads))
}

/// One learning step: double-Q targets, batch loss, one Adam update.
/// Returns the loss before the update.
pub fn backward_and_step(
    online: &mut QNetwork,
    batch: &[&Experience],
    target: &QNetwork,
    gamma: f64,
    adam: &mut Adam,
) -> Result<f64> {
    let targets = ddqn_targets(batch, online, target, gamma)?;
    let (loss, grads) = loss_and_gradients(online, batch, &targets)?;
    adam.step(online, &grads);
    Ok(loss)
}
