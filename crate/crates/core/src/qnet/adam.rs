//! Adam optimizer over the network's parameter shapes, with bias
//! correction and the conventional moment coefficients.

use super::network::{ParamGrads, QNetwork};

#[derive(Debug, Clone)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: u64,
    m: ParamGrads,
    v: ParamGrads,
}

impl Adam {
    pub fn new(net: &QNetwork, learning_rate: f64) -> Self {
        Self {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            m: net.zeros_like_grads(),
            v: net.zeros_like_grads(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One update of `net` along `grads`.
    pub fn step(&mut self, net: &mut QNetwork, grads: &ParamGrads) {
        self.step += 1;
        let lr_t = self.learning_rate * (1.0 - self.beta2.powi(self.step as i32)).sqrt()
            / (1.0 - self.beta1.powi(self.step as i32));
        let mut delta = net.zeros_like_grads();
        let update = |m: &mut [f64], v: &mut [f64], g: &[f64], d: &mut [f64]| {
            for i in 0..g.len() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g[i] * g[i];
                d[i] = -lr_t * m[i] / (v[i].sqrt() + self.epsilon);
            }
        };
        for l in 0..grads.weights.len() {
            update(
                &mut self.m.weights[l],
                &mut self.v.weights[l],
                &grads.weights[l],
                &mut delta.weights[l],
            );
            update(
                &mut self.m.biases[l],
                &mut self.v.biases[l],
                &grads.biases[l],
                &mut delta.biases[l],
            );
        }
        net.apply_update(&delta);
    }
}
