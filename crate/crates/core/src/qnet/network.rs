//! Fully connected value network with rectified-linear units on every
//! layer, including the output. Non-negative Q estimates match rewards
//! bounded in [0, 1] under γ < 1.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

/// Dense network; `weights[l]` is the out×in matrix of layer `l` stored
/// row-major (`weights[l][o * n_in + i]`).
#[derive(Debug, Clone, PartialEq)]
pub struct QNetwork {
    layer_sizes: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

/// Parameter gradients (or any parameter-shaped buffer).
#[derive(Debug, Clone)]
pub struct ParamGrads {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl QNetwork {
    /// Initializes weights from U(−a, a) with a = 0.5·√(6/(n_in + n_out))
    /// per layer (Xavier bound with gain 0.5) and biases from U(0, 1).
    /// Draw order per layer: all weights row-major, then the biases.
    pub fn init(layer_sizes: &[usize], seed: u64) -> Self {
        assert!(layer_sizes.len() >= 2, "need input and output layers");
        assert!(layer_sizes.iter().all(|&n| n > 0));
        let mut generator = rng::seeded_rng(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..layer_sizes.len() - 1 {
            let (n_in, n_out) = (layer_sizes[l], layer_sizes[l + 1]);
            let bound = 0.5 * (6.0 / (n_in + n_out) as f64).sqrt();
            let w: Vec<f64> =
                (0..n_in * n_out).map(|_| generator.gen_range(-bound..bound)).collect();
            let b: Vec<f64> = (0..n_out).map(|_| generator.gen::<f64>()).collect();
            weights.push(w);
            biases.push(b);
        }
        Self { layer_sizes: layer_sizes.to_vec(), weights, biases }
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub(crate) fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn zeros_like_grads(&self) -> ParamGrads {
        ParamGrads {
            weights: self.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: self.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    /// Action values for one observation.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.input_size() {
            return Err(Error::ShapeMismatch(format!(
                "input length {} does not match input layer {}",
                input.len(),
                self.input_size()
            )));
        }
        if let Some(&bad) = input.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "network input".into(), value: bad });
        }
        let (mut activations, _) = self.forward_trace_unchecked(input);
        Ok(activations.pop().unwrap())
    }

    /// Forward pass keeping every layer's post-activation and
    /// pre-activation, for backpropagation. `activations[0]` is the input.
    pub(crate) fn forward_trace_unchecked(
        &self,
        input: &[f64],
    ) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut activations = Vec::with_capacity(self.layer_sizes.len());
        let mut preactivations = Vec::with_capacity(self.layer_sizes.len() - 1);
        activations.push(input.to_vec());
        for l in 0..self.weights.len() {
            let n_in = self.layer_sizes[l];
            let n_out = self.layer_sizes[l + 1];
            let x = &activations[l];
            let mut z = self.biases[l].clone();
            for o in 0..n_out {
                let row = &self.weights[l][o * n_in..(o + 1) * n_in];
                let mut acc = 0.0;
                for (w, xi) in row.iter().zip(x) {
                    acc += w * xi;
                }
                z[o] += acc;
            }
            let a = z.iter().map(|&v| v.max(0.0)).collect();
            preactivations.push(z);
            activations.push(a);
        }
        (activations, preactivations)
    }

    /// θ⁻ ← τ·θ⁻ + (1 − τ)·θ applied elementwise, with `self` as θ⁻.
    ///
    /// This is the printed convention: small τ makes the target track the
    /// online network almost immediately. `transposed` swaps the weights
    /// (θ⁻ ← (1 − τ)·θ⁻ + τ·θ), the slow-tracking convention common
    /// elsewhere; which one a run used is recorded in its reports.
    pub fn soft_update_from(&mut self, online: &QNetwork, tau: f64, transposed: bool) -> Result<()> {
        if self.layer_sizes != online.layer_sizes {
            return Err(Error::ShapeMismatch(format!(
                "target {:?} vs online {:?}",
                self.layer_sizes, online.layer_sizes
            )));
        }
        let (keep, take) = if transposed { (1.0 - tau, tau) } else { (tau, 1.0 - tau) };
        let blend = |dst: &mut Vec<f64>, src: &Vec<f64>| {
            for (d, s) in dst.iter_mut().zip(src) {
                *d = keep * *d + take * *s;
            }
        };
        for (d, s) in self.weights.iter_mut().zip(&online.weights) {
            blend(d, s);
        }
        for (d, s) in self.biases.iter_mut().zip(&online.biases) {
            blend(d, s);
        }
        Ok(())
    }

    /// Flattens every parameter (layer by layer: weights then biases) into
    /// one vector; the checkpoint byte order.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in 0..self.weights.len() {
            out.extend_from_slice(&self.weights[l]);
            out.extend_from_slice(&self.biases[l]);
        }
        out
    }

    pub fn param_count(&self) -> usize {
        self.weights.iter().map(Vec::len).sum::<usize>()
            + self.biases.iter().map(Vec::len).sum::<usize>()
    }

    pub fn from_flat(layer_sizes: &[usize], flat: &[f64]) -> Result<Self> {
        let mut net = Self::init(layer_sizes, 0);
        let mut cursor = 0;
        for l in 0..net.weights.len() {
            let nw = net.weights[l].len();
            let nb = net.biases[l].len();
            if cursor + nw + nb > flat.len() {
                return Err(Error::ShapeMismatch("flat parameter vector too short".into()));
            }
            net.weights[l].copy_from_slice(&flat[cursor..cursor + nw]);
            cursor += nw;
            net.biases[l].copy_from_slice(&flat[cursor..cursor + nb]);
            cursor += nb;
        }
        if cursor != flat.len() {
            return Err(Error::ShapeMismatch("flat parameter vector too long".into()));
        }
        Ok(net)
    }

    /// Applies a parameter-shaped update in place (used by the optimizer).
    pub(crate) fn apply_update(&mut self, delta: &ParamGrads) {
        for (w, d) in self.weights.iter_mut().zip(&delta.weights) {
            for (wi, di) in w.iter_mut().zip(d) {
                *wi += di;
            }
        }
        for (b, d) in self.biases.iter_mut().zip(&delta.biases) {
            for (bi, di) in b.iter_mut().zip(d) {
                *bi += di;
            }
        }
    }
}

/// Index of the largest value, ties broken toward the lowest index.
pub fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
