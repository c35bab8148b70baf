//! Minimal fully connected network engine.
//!
//! Dense layers with tanh or ReLU hidden activations and a linear output
//! layer. Training (relative-loss backpropagation, Adam, mini-batching)
//! lives in [`train`]. Everything is deterministic given the seeds.

mod train;

pub use train::{
    adam_step, backward, relative_loss, train, AdamConfig, AdamState, BatchLoss, Gradients,
    LossNorm, LrSchedule, TrainConfig, TrainHistory, TrainingSet,
};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NeuralError {
    #[error("dimension mismatch: got {got}, expected {expected} ({context})")]
    DimensionMismatch { got: usize, expected: usize, context: &'static str },
    #[error("invalid network spec: {0}")]
    InvalidSpec(String),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("relative loss undefined: all targets are zero")]
    ZeroTargets,
    #[error("training diverged at epoch {epoch} (loss {loss})")]
    Diverged { epoch: usize, loss: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Relu,
}

impl Activation {
    #[inline]
    pub(crate) fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
        }
    }

    /// Derivative expressed through the activation value itself.
    #[inline]
    pub(crate) fn deriv_from_value(self, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Architecture of a fully connected network; the output layer is linear.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub input_dim: usize,
    pub output_dim: usize,
    pub hidden_layers: Vec<usize>,
    pub activation: Activation,
}

impl NetworkSpec {
    pub fn new(input_dim: usize, hidden_layers: Vec<usize>, output_dim: usize) -> Self {
        Self { input_dim, output_dim, hidden_layers, activation: Activation::Tanh }
    }

    pub fn validate(&self) -> Result<(), NeuralError> {
        if self.input_dim == 0 || self.output_dim == 0 {
            return Err(NeuralError::InvalidSpec("zero input or output width".into()));
        }
        if self.hidden_layers.is_empty() {
            return Err(NeuralError::InvalidSpec("no hidden layers".into()));
        }
        if self.hidden_layers.iter().any(|&w| w == 0) {
            return Err(NeuralError::InvalidSpec("zero-width hidden layer".into()));
        }
        Ok(())
    }

    /// Layer widths including input and output: [in, h_1, ..., h_k, out].
    pub fn layer_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.hidden_layers.len() + 2);
        dims.push(self.input_dim);
        dims.extend_from_slice(&self.hidden_layers);
        dims.push(self.output_dim);
        dims
    }

    pub fn num_layers(&self) -> usize {
        self.hidden_layers.len() + 1
    }
}

/// Weights and biases; layer l stores a row-major (width_l x width_{l-1})
/// matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkParameters {
    pub spec: NetworkSpec,
    pub seed: u64,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl NetworkParameters {
    pub fn num_parameters(&self) -> usize {
        self.weights.iter().map(Vec::len).sum::<usize>()
            + self.biases.iter().map(Vec::len).sum::<usize>()
    }

    pub fn all_finite(&self) -> bool {
        self.weights.iter().chain(self.biases.iter()).flatten().all(|v| v.is_finite())
    }

    /// Zero-filled parameters with the same shapes (gradient/moment buffers).
    pub(crate) fn zeros_like(spec: &NetworkSpec) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let dims = spec.layer_dims();
        let mut weights = Vec::with_capacity(dims.len() - 1);
        let mut biases = Vec::with_capacity(dims.len() - 1);
        for l in 1..dims.len() {
            weights.push(vec![0.0; dims[l] * dims[l - 1]]);
            biases.push(vec![0.0; dims[l]]);
        }
        (weights, biases)
    }
}

/// Glorot-uniform weights, zero biases, deterministic in the seed.
pub fn init_params(spec: &NetworkSpec, seed: u64) -> Result<NetworkParameters, NeuralError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = spec.layer_dims();
    let mut weights = Vec::with_capacity(dims.len() - 1);
    let mut biases = Vec::with_capacity(dims.len() - 1);
    for l in 1..dims.len() {
        let (fan_in, fan_out) = (dims[l - 1], dims[l]);
        let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let w = (0..fan_in * fan_out)
            .map(|_| (2.0 * rng.gen::<f64>() - 1.0) * bound)
            .collect();
        weights.push(w);
        biases.push(vec![0.0; fan_out]);
    }
    Ok(NetworkParameters { spec: spec.clone(), seed, weights, biases })
}

/// Unrolled dot product; fixed association order keeps results reproducible
/// while breaking the add dependency chain.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    let mut acc = [0.0f64; 4];
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        s += x * y;
    }
    s
}

/// Per-thread scratch space; reusing it avoids allocating in the training
/// inner loop.
#[derive(Clone, Debug)]
pub(crate) struct Workspace {
    /// activations[0] holds the input, activations[L] the linear output
    pub activations: Vec<Vec<f64>>,
    pub deltas: Vec<Vec<f64>>,
}

impl Workspace {
    pub fn new(spec: &NetworkSpec) -> Self {
        let dims = spec.layer_dims();
        Workspace {
            activations: dims.iter().map(|&w| vec![0.0; w]).collect(),
            deltas: dims[1..].iter().map(|&w| vec![0.0; w]).collect(),
        }
    }
}

/// Forward pass writing activations into the workspace; returns nothing,
/// the output lives in `ws.activations.last()`.
pub(crate) fn forward_into(params: &NetworkParameters, x: &[f64], ws: &mut Workspace) {
    debug_assert_eq!(x.len(), params.spec.input_dim);
    ws.activations[0].copy_from_slice(x);
    let n_layers = params.weights.len();
    for l in 0..n_layers {
        let in_dim = ws.activations[l].len();
        let (before, after) = ws.activations.split_at_mut(l + 1);
        let input = &before[l];
        let out = &mut after[0];
        let w = &params.weights[l];
        let b = &params.biases[l];
        let last = l + 1 == n_layers;
        for (i, (row, out_i)) in w.chunks_exact(in_dim).zip(out.iter_mut()).enumerate() {
            let z = b[i] + dot(row, input);
            *out_i = if last { z } else { params.spec.activation.apply(z) };
        }
    }
}

/// Forward pass through the network: affine chain with nonlinear hidden
/// activations and a linear output layer.
pub fn forward(params: &NetworkParameters, x: &[f64]) -> Result<Vec<f64>, NeuralError> {
    if x.len() != params.spec.input_dim {
        return Err(NeuralError::DimensionMismatch {
            got: x.len(),
            expected: params.spec.input_dim,
            context: "forward input",
        });
    }
    let mut ws = Workspace::new(&params.spec);
    forward_into(params, x, &mut ws);
    Ok(ws.activations.last().unwrap().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_is_deterministic_and_shaped() {
        let spec = NetworkSpec::new(2, vec![3], 1);
        let a = init_params(&spec, 9).unwrap();
        let b = init_params(&spec, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.weights[0].len(), 6);
        assert_eq!(a.weights[1].len(), 3);
        assert_eq!(a.biases[0].len(), 3);
        assert_eq!(a.biases[1].len(), 1);
        let c = init_params(&spec, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn init_respects_glorot_bound() {
        let spec = NetworkSpec::new(2, vec![32, 32, 32], 1);
        let p = init_params(&spec, 1).unwrap();
        let dims = spec.layer_dims();
        for (l, w) in p.weights.iter().enumerate() {
            let bound = (6.0 / (dims[l] + dims[l + 1]) as f64).sqrt();
            assert!(w.iter().all(|v| v.abs() <= bound), "layer {l} exceeds Glorot bound");
        }
        assert!(p.biases.iter().flatten().all(|&b| b == 0.0));
    }

    #[test]
    fn zero_network_outputs_zero() {
        let spec = NetworkSpec::new(2, vec![4], 2);
        let mut p = init_params(&spec, 0).unwrap();
        for w in &mut p.weights {
            w.iter_mut().for_each(|v| *v = 0.0);
        }
        let y = forward(&p, &[1.0, -2.0]).unwrap();
        assert_eq!(y, vec![0.0, 0.0]);
    }

    #[test]
    fn forward_matches_hand_computation() {
        // 2 -> [1] -> 1 tanh network with fixed small weights
        let spec = NetworkSpec::new(2, vec![1], 1);
        let mut p = init_params(&spec, 0).unwrap();
        p.weights[0] = vec![0.3, -0.2];
        p.biases[0] = vec![0.1];
        p.weights[1] = vec![2.0];
        p.biases[1] = vec![-0.5];
        let x = [0.7, 0.4];
        let hidden = (0.3f64 * 0.7 - 0.2 * 0.4 + 0.1).tanh();
        let expected = 2.0 * hidden - 0.5;
        let y = forward(&p, &x).unwrap();
        assert!((y[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn forward_rejects_bad_input_length() {
        let spec = NetworkSpec::new(2, vec![3], 1);
        let p = init_params(&spec, 0).unwrap();
        assert!(matches!(
            forward(&p, &[1.0]),
            Err(NeuralError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn batch_equals_independent_calls() {
        let spec = NetworkSpec::new(3, vec![8, 8], 2);
        let p = init_params(&spec, 5).unwrap();
        let xs: Vec<[f64; 3]> = vec![[0.1, -0.2, 0.3], [1.0, 2.0, -1.0], [0.0, 0.0, 0.0]];
        let mut ws = Workspace::new(&spec);
        for x in &xs {
            forward_into(&p, x, &mut ws);
            let batch_out = ws.activations.last().unwrap().clone();
            let solo = forward(&p, x).unwrap();
            assert_eq!(batch_out, solo);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(NetworkSpec::new(0, vec![3], 1).validate().is_err());
        assert!(NetworkSpec::new(2, vec![], 1).validate().is_err());
        assert!(NetworkSpec::new(2, vec![3, 0], 1).validate().is_err());
        assert!(NetworkSpec::new(2, vec![3], 1).validate().is_ok());
    }
}
