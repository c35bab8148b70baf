//! Relative-loss backpropagation, Adam, and the mini-batch training loop.

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{forward_into, NetworkParameters, NetworkSpec, NeuralError, Workspace};

/// Below this many samples a batch is processed serially; the rayon
/// split/join overhead dominates otherwise.
const PARALLEL_THRESHOLD: usize = 256;
const CHUNK: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossNorm {
    L1,
    L2,
}

/// Relative loss over a flat batch of targets/predictions (samples and
/// components summed together):
/// l1: sum |f - f_hat| / sum |f|; l2: sqrt(sum (f - f_hat)^2) / sqrt(sum f^2).
pub fn relative_loss(
    targets: &[f64],
    predictions: &[f64],
    norm: LossNorm,
) -> Result<f64, NeuralError> {
    if targets.len() != predictions.len() {
        return Err(NeuralError::DimensionMismatch {
            got: predictions.len(),
            expected: targets.len(),
            context: "relative_loss",
        });
    }
    match norm {
        LossNorm::L1 => {
            let den: f64 = targets.iter().map(|t| t.abs()).sum();
            if den == 0.0 {
                return Err(NeuralError::ZeroTargets);
            }
            let num: f64 = targets.iter().zip(predictions).map(|(t, p)| (t - p).abs()).sum();
            Ok(num / den)
        }
        LossNorm::L2 => {
            let den: f64 = targets.iter().map(|t| t * t).sum();
            if den == 0.0 {
                return Err(NeuralError::ZeroTargets);
            }
            let num: f64 = targets
                .iter()
                .zip(predictions)
                .map(|(t, p)| (t - p) * (t - p))
                .sum();
            Ok(num.sqrt() / den.sqrt())
        }
    }
}

/// Gradient of the batch relative loss with respect to every weight and
/// bias; shapes mirror [`NetworkParameters`].
#[derive(Clone, Debug)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros(spec: &NetworkSpec) -> Self {
        let (weights, biases) = NetworkParameters::zeros_like(spec);
        Gradients { weights, biases }
    }

    fn merge(&mut self, other: &Gradients) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.weights
            .iter()
            .chain(self.biases.iter())
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Numerator/denominator of the batch relative loss, kept separate so an
/// epoch-level loss can be aggregated across batches.
#[derive(Clone, Copy, Debug)]
pub struct BatchLoss {
    pub numerator: f64,
    pub denominator: f64,
}

impl BatchLoss {
    pub fn value(&self) -> f64 {
        self.numerator / self.denominator
    }
}

struct BatchView<'a> {
    inputs: &'a [f64],
    targets: &'a [f64],
    /// Optional constant offset added to the network output before the loss
    /// (the low-fidelity flux of a residual model).
    offsets: Option<&'a [f64]>,
    n: usize,
    in_dim: usize,
    out_dim: usize,
}

impl<'a> BatchView<'a> {
    fn input(&self, k: usize) -> &'a [f64] {
        &self.inputs[k * self.in_dim..(k + 1) * self.in_dim]
    }

    fn target(&self, k: usize) -> &'a [f64] {
        &self.targets[k * self.out_dim..(k + 1) * self.out_dim]
    }

    fn offset(&self, k: usize) -> Option<&'a [f64]> {
        self.offsets.map(|o| &o[k * self.out_dim..(k + 1) * self.out_dim])
    }
}

/// Accumulate the gradient of one sample; `ws.deltas.last()` must already
/// hold dL/d(output).
fn backprop_sample(params: &NetworkParameters, ws: &mut Workspace, grads: &mut Gradients) {
    let n_layers = params.weights.len();
    for l in (0..n_layers).rev() {
        let in_dim = ws.activations[l].len();
        {
            let delta = &ws.deltas[l];
            let input = &ws.activations[l];
            let gw = &mut grads.weights[l];
            let gb = &mut grads.biases[l];
            for (i, row) in gw.chunks_exact_mut(in_dim).enumerate() {
                let d = delta[i];
                gb[i] += d;
                for (g, &a) in row.iter_mut().zip(input) {
                    *g += d * a;
                }
            }
        }
        if l > 0 {
            let (lower, upper) = ws.deltas.split_at_mut(l);
            let delta = &upper[0];
            let prev = &mut lower[l - 1];
            prev.iter_mut().for_each(|v| *v = 0.0);
            let w = &params.weights[l];
            for (i, row) in w.chunks_exact(in_dim).enumerate() {
                let d = delta[i];
                for (p, &wij) in prev.iter_mut().zip(row) {
                    *p += d * wij;
                }
            }
            let act = params.spec.activation;
            for (p, &a) in prev.iter_mut().zip(ws.activations[l].iter()) {
                *p *= act.deriv_from_value(a);
            }
        }
    }
}

/// dL/d(prediction) for one sample, written into `dl_dout`. Returns the
/// sample's contribution to the loss numerator (absolute for l1, squared
/// for l2).
fn loss_backward_sample(
    target: &[f64],
    prediction: &[f64],
    norm: LossNorm,
    denom: f64,
    l2_num_sqrt: f64,
    dl_dout: &mut [f64],
) -> f64 {
    let mut num = 0.0;
    match norm {
        LossNorm::L1 => {
            for ((t, p), g) in target.iter().zip(prediction).zip(dl_dout.iter_mut()) {
                let diff = t - p;
                num += diff.abs();
                // subgradient 0 at exact ties
                *g = if diff == 0.0 { 0.0 } else { -diff.signum() / denom };
            }
        }
        LossNorm::L2 => {
            for ((t, p), g) in target.iter().zip(prediction).zip(dl_dout.iter_mut()) {
                let diff = t - p;
                num += diff * diff;
                *g = if l2_num_sqrt == 0.0 { 0.0 } else { -diff / (l2_num_sqrt * denom) };
            }
        }
    }
    num
}

fn process_range(
    params: &NetworkParameters,
    view: &BatchView<'_>,
    norm: LossNorm,
    denom: f64,
    l2_num_sqrt: f64,
    range: std::ops::Range<usize>,
) -> (f64, Gradients) {
    let mut ws = Workspace::new(&params.spec);
    let mut grads = Gradients::zeros(&params.spec);
    let mut num = 0.0;
    let mut pred = vec![0.0; view.out_dim];
    for k in range {
        forward_into(params, view.input(k), &mut ws);
        let out = ws.activations.last().unwrap();
        match view.offset(k) {
            Some(off) => {
                for i in 0..view.out_dim {
                    pred[i] = out[i] + off[i];
                }
            }
            None => pred.copy_from_slice(out),
        }
        let dl_dout = ws.deltas.last_mut().unwrap();
        num += loss_backward_sample(view.target(k), &pred, norm, denom, l2_num_sqrt, dl_dout);
        backprop_sample(params, &mut ws, &mut grads);
    }
    (num, grads)
}

fn backward_batch(
    params: &NetworkParameters,
    view: &BatchView<'_>,
    norm: LossNorm,
) -> Result<(BatchLoss, Gradients), NeuralError> {
    let denom = match norm {
        LossNorm::L1 => view.targets.iter().map(|t| t.abs()).sum::<f64>(),
        LossNorm::L2 => view.targets.iter().map(|t| t * t).sum::<f64>().sqrt(),
    };
    if denom == 0.0 {
        return Err(NeuralError::ZeroTargets);
    }

    // l2 needs the full-batch misfit norm before per-sample gradients exist,
    // so run a forward-only sweep first.
    let l2_num_sqrt = if norm == LossNorm::L2 {
        let mut ws = Workspace::new(&params.spec);
        let mut s = 0.0;
        for k in 0..view.n {
            forward_into(params, view.input(k), &mut ws);
            let out = ws.activations.last().unwrap();
            let target = view.target(k);
            match view.offset(k) {
                Some(off) => {
                    for i in 0..view.out_dim {
                        let d = target[i] - (out[i] + off[i]);
                        s += d * d;
                    }
                }
                None => {
                    for i in 0..view.out_dim {
                        let d = target[i] - out[i];
                        s += d * d;
                    }
                }
            }
        }
        s.sqrt()
    } else {
        0.0
    };

    let (num, grads) = if view.n < PARALLEL_THRESHOLD {
        process_range(params, view, norm, denom, l2_num_sqrt, 0..view.n)
    } else {
        let ranges: Vec<std::ops::Range<usize>> = (0..view.n)
            .step_by(CHUNK)
            .map(|s| s..(s + CHUNK).min(view.n))
            .collect();
        let parts: Vec<(f64, Gradients)> = ranges
            .into_par_iter()
            .map(|r| process_range(params, view, norm, denom, l2_num_sqrt, r))
            .collect();
        // merge in chunk order so the result does not depend on scheduling
        let mut num = 0.0;
        let mut grads = Gradients::zeros(&params.spec);
        for (n, g) in &parts {
            num += n;
            grads.merge(g);
        }
        (num, grads)
    };

    let numerator = match norm {
        LossNorm::L1 => num,
        LossNorm::L2 => num.sqrt(),
    };
    Ok((BatchLoss { numerator, denominator: denom }, grads))
}

/// Exact gradient of the batch relative loss. `offsets`, when given, is a
/// per-sample constant added to the network output before the loss (the
/// batch denominator is treated as a constant of the batch).
pub fn backward(
    params: &NetworkParameters,
    inputs: &[f64],
    targets: &[f64],
    offsets: Option<&[f64]>,
    norm: LossNorm,
) -> Result<Gradients, NeuralError> {
    let view = make_view(params, inputs, targets, offsets)?;
    Ok(backward_batch(params, &view, norm)?.1)
}

fn make_view<'a>(
    params: &NetworkParameters,
    inputs: &'a [f64],
    targets: &'a [f64],
    offsets: Option<&'a [f64]>,
) -> Result<BatchView<'a>, NeuralError> {
    let in_dim = params.spec.input_dim;
    let out_dim = params.spec.output_dim;
    if inputs.len() % in_dim != 0 {
        return Err(NeuralError::DimensionMismatch {
            got: inputs.len(),
            expected: in_dim,
            context: "batch inputs not a multiple of input_dim",
        });
    }
    let n = inputs.len() / in_dim;
    if targets.len() != n * out_dim {
        return Err(NeuralError::DimensionMismatch {
            got: targets.len(),
            expected: n * out_dim,
            context: "batch targets",
        });
    }
    if let Some(off) = offsets {
        if off.len() != targets.len() {
            return Err(NeuralError::DimensionMismatch {
                got: off.len(),
                expected: targets.len(),
                context: "batch offsets",
            });
        }
    }
    Ok(BatchView { inputs, targets, offsets, n, in_dim, out_dim })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// First/second moment estimates.
#[derive(Clone, Debug)]
pub struct AdamState {
    m_weights: Vec<Vec<f64>>,
    v_weights: Vec<Vec<f64>>,
    m_biases: Vec<Vec<f64>>,
    v_biases: Vec<Vec<f64>>,
    pub step: u64,
}

impl AdamState {
    pub fn new(spec: &NetworkSpec) -> Self {
        let (m_weights, m_biases) = NetworkParameters::zeros_like(spec);
        let (v_weights, v_biases) = NetworkParameters::zeros_like(spec);
        AdamState { m_weights, v_weights, m_biases, v_biases, step: 0 }
    }
}

fn adam_update(
    theta: &mut [f64],
    grad: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    lr: f64,
    cfg: &AdamConfig,
    bc1: f64,
    bc2: f64,
) {
    for i in 0..theta.len() {
        let g = grad[i];
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        theta[i] -= lr * m_hat / (v_hat.sqrt() + cfg.eps);
    }
}

/// One Adam step with bias correction.
pub fn adam_step(
    params: &mut NetworkParameters,
    grads: &Gradients,
    state: &mut AdamState,
    lr: f64,
    cfg: &AdamConfig,
) {
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - cfg.beta1.powi(t);
    let bc2 = 1.0 - cfg.beta2.powi(t);
    for l in 0..params.weights.len() {
        adam_update(
            &mut params.weights[l],
            &grads.weights[l],
            &mut state.m_weights[l],
            &mut state.v_weights[l],
            lr,
            cfg,
            bc1,
            bc2,
        );
        adam_update(
            &mut params.biases[l],
            &grads.biases[l],
            &mut state.m_biases[l],
            &mut state.v_biases[l],
            lr,
            cfg,
            bc1,
            bc2,
        );
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LrSchedule {
    Constant,
    StepDecay { factor: f64, every_n_epochs: usize },
}

impl LrSchedule {
    pub fn rate_at(&self, initial_lr: f64, epoch: usize) -> f64 {
        match self {
            LrSchedule::Constant => initial_lr,
            LrSchedule::StepDecay { factor, every_n_epochs } => {
                initial_lr * factor.powi((epoch / every_n_epochs) as i32)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub initial_lr: f64,
    pub schedule: LrSchedule,
    pub adam: AdamConfig,
    pub loss_norm: LossNorm,
    pub seed: u64,
}

impl TrainConfig {
    /// Defaults shared by the surrogate experiments: step decay by half
    /// every 300 epochs, Adam 0.9/0.999/1e-8, relative l1 loss.
    pub fn new(epochs: usize, batch_size: usize, initial_lr: f64, seed: u64) -> Self {
        TrainConfig {
            epochs,
            batch_size,
            initial_lr,
            schedule: LrSchedule::StepDecay { factor: 0.5, every_n_epochs: 300 },
            adam: AdamConfig::default(),
            loss_norm: LossNorm::L1,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), NeuralError> {
        let ok_beta = |b: f64| b > 0.0 && b < 1.0;
        if !ok_beta(self.adam.beta1) || !ok_beta(self.adam.beta2) {
            return Err(NeuralError::InvalidConfig("Adam betas must lie in (0, 1)".into()));
        }
        if self.adam.eps <= 0.0 {
            return Err(NeuralError::InvalidConfig("Adam eps must be positive".into()));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(NeuralError::InvalidConfig("epochs and batch_size must be positive".into()));
        }
        if self.initial_lr <= 0.0 {
            return Err(NeuralError::InvalidConfig("learning rate must be positive".into()));
        }
        if let LrSchedule::StepDecay { factor, every_n_epochs } = self.schedule {
            if factor <= 0.0 || every_n_epochs == 0 {
                return Err(NeuralError::InvalidConfig("invalid step-decay schedule".into()));
            }
        }
        Ok(())
    }
}

/// Per-epoch training loss and learning rate.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct TrainHistory {
    pub loss: Vec<f64>,
    pub learning_rate: Vec<f64>,
}

/// Supervised training set; flat row-major storage.
#[derive(Clone, Debug)]
pub struct TrainingSet {
    pub inputs: Vec<f64>,
    pub targets: Vec<f64>,
    pub offsets: Option<Vec<f64>>,
    pub input_dim: usize,
    pub output_dim: usize,
}

impl TrainingSet {
    pub fn new(
        inputs: Vec<f64>,
        targets: Vec<f64>,
        offsets: Option<Vec<f64>>,
        input_dim: usize,
        output_dim: usize,
    ) -> Result<Self, NeuralError> {
        if input_dim == 0 || output_dim == 0 || inputs.len() % input_dim != 0 {
            return Err(NeuralError::InvalidConfig("inconsistent training-set dims".into()));
        }
        let n = inputs.len() / input_dim;
        if targets.len() != n * output_dim {
            return Err(NeuralError::DimensionMismatch {
                got: targets.len(),
                expected: n * output_dim,
                context: "training-set targets",
            });
        }
        if let Some(off) = &offsets {
            if off.len() != targets.len() {
                return Err(NeuralError::DimensionMismatch {
                    got: off.len(),
                    expected: targets.len(),
                    context: "training-set offsets",
                });
            }
        }
        Ok(TrainingSet { inputs, targets, offsets, input_dim, output_dim })
    }

    pub fn len(&self) -> usize {
        self.inputs.len() / self.input_dim
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// Mini-batch Adam training. Shuffles per epoch with a seeded RNG, applies
/// the learning-rate schedule, and records the per-epoch training loss
/// (aggregated across batches as sum-of-numerators over sum-of-denominators).
pub fn train(
    set: &TrainingSet,
    spec: &NetworkSpec,
    config: &TrainConfig,
) -> Result<(NetworkParameters, TrainHistory), NeuralError> {
    config.validate()?;
    spec.validate()?;
    if set.is_empty() {
        return Err(NeuralError::InvalidConfig("empty training set".into()));
    }
    let n = set.len();
    if config.batch_size > n {
        return Err(NeuralError::InvalidConfig(format!(
            "batch_size {} exceeds dataset size {n}",
            config.batch_size
        )));
    }
    if spec.input_dim != set.input_dim || spec.output_dim != set.output_dim {
        return Err(NeuralError::DimensionMismatch {
            got: set.input_dim,
            expected: spec.input_dim,
            context: "training-set vs network dims",
        });
    }

    let mut params = super::init_params(spec, config.seed)?;
    let mut adam = AdamState::new(spec);
    let mut history = TrainHistory::default();
    // distinct stream from the init RNG
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(0x9e37_79b9));
    let mut order: Vec<usize> = (0..n).collect();

    let mut batch_inputs = vec![0.0; config.batch_size * set.input_dim];
    let mut batch_targets = vec![0.0; config.batch_size * set.output_dim];
    let mut batch_offsets =
        set.offsets.as_ref().map(|_| vec![0.0; config.batch_size * set.output_dim]);

    for epoch in 0..config.epochs {
        let lr = config.schedule.rate_at(config.initial_lr, epoch);
        order.shuffle(&mut shuffle_rng);
        let mut epoch_num = 0.0;
        let mut epoch_den = 0.0;

        for batch in order.chunks(config.batch_size) {
            let bn = batch.len();
            for (row, &k) in batch.iter().enumerate() {
                batch_inputs[row * set.input_dim..(row + 1) * set.input_dim]
                    .copy_from_slice(&set.inputs[k * set.input_dim..(k + 1) * set.input_dim]);
                batch_targets[row * set.output_dim..(row + 1) * set.output_dim]
                    .copy_from_slice(&set.targets[k * set.output_dim..(k + 1) * set.output_dim]);
                if let (Some(buf), Some(off)) = (batch_offsets.as_mut(), set.offsets.as_ref()) {
                    buf[row * set.output_dim..(row + 1) * set.output_dim]
                        .copy_from_slice(&off[k * set.output_dim..(k + 1) * set.output_dim]);
                }
            }
            let view = BatchView {
                inputs: &batch_inputs[..bn * set.input_dim],
                targets: &batch_targets[..bn * set.output_dim],
                offsets: batch_offsets.as_deref().map(|o| &o[..bn * set.output_dim]),
                n: bn,
                in_dim: set.input_dim,
                out_dim: set.output_dim,
            };
            let (loss, grads) = backward_batch(&params, &view, config.loss_norm)?;
            if !loss.value().is_finite() {
                return Err(NeuralError::Diverged { epoch, loss: loss.value() });
            }
            epoch_num += loss.numerator;
            epoch_den += loss.denominator;
            adam_step(&mut params, &grads, &mut adam, lr, &config.adam);
        }

        let epoch_loss = epoch_num / epoch_den;
        if !epoch_loss.is_finite() {
            return Err(NeuralError::Diverged { epoch, loss: epoch_loss });
        }
        history.loss.push(epoch_loss);
        history.learning_rate.push(lr);
    }

    Ok((params, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::{forward, init_params};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn relative_loss_examples() {
        assert_close(relative_loss(&[2.0], &[2.0], LossNorm::L1).unwrap(), 0.0, 0.0);
        assert_close(relative_loss(&[2.0], &[1.0], LossNorm::L1).unwrap(), 0.5, 0.0);
        assert_close(
            relative_loss(&[1.0, -1.0], &[0.0, 0.0], LossNorm::L1).unwrap(),
            1.0,
            0.0,
        );
        assert!(matches!(
            relative_loss(&[0.0, 0.0], &[1.0, 1.0], LossNorm::L1),
            Err(NeuralError::ZeroTargets)
        ));
        assert!(relative_loss(&[1.0], &[1.0, 2.0], LossNorm::L1).is_err());
    }

    #[test]
    fn relative_loss_is_permutation_invariant() {
        let t = [1.0, -2.0, 0.5, 3.0];
        let p = [0.9, -1.5, 0.7, 2.0];
        let t2 = [3.0, 0.5, -2.0, 1.0];
        let p2 = [2.0, 0.7, -1.5, 0.9];
        for norm in [LossNorm::L1, LossNorm::L2] {
            assert_eq!(
                relative_loss(&t, &p, norm).unwrap(),
                relative_loss(&t2, &p2, norm).unwrap()
            );
        }
    }

    #[test]
    fn zero_loss_batch_has_zero_gradient() {
        let spec = NetworkSpec::new(2, vec![3], 1);
        let params = init_params(&spec, 1).unwrap();
        let inputs = [0.2, -0.1, 0.5, 0.8];
        let mut targets = Vec::new();
        for x in inputs.chunks(2) {
            targets.push(forward(&params, x).unwrap()[0]);
        }
        let grads = backward(&params, &inputs, &targets, None, LossNorm::L1).unwrap();
        assert_eq!(grads.max_abs(), 0.0);
    }

    #[test]
    fn l1_gradient_magnitudes_survive_sign_flip() {
        // negating the targets together with the predictions (realized by
        // negating the output layer) leaves every gradient magnitude intact
        let spec = NetworkSpec::new(2, vec![3], 1);
        let params = init_params(&spec, 3).unwrap();
        let mut neg_params = params.clone();
        neg_params.weights.last_mut().unwrap().iter_mut().for_each(|w| *w = -*w);
        neg_params.biases.last_mut().unwrap().iter_mut().for_each(|b| *b = -*b);
        let inputs = [0.4, -0.3, -0.9, 0.2, 0.1, 0.7];
        let targets = [1.0, -0.5, 0.25];
        let flipped: Vec<f64> = targets.iter().map(|t| -t).collect();
        let g1 = backward(&params, &inputs, &targets, None, LossNorm::L1).unwrap();
        let g2 = backward(&neg_params, &inputs, &flipped, None, LossNorm::L1).unwrap();
        for (a, b) in g1.weights.iter().flatten().zip(g2.weights.iter().flatten()) {
            assert_close(a.abs(), b.abs(), 1e-12);
        }
        for (a, b) in g1.biases.iter().flatten().zip(g2.biases.iter().flatten()) {
            assert_close(a.abs(), b.abs(), 1e-12);
        }
    }

    #[test]
    fn adam_first_step_matches_hand_computation() {
        let spec = NetworkSpec::new(1, vec![1], 1);
        let mut params = init_params(&spec, 0).unwrap();
        params.weights[0][0] = 0.0;
        params.weights[1][0] = 0.0;
        params.biases[0][0] = 0.0;
        params.biases[1][0] = 0.0;
        let mut grads = Gradients::zeros(&spec);
        grads.weights[0][0] = 2.0;
        let mut state = AdamState::new(&spec);
        adam_step(&mut params, &grads, &mut state, 0.01, &AdamConfig::default());
        // m_hat = g, v_hat = g^2  =>  update = -lr * g / (|g| + eps)
        assert_close(params.weights[0][0], -0.01 * (2.0 / (2.0 + 1e-8)), 1e-12);
        // untouched parameters stay put
        assert_eq!(params.weights[1][0], 0.0);
    }

    #[test]
    fn adam_zero_gradient_leaves_params() {
        let spec = NetworkSpec::new(1, vec![2], 1);
        let mut params = init_params(&spec, 4).unwrap();
        let before = params.clone();
        let grads = Gradients::zeros(&spec);
        let mut state = AdamState::new(&spec);
        adam_step(&mut params, &grads, &mut state, 0.01, &AdamConfig::default());
        assert_eq!(params, before);
    }

    #[test]
    fn adam_is_deterministic() {
        let spec = NetworkSpec::new(1, vec![2], 1);
        let mut grads = Gradients::zeros(&spec);
        grads.weights[0][0] = 0.3;
        grads.biases[1][0] = -0.8;
        let run = || {
            let mut p = init_params(&spec, 11).unwrap();
            let mut s = AdamState::new(&spec);
            adam_step(&mut p, &grads, &mut s, 0.02, &AdamConfig::default());
            adam_step(&mut p, &grads, &mut s, 0.02, &AdamConfig::default());
            p
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn train_memorizes_single_sample() {
        let set = TrainingSet::new(vec![0.5, -0.25], vec![0.8], None, 2, 1).unwrap();
        let spec = NetworkSpec::new(2, vec![4], 1);
        let mut config = TrainConfig::new(500, 1, 0.05, 3);
        // the l1 subgradient keeps |step| near the learning rate, so the
        // memorization floor tracks the decayed rate
        config.schedule = LrSchedule::StepDecay { factor: 0.5, every_n_epochs: 25 };
        let (params, history) = train(&set, &spec, &config).unwrap();
        assert!(history.loss.len() == 500 && history.learning_rate.len() == 500);
        let final_loss = *history.loss.last().unwrap();
        assert!(final_loss < 1e-6, "memorization failed: loss {final_loss}");
        assert!(*history.loss.last().unwrap() <= history.loss[0]);
        assert!(params.all_finite());
    }

    #[test]
    fn train_is_deterministic() {
        let inputs: Vec<f64> = (0..40).map(|i| (i as f64) / 20.0 - 1.0).collect();
        let targets: Vec<f64> = inputs.chunks(2).map(|c| c[0] * c[0] + c[1]).collect();
        let set = TrainingSet::new(inputs, targets, None, 2, 1).unwrap();
        let spec = NetworkSpec::new(2, vec![6], 1);
        let config = TrainConfig::new(30, 8, 0.01, 7);
        let (p1, h1) = train(&set, &spec, &config).unwrap();
        let (p2, h2) = train(&set, &spec, &config).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(h1.loss, h2.loss);
    }

    #[test]
    fn train_rejects_oversized_batch() {
        let set = TrainingSet::new(vec![0.0, 1.0], vec![1.0], None, 2, 1).unwrap();
        let spec = NetworkSpec::new(2, vec![2], 1);
        let config = TrainConfig::new(10, 8, 0.01, 0);
        assert!(matches!(
            train(&set, &spec, &config),
            Err(NeuralError::InvalidConfig(_))
        ));
    }

    #[test]
    fn schedule_rates() {
        let s = LrSchedule::StepDecay { factor: 0.5, every_n_epochs: 300 };
        assert_close(s.rate_at(0.01, 0), 0.01, 0.0);
        assert_close(s.rate_at(0.01, 299), 0.01, 0.0);
        assert_close(s.rate_at(0.01, 300), 0.005, 1e-15);
        assert_close(s.rate_at(0.01, 900), 0.00125, 1e-15);
        assert_close(LrSchedule::Constant.rate_at(0.01, 1000), 0.01, 0.0);
    }
}
