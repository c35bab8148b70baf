//! `gradcheck`: backpropagation vs central finite differences over random
//! network/batch configurations.

use nnflux::neural::{backward, init_params, relative_loss, LossNorm, NetworkSpec};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::CliError;

const TOLERANCE: f64 = 1e-5;

/// Flatten parameters, perturb one entry at a time, and difference the
/// batch loss.
fn finite_difference_max_rel(
    spec: &NetworkSpec,
    seed: u64,
    inputs: &[f64],
    targets: &[f64],
    norm: LossNorm,
) -> f64 {
    let params = init_params(spec, seed).unwrap();
    let analytic = backward(&params, inputs, targets, None, norm).unwrap();
    let eps = 1e-6;
    let mut worst: f64 = 0.0;

    let mut probe = params.clone();
    let layers = params.weights.len();
    for l in 0..layers {
        for which in 0..2 {
            let (block, grads): (&[f64], &[f64]) = if which == 0 {
                (&params.weights[l], &analytic.weights[l])
            } else {
                (&params.biases[l], &analytic.biases[l])
            };
            for k in 0..block.len() {
                let orig = block[k];
                let mut eval = |v: f64| {
                    if which == 0 {
                        probe.weights[l][k] = v;
                    } else {
                        probe.biases[l][k] = v;
                    }
                    let mut preds = Vec::new();
                    for x in inputs.chunks(spec.input_dim) {
                        preds.extend(nnflux::neural::forward(&probe, x).unwrap());
                    }
                    relative_loss(targets, &preds, norm).unwrap()
                };
                let fp = eval(orig + eps);
                let fm = eval(orig - eps);
                eval(orig);
                let fd = (fp - fm) / (2.0 * eps);
                let rel = (grads[k] - fd).abs() / grads[k].abs().max(fd.abs()).max(1e-8);
                worst = worst.max(rel);
            }
        }
    }
    worst
}

pub fn run(seed: u64) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(31));
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let norm = if case % 2 == 0 { LossNorm::L1 } else { LossNorm::L2 };
        let input_dim = rng.gen_range(1..=4usize);
        let output_dim = rng.gen_range(1..=3usize);
        let hidden: Vec<usize> =
            (0..rng.gen_range(1..=3usize)).map(|_| rng.gen_range(2..=6usize)).collect();
        let spec = NetworkSpec {
            input_dim,
            output_dim,
            hidden_layers: hidden,
            // smooth activation so central differences stay valid
            activation: nnflux::neural::Activation::Tanh,
        };
        let n = rng.gen_range(3..=10usize);
        let inputs: Vec<f64> = (0..n * input_dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        // keep targets away from the predictions so l1 kinks stay distant
        let targets: Vec<f64> =
            (0..n * output_dim).map(|_| rng.gen_range(1.0..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        let rel = finite_difference_max_rel(&spec, rng.gen(), &inputs, &targets, norm);
        worst = worst.max(rel);
        println!("gradcheck case {case:2} ({norm:?}): max rel {rel:.3e}");
    }
    println!("gradcheck: worst relative deviation {worst:.3e} (tolerance {TOLERANCE:.0e})");
    if worst < TOLERANCE {
        Ok(())
    } else {
        Err(CliError::numerical(format!(
            "gradient check failed: {worst:.3e} >= {TOLERANCE:.0e}"
        )))
    }
}
