//! Scratch harness: trains the Burgers surrogates at the reference
//! configuration and prints held-out errors for schedule tuning.

use nnflux::dataset::{build_dataset, evaluate_flux, sample_states, to_training_set, SamplingSpec};
use nnflux::neural::{train, LrSchedule, NetworkSpec, TrainConfig};
use nnflux::surrogate::{surrogate_flux_1d, LfSolver, SurrogateKind, SurrogateModel};
use nnflux::PdeSystem;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("burgers");
    let every: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(300);
    let factor: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.5);

    let (pde, train_spec, test_spec) = match which {
        "swe" => (
            PdeSystem::swe_1d(),
            SamplingSpec::swe_uniform(45_000, 101),
            SamplingSpec::swe_uniform(5_000, 202),
        ),
        _ => (
            PdeSystem::burgers_1d(),
            SamplingSpec::burgers_uniform(20_000, 101),
            SamplingSpec::burgers_uniform(2_000, 202),
        ),
    };
    let (epochs, batch, widths_vnn, widths_bfnn) = match which {
        "swe" => (1500usize, 3000usize, vec![40; 4], vec![40; 4]),
        _ => (1300, 1000, vec![32; 3], vec![10; 3]),
    };

    let t0 = std::time::Instant::now();
    let train_ds = build_dataset(&sample_states(&train_spec).unwrap(), &pde, Some(LfSolver::Roe))
        .unwrap();
    let test_ds =
        build_dataset(&sample_states(&test_spec).unwrap(), &pde, Some(LfSolver::Roe)).unwrap();
    println!("data built in {:.1?}", t0.elapsed());

    let only: Option<&str> = args.get(4).map(|s| s.as_str());
    let epochs_override: Option<usize> = args.get(5).and_then(|s| s.parse().ok());
    let use_l2 = args.iter().any(|a| a == "l2");
    let beta1: Option<f64> = args.iter().position(|a| a == "b1").and_then(|i| args.get(i + 1)).and_then(|s| s.parse().ok());
    for (name, kind, widths) in [
        ("vnn", SurrogateKind::Vanilla, widths_vnn),
        ("bfnn", SurrogateKind::BiFidelity, widths_bfnn),
    ] {
        if let Some(filter) = only {
            if filter != name && filter != "all" {
                continue;
            }
        }
        let t0 = std::time::Instant::now();
        let set = to_training_set(&train_ds, kind).unwrap();
        let m = pde.state_dim();
        let mut spec = NetworkSpec::new(set.input_dim, widths.clone(), m);
        if args.iter().any(|a| a == "relu") {
            spec.activation = nnflux::neural::Activation::Relu;
        }
        let seed: u64 = args.iter().position(|a| a == "seed").and_then(|i| args.get(i + 1)).and_then(|s| s.parse().ok()).unwrap_or(7);
        let mut config = TrainConfig::new(epochs_override.unwrap_or(epochs), batch, 0.01, seed);
        config.schedule = LrSchedule::StepDecay { factor, every_n_epochs: every };
        if use_l2 {
            config.loss_norm = nnflux::neural::LossNorm::L2;
        }
        if let Some(b1) = beta1 {
            config.adam.beta1 = b1;
        }
        let (params, history) = train(&set, &spec, &config).unwrap();
        let lf = if kind == SurrogateKind::BiFidelity { Some(LfSolver::Roe) } else { None };
        let model = SurrogateModel::new(kind, lf, pde, params).unwrap();
        let eval = evaluate_flux(&test_ds, |a, b| surrogate_flux_1d(&model, a, b)).unwrap();
        println!(
            "{name}: test rel l1 {:.3e}  (train loss {:.3e}, {} epochs, {:.1?})",
            eval.rel_l1,
            history.loss.last().unwrap(),
            history.loss.len(),
            t0.elapsed()
        );
        if args.iter().any(|a| a == "траж" || a == "traj") {
            for e in (0..history.loss.len()).step_by(100) {
                println!("  epoch {e:4}: loss {:.3e} lr {:.1e}", history.loss[e], history.learning_rate[e]);
            }
        }
    }

    let roe = evaluate_flux(&test_ds, |a, b| {
        nnflux::roe_flux(&nnflux::RiemannFluxQuery { pde, u_plus: *a, u_minus: *b })
    })
    .unwrap();
    println!("roe: test rel l1 {:.3e}", roe.rel_l1);
}
