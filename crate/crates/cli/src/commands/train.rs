//! `train`: fit a surrogate to a generated dataset and write the model
//! document plus a per-epoch history CSV.

use std::path::Path;

use nnflux::dataset::{read_dataset, to_training_set};
use nnflux::neural::{train, NetworkSpec, TrainConfig};
use nnflux::surrogate::{save_model, SurrogateKind, SurrogateModel};

use crate::config::ExperimentConfig;
use crate::util::{ensure_dir, CsvDoc};
use crate::CliError;

pub fn run(config_path: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<(), CliError> {
    let (config, config_hash) = ExperimentConfig::load(config_path)?;
    let pde = config.pde()?;
    if pde.spatial_dim() != 1 {
        return Err(CliError::validation(
            "surrogates are trained on 1D systems; set `pde` to a 1D kind".into(),
        ));
    }
    let network = config
        .network
        .as_ref()
        .ok_or_else(|| CliError::validation("missing config section `network`".into()))?;
    let training = config
        .training
        .as_ref()
        .ok_or_else(|| CliError::validation("missing config section `training`".into()))?;
    let out_dir = config.output_dir(out)?;
    ensure_dir(&out_dir)?;

    let samples = read_dataset(&training.train_data)
        .map_err(|e| CliError::validation(format!("training.train_data: {e}")))?;
    let set = to_training_set(&samples, training.surrogate)
        .map_err(|e| CliError::validation(format!("training data: {e}")))?;

    let spec = NetworkSpec {
        input_dim: set.input_dim,
        output_dim: set.output_dim,
        hidden_layers: network.hidden.clone(),
        activation: network.activation,
    };
    let mut train_config = TrainConfig {
        epochs: training.epochs,
        batch_size: training.batch_size,
        initial_lr: training.initial_lr,
        schedule: training.schedule,
        adam: training.adam.unwrap_or_default(),
        loss_norm: training.loss,
        seed: seed.unwrap_or(training.seed),
    };
    if let Some(s) = seed {
        train_config.seed = s;
    }

    let (params, history) = train(&set, &spec, &train_config).map_err(|e| match e {
        nnflux::neural::NeuralError::Diverged { epoch, loss } => {
            CliError::numerical(format!("training diverged at epoch {epoch} (loss {loss})"))
        }
        other => CliError::validation(other.to_string()),
    })?;

    let lf = match training.surrogate {
        SurrogateKind::BiFidelity => {
            let sampling_lf = config.sampling.as_ref().and_then(|s| s.lf_solver);
            Some(sampling_lf.ok_or_else(|| {
                CliError::validation(
                    "bi-fidelity training needs `sampling.lf_solver` to tag the model".into(),
                )
            })?)
        }
        SurrogateKind::Vanilla => None,
    };
    let model = SurrogateModel::new(training.surrogate, lf, pde, params)
        .map_err(|e| CliError::validation(e.to_string()))?;

    let model_path = out_dir.join("model.json");
    save_model(&model, &model_path).map_err(|e| CliError::validation(e.to_string()))?;

    let mut doc = CsvDoc::new(
        &[("config_hash", config_hash.as_str())],
        &["epoch", "loss", "learning_rate"],
    );
    for (e, (loss, lr)) in history.loss.iter().zip(&history.learning_rate).enumerate() {
        doc.row(&[e.to_string(), format!("{loss}"), format!("{lr}")]);
    }
    doc.write(&out_dir.join("history.csv"))?;

    println!(
        "train: final loss {:.3e} after {} epochs; model at {}",
        history.loss.last().unwrap(),
        history.loss.len(),
        model_path.display()
    );
    Ok(())
}
