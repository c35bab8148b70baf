//! `gen-data`: sample Riemann problems, evaluate Godunov targets (plus the
//! low-fidelity flux when configured), and write CSV datasets with a
//! manifest.

use std::path::Path;

use nnflux::dataset::{build_dataset, sample_states, write_dataset_with_meta, SamplingSpec};

use crate::config::{ExperimentConfig, ScenarioSpec};
use crate::util::{ensure_dir, hash_file, write_json};
use crate::CliError;

pub fn run(config_path: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<(), CliError> {
    let (config, config_hash) = ExperimentConfig::load(config_path)?;
    let pde = config.pde()?;
    let sampling = config
        .sampling
        .as_ref()
        .ok_or_else(|| CliError::validation("missing config section `sampling`".into()))?;
    let out_dir = config.output_dir(out)?;
    ensure_dir(&out_dir)?;

    let apply_seed = |spec: &SamplingSpec, offset: u64| -> SamplingSpec {
        let mut s = *spec;
        if let Some(base) = seed {
            s.seed = base.wrapping_add(offset);
        }
        s
    };

    let mut manifest = serde_json::Map::new();
    manifest.insert("config_hash".into(), config_hash.clone().into());
    let mut files = serde_json::Map::new();

    let mut emit = |name: &str, spec: &SamplingSpec| -> Result<(), CliError> {
        let states = sample_states(spec)
            .map_err(|e| CliError::validation(format!("sampling.{name}: {e}")))?;
        let samples = build_dataset(&states, &pde, sampling.lf_solver)
            .map_err(|e| CliError::numerical(format!("sampling.{name}: {e}")))?;
        let path = out_dir.join(format!("{name}.csv"));
        write_dataset_with_meta(
            &path,
            &samples,
            &[
                ("config_hash".to_string(), config_hash.clone()),
                ("seed".to_string(), spec.seed.to_string()),
                ("count".to_string(), spec.count.to_string()),
            ],
        )
        .map_err(|e| CliError::validation(e.to_string()))?;
        files.insert(
            name.to_string(),
            serde_json::json!({
                "path": path.display().to_string(),
                "rows": samples.len(),
                "seed": spec.seed,
            }),
        );
        Ok(())
    };

    if let Some(train) = &sampling.train {
        emit("train", &apply_seed(train, 0))?;
    }
    if let Some(test) = &sampling.test {
        emit("test", &apply_seed(test, 1))?;
    }
    if let Some(scenario) = &sampling.scenario {
        let (states, name, used_seed) = match *scenario {
            ScenarioSpec::Rarefaction { count, seed: s } => {
                let s = seed.map(|b| b.wrapping_add(2)).unwrap_or(s);
                (nnflux::dataset::rarefaction_scenario_burgers(count, s), "scenario", s)
            }
            ScenarioSpec::ScenarioOne { count, seed: s } => {
                let s = seed.map(|b| b.wrapping_add(2)).unwrap_or(s);
                (nnflux::dataset::scenario_one_swe(count, s), "scenario", s)
            }
        };
        let samples = build_dataset(&states, &pde, sampling.lf_solver)
            .map_err(|e| CliError::numerical(format!("sampling.scenario: {e}")))?;
        let path = out_dir.join(format!("{name}.csv"));
        write_dataset_with_meta(
            &path,
            &samples,
            &[
                ("config_hash".to_string(), config_hash.clone()),
                ("seed".to_string(), used_seed.to_string()),
            ],
        )
        .map_err(|e| CliError::validation(e.to_string()))?;
        files.insert(
            name.to_string(),
            serde_json::json!({
                "path": path.display().to_string(),
                "rows": samples.len(),
                "seed": used_seed,
            }),
        );
    }

    if files.is_empty() {
        return Err(CliError::validation(
            "sampling section configures no datasets (train/test/scenario)".into(),
        ));
    }
    for (_, entry) in files.iter_mut() {
        if let Some(path) = entry.get("path").and_then(|p| p.as_str()) {
            let digest = hash_file(Path::new(path))?;
            entry["sha256"] = digest.into();
        }
    }
    manifest.insert("files".into(), files.into());
    write_json(&out_dir.join("manifest.json"), &serde_json::Value::Object(manifest))?;
    println!("gen-data: wrote datasets to {}", out_dir.display());
    Ok(())
}
