//! `eval-apriori`: relative l1 errors of models and approximate-solver
//! baselines against stored Godunov targets, plus per-sample scatter and
//! absolute-error series for histogramming.

use std::path::Path;

use nnflux::approx::HartenDelta;
use nnflux::dataset::{evaluate_flux, read_dataset, FluxSample};
use nnflux::exact::RiemannFluxQuery;
use nnflux::fvm::FluxError;
use nnflux::physics::PdeSystem;
use nnflux::state::{FluxVector, StateVector};
use nnflux::surrogate::{load_model, surrogate_flux_1d};

use crate::config::{BaselineFlux, EvalSection, ExperimentConfig};
use crate::util::{ensure_dir, hash_file, CsvDoc};
use crate::CliError;

enum EvalFlux {
    Baseline(BaselineFlux),
    Model(nnflux::surrogate::SurrogateModel),
}

impl EvalFlux {
    fn flux(
        &self,
        pde: &PdeSystem,
        a: &StateVector,
        b: &StateVector,
    ) -> Result<FluxVector, FluxError> {
        match self {
            EvalFlux::Baseline(BaselineFlux::Godunov) => Ok(nnflux::exact::godunov_flux(
                &RiemannFluxQuery { pde: *pde, u_plus: *a, u_minus: *b },
            )?),
            EvalFlux::Baseline(BaselineFlux::Roe) => Ok(nnflux::approx::roe_flux(
                &RiemannFluxQuery { pde: *pde, u_plus: *a, u_minus: *b },
            )?),
            EvalFlux::Baseline(BaselineFlux::RoeHarten) => Ok(nnflux::approx::roe_flux_fixed(
                &RiemannFluxQuery { pde: *pde, u_plus: *a, u_minus: *b },
                HartenDelta::default(),
            )?),
            EvalFlux::Baseline(BaselineFlux::Hll) => Ok(nnflux::approx::hll_flux(
                &RiemannFluxQuery { pde: *pde, u_plus: *a, u_minus: *b },
            )?),
            EvalFlux::Model(m) => Ok(surrogate_flux_1d(m, a, b)?),
        }
    }
}

fn eval_set(
    pde: &PdeSystem,
    samples: &[FluxSample],
    fluxes: &[(String, EvalFlux)],
    set_name: &str,
    meta: &[(&str, &str)],
    out_dir: &Path,
) -> Result<Vec<(String, f64)>, CliError> {
    let m = pde.state_dim();
    let mut rows = Vec::new();
    for (name, flux) in fluxes {
        let eval = evaluate_flux(samples, |a, b| flux.flux(pde, a, b)).map_err(|e| {
            CliError::numerical(format!("{name} failed on {set_name}: {e}"))
        })?;
        rows.push((name.clone(), eval.rel_l1));

        // per-sample scatter: target vs prediction per component
        let mut header: Vec<String> = Vec::new();
        for c in 0..m {
            header.push(format!("target_{c}"));
        }
        for c in 0..m {
            header.push(format!("prediction_{c}"));
        }
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut scatter = CsvDoc::new(meta, &header_refs);
        for (s, p) in samples.iter().zip(&eval.predictions) {
            let mut fields = Vec::with_capacity(2 * m);
            fields.extend(s.target.iter().copied());
            fields.extend(p.iter().copied());
            scatter.row_f64(&fields);
        }
        scatter.write(&out_dir.join(format!("scatter_{set_name}_{name}.csv")))?;

        // per-sample absolute errors for histograms
        let mut header: Vec<String> = (0..m).map(|c| format!("abs_err_{c}")).collect();
        header.insert(0, "sample".to_string());
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut hist = CsvDoc::new(meta, &header_refs);
        for i in 0..samples.len() {
            let mut fields = vec![i as f64];
            for c in 0..m {
                fields.push(eval.abs_err[c][i]);
            }
            hist.row_f64(&fields);
        }
        hist.write(&out_dir.join(format!("abs_err_{set_name}_{name}.csv")))?;
    }
    Ok(rows)
}

pub fn run(config_path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let (config, config_hash) = ExperimentConfig::load(config_path)?;
    let pde = config.pde()?;
    let eval: &EvalSection = config
        .eval
        .as_ref()
        .ok_or_else(|| CliError::validation("missing config section `eval`".into()))?;
    let out_dir = config.output_dir(out)?;
    ensure_dir(&out_dir)?;

    let test = read_dataset(&eval.test_data)
        .map_err(|e| CliError::validation(format!("eval.test_data: {e}")))?;
    let dataset_hash = hash_file(&eval.test_data)?;

    let mut fluxes: Vec<(String, EvalFlux)> = Vec::new();
    let mut model_hashes: Vec<(String, String)> = Vec::new();
    for b in &eval.baselines {
        fluxes.push((b.name().to_string(), EvalFlux::Baseline(*b)));
    }
    for named in &eval.models {
        let model = load_model(&named.path)
            .map_err(|e| CliError::validation(format!("eval.models.{}: {e}", named.name)))?;
        if model.state_dim() != pde.state_dim() {
            return Err(CliError::validation(format!(
                "model {} has state dimension {}, dataset needs {}",
                named.name,
                model.state_dim(),
                pde.state_dim()
            )));
        }
        model_hashes.push((named.name.clone(), hash_file(&named.path)?));
        fluxes.push((named.name.clone(), EvalFlux::Model(model)));
    }
    if fluxes.is_empty() {
        return Err(CliError::validation("eval section lists no models or baselines".into()));
    }

    let meta_owned: Vec<(String, String)> = {
        let mut v = vec![
            ("config_hash".to_string(), config_hash.clone()),
            ("dataset_sha256".to_string(), dataset_hash.clone()),
        ];
        for (name, h) in &model_hashes {
            v.push((format!("model_{name}_sha256"), h.clone()));
        }
        v
    };
    let meta: Vec<(&str, &str)> =
        meta_owned.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();

    let mut errors = CsvDoc::new(&meta, &["flux", "set", "rel_l1", "samples"]);
    for (name, rel) in eval_set(&pde, &test, &fluxes, "test", &meta, &out_dir)? {
        println!("eval: {name} on test: rel l1 {rel:.4e}");
        errors.row(&[name, "test".into(), format!("{rel}"), test.len().to_string()]);
    }

    if let Some(scenario_path) = &eval.scenario_data {
        let scenario = read_dataset(scenario_path)
            .map_err(|e| CliError::validation(format!("eval.scenario_data: {e}")))?;
        for (name, rel) in eval_set(&pde, &scenario, &fluxes, "scenario", &meta, &out_dir)? {
            println!("eval: {name} on scenario: rel l1 {rel:.4e}");
            errors.row(&[
                name,
                "scenario".into(),
                format!("{rel}"),
                scenario.len().to_string(),
            ]);
        }
    }
    errors.write(&out_dir.join("errors.csv"))?;
    Ok(())
}
