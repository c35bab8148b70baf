//! Experiment configuration document.
//!
//! One JSON file describes a whole experiment; each subcommand reads the
//! sections it needs and rejects configs where they are missing, naming the
//! offending field path.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use nnflux::approx::HartenDelta;
use nnflux::dataset::SamplingSpec;
use nnflux::fvm::BoundaryRule;
use nnflux::ic::InitialCondition;
use nnflux::neural::{Activation, AdamConfig, LossNorm, LrSchedule};
use nnflux::physics::PdeSystem;
use nnflux::surrogate::{LfSolver, SurrogateKind};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pde: Option<PdeSystem>,
    pub sampling: Option<SamplingSection>,
    pub network: Option<NetworkSection>,
    pub training: Option<TrainingSection>,
    pub eval: Option<EvalSection>,
    pub simulation: Option<SimulationSection>,
    pub output_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    pub train: Option<SamplingSpec>,
    pub test: Option<SamplingSpec>,
    /// Stress-scenario set written alongside the uniform sets.
    pub scenario: Option<ScenarioSpec>,
    /// Low-fidelity flux column to include (required for bi-fidelity
    /// training data).
    pub lf_solver: Option<LfSolver>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioSpec {
    /// Transonic rarefactions with exact flux zero.
    Rarefaction { count: usize, seed: u64 },
    /// Equal-depth diverging SWE states.
    ScenarioOne { count: usize, seed: u64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub hidden: Vec<usize>,
    #[serde(default = "default_activation")]
    pub activation: Activation,
}

fn default_activation() -> Activation {
    Activation::Tanh
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingSection {
    pub surrogate: SurrogateKind,
    pub epochs: usize,
    pub batch_size: usize,
    pub initial_lr: f64,
    pub schedule: LrSchedule,
    #[serde(default)]
    pub adam: Option<AdamConfig>,
    #[serde(default = "default_loss")]
    pub loss: LossNorm,
    pub seed: u64,
    /// Training CSV produced by gen-data.
    pub train_data: PathBuf,
}

fn default_loss() -> LossNorm {
    LossNorm::L1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub test_data: PathBuf,
    /// name -> model file
    #[serde(default)]
    pub models: Vec<NamedModel>,
    /// approximate-solver baselines to evaluate alongside the models
    #[serde(default)]
    pub baselines: Vec<BaselineFlux>,
    /// optional stress set; per-sample error histograms are emitted for it
    pub scenario_data: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NamedModel {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineFlux {
    Godunov,
    Roe,
    RoeHarten,
    Hll,
}

impl BaselineFlux {
    pub fn name(&self) -> &'static str {
        match self {
            BaselineFlux::Godunov => "godunov",
            BaselineFlux::Roe => "roe",
            BaselineFlux::RoeHarten => "roe_harten",
            BaselineFlux::Hll => "hll",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub mesh: MeshSpec,
    pub ic: InitialCondition,
    #[serde(default = "default_bc")]
    pub bc: BcSpec,
    pub flux: FluxSpec,
    /// model file for surrogate flux choices
    pub model: Option<PathBuf>,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub t_final: f64,
    #[serde(default)]
    pub snapshots: Vec<f64>,
}

fn default_cfl() -> f64 {
    0.4
}

fn default_bc() -> BcSpec {
    BcSpec::Transmissive
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcSpec {
    Transmissive,
    PeriodicX,
    Reflective,
}

impl BcSpec {
    pub fn rule_name(&self) -> BoundaryRule {
        match self {
            BcSpec::Transmissive => BoundaryRule::Transmissive,
            BcSpec::PeriodicX => BoundaryRule::Periodic,
            BcSpec::Reflective => BoundaryRule::ReflectiveWall,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxSpec {
    Godunov,
    Roe,
    RoeHarten,
    Hll,
    Vnn,
    Bfnn,
}

impl FluxSpec {
    pub fn needs_model(&self) -> bool {
        matches!(self, FluxSpec::Vnn | FluxSpec::Bfnn)
    }

    pub fn harten_default() -> HartenDelta {
        HartenDelta::default()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeshSpec {
    Uniform1d { x_lo: f64, x_hi: f64, n_cells: usize },
    RectQuad { x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64, nx: usize, ny: usize },
    Pentagon { circumradius: f64, rings: usize },
    File { path: PathBuf },
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<(Self, String), CliError> {
        let bytes = std::fs::read(path).map_err(|e| {
            CliError::validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        let config: ExperimentConfig = serde_json::from_slice(&bytes).map_err(|e| {
            CliError::validation(format!("config {}: {e}", path.display()))
        })?;
        let hash = crate::util::sha256_hex(&bytes);
        Ok((config, hash))
    }

    pub fn pde(&self) -> Result<PdeSystem, CliError> {
        self.pde.ok_or_else(|| CliError::validation("missing config section `pde`".into()))
    }

    pub fn output_dir(&self, cli_out: Option<&Path>) -> Result<PathBuf, CliError> {
        cli_out
            .map(Path::to_path_buf)
            .or_else(|| self.output_dir.clone())
            .ok_or_else(|| {
                CliError::validation("no output directory (config `output_dir` or --out)".into())
            })
    }
}
