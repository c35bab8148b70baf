//! Trained networks wrapped as numerical flux functions.
//!
//! A vanilla model maps (U+, U-) directly to the flux; a bi-fidelity model
//! adds a learned correction to a low-fidelity (Roe or HLL) flux. Both are
//! one-dimensional, x-directed maps; [`lift_flux_nd`] extends any 1D flux
//! to a 2D face through rotational invariance (shallow water) or the
//! reflection/scaling symmetry of the projected scalar law (Burgers).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::{self, ApproxError};
use crate::exact::RiemannFluxQuery;
use crate::neural::{
    forward, Activation, NetworkParameters, NetworkSpec, NeuralError,
};
use crate::physics::{self, PdeSystem, PhysicsError, UnitNormal};
use crate::state::{FluxVector, StateVector};

#[derive(Debug, Error)]
pub enum SurrogateError {
    #[error("model file {path}: {message}")]
    Malformed { path: String, message: String },
    #[error("model dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("model declares unsupported option: {0}")]
    Unsupported(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    LowFidelity(#[from] ApproxError),
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurrogateKind {
    Vanilla,
    BiFidelity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LfSolver {
    Roe,
    Hll,
}

/// A trained flux surrogate: the 1D system it was trained on, the network,
/// and (for bi-fidelity models) which low-fidelity solver it corrects.
#[derive(Clone, Debug)]
pub struct SurrogateModel {
    pub kind: SurrogateKind,
    pub lf_solver: Option<LfSolver>,
    pub pde: PdeSystem,
    pub params: NetworkParameters,
}

impl SurrogateModel {
    pub fn new(
        kind: SurrogateKind,
        lf_solver: Option<LfSolver>,
        pde: PdeSystem,
        params: NetworkParameters,
    ) -> Result<Self, SurrogateError> {
        let model = SurrogateModel { kind, lf_solver, pde, params };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), SurrogateError> {
        if self.pde.spatial_dim() != 1 {
            return Err(SurrogateError::Unsupported(format!(
                "surrogates are trained on 1D systems, got {:?}",
                self.pde
            )));
        }
        let m = self.pde.state_dim();
        let expected_in = match self.kind {
            SurrogateKind::Vanilla => 2 * m,
            SurrogateKind::BiFidelity => 3 * m,
        };
        if self.params.spec.input_dim != expected_in {
            return Err(SurrogateError::DimensionMismatch(format!(
                "input_dim {} but {:?} over m = {m} needs {expected_in}",
                self.params.spec.input_dim, self.kind
            )));
        }
        if self.params.spec.output_dim != m {
            return Err(SurrogateError::DimensionMismatch(format!(
                "output_dim {} but state dimension is {m}",
                self.params.spec.output_dim
            )));
        }
        match (self.kind, self.lf_solver) {
            (SurrogateKind::BiFidelity, None) => Err(SurrogateError::Unsupported(
                "bi-fidelity model without a low-fidelity solver tag".into(),
            )),
            (SurrogateKind::Vanilla, Some(_)) => Err(SurrogateError::Unsupported(
                "vanilla model with a low-fidelity solver tag".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Number of conserved variables of the underlying system.
    pub fn state_dim(&self) -> usize {
        self.pde.state_dim()
    }
}

/// Evaluate the low-fidelity flux a bi-fidelity model corrects.
pub fn lf_flux(
    solver: LfSolver,
    pde: &PdeSystem,
    u_plus: &StateVector,
    u_minus: &StateVector,
) -> Result<FluxVector, ApproxError> {
    let q = RiemannFluxQuery { pde: *pde, u_plus: *u_plus, u_minus: *u_minus };
    match solver {
        LfSolver::Roe => approx::roe_flux(&q),
        LfSolver::Hll => approx::hll_flux(&q),
    }
}

/// The 1D surrogate flux. Vanilla: net(U+, U-). Bi-fidelity:
/// H_L(U+, U-) + net(U+, U-, H_L(U+, U-)).
pub fn surrogate_flux_1d(
    model: &SurrogateModel,
    u_plus: &StateVector,
    u_minus: &StateVector,
) -> Result<FluxVector, SurrogateError> {
    let m = model.state_dim();
    let mut input = Vec::with_capacity(3 * m);
    input.extend_from_slice(u_plus.as_slice());
    input.extend_from_slice(u_minus.as_slice());
    let lf = match model.kind {
        SurrogateKind::Vanilla => None,
        SurrogateKind::BiFidelity => {
            let solver = model.lf_solver.expect("validated at construction");
            let lf = lf_flux(solver, &model.pde, u_plus, u_minus)?;
            input.extend_from_slice(lf.as_slice());
            Some(lf)
        }
    };
    let out = forward(&model.params, &input)?;
    let mut flux = StateVector::from_slice(&out);
    if let Some(lf) = lf {
        flux = flux + lf;
    }
    Ok(flux)
}

/// Extend a 1D x-directed flux to a face with unit normal `n` of a 2D
/// system.
///
/// Scalar Burgers projects to the law (beta . n) u^2/2: for a = beta . n
/// the flux is a H(u+, u-) when a >= 0 and a H(u-, u+) when a < 0 (the
/// Riemann problem reflects when the projected advection flips sign). SWE
/// rotates into normal/tangential components, solves the 1D (h, h u_n)
/// problem, advects tangential momentum with the upwinded mass flux, and
/// rotates back.
pub fn lift_flux_nd<E>(
    pde: &PdeSystem,
    u_plus: &StateVector,
    u_minus: &StateVector,
    n: &UnitNormal,
    core: impl Fn(&StateVector, &StateVector) -> Result<FluxVector, E>,
) -> Result<FluxVector, E> {
    match pde {
        PdeSystem::Burgers2D { beta, .. } => {
            let a = beta[0] * n.x() + beta[1] * n.y();
            if a == 0.0 {
                return Ok(StateVector::scalar(0.0));
            }
            let f = if a >= 0.0 {
                core(u_plus, u_minus)?
            } else {
                core(u_minus, u_plus)?
            };
            Ok(f * a)
        }
        PdeSystem::Swe2D { .. } => {
            let rot_plus = physics::rotate_to_normal(pde, u_plus, n);
            let rot_minus = physics::rotate_to_normal(pde, u_minus, n);
            let q_plus = StateVector::pair(rot_plus[0], rot_plus[1]);
            let q_minus = StateVector::pair(rot_minus[0], rot_minus[1]);
            let f1d = core(&q_plus, &q_minus)?;
            let (f_mass, f_nmom) = (f1d[0], f1d[1]);
            let ut_up = if f_mass >= 0.0 {
                physics::swe_velocity(rot_plus[0], rot_plus[2])
            } else {
                physics::swe_velocity(rot_minus[0], rot_minus[2])
            };
            let rotated_flux = StateVector::triple(f_mass, f_nmom, f_mass * ut_up);
            Ok(physics::rotate_back(pde, &rotated_flux, n))
        }
        _ => {
            // 1D systems: H(U+, U-, -e1) = -H_x(U-, U+)
            if n.x() >= 0.0 {
                core(u_plus, u_minus)
            } else {
                Ok(-(core(u_minus, u_plus)?))
            }
        }
    }
}

/// Surrogate flux on a 2D face: the 1D model lifted by rotational
/// invariance. `pde` is the system being solved and must match the family
/// the model was trained on.
pub fn surrogate_flux_nd(
    model: &SurrogateModel,
    pde: &PdeSystem,
    u_plus: &StateVector,
    u_minus: &StateVector,
    n: &UnitNormal,
) -> Result<FluxVector, SurrogateError> {
    check_family(model, pde)?;
    lift_flux_nd(pde, u_plus, u_minus, n, |a, b| surrogate_flux_1d(model, a, b))
}

fn check_family(model: &SurrogateModel, pde: &PdeSystem) -> Result<(), SurrogateError> {
    let compatible = matches!(
        (&model.pde, pde),
        (PdeSystem::Burgers1D { .. }, PdeSystem::Burgers1D { .. })
            | (PdeSystem::Burgers1D { .. }, PdeSystem::Burgers2D { .. })
            | (PdeSystem::Swe1D { .. }, PdeSystem::Swe1D { .. })
            | (PdeSystem::Swe1D { .. }, PdeSystem::Swe2D { .. })
    );
    if compatible {
        Ok(())
    } else {
        Err(SurrogateError::Unsupported(format!(
            "model trained on {:?} cannot serve {:?}",
            model.pde, pde
        )))
    }
}

/// On-disk model document. Weights are row-major per layer; serde_json
/// round-trips every f64 exactly.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    kind: SurrogateKind,
    #[serde(default)]
    lf_solver: Option<LfSolver>,
    pde: PdeSystem,
    seed: u64,
    activation: Activation,
    /// Inputs are fed raw; kept in the document so a normalizing variant
    /// stays representable.
    normalization: bool,
    input_dim: usize,
    output_dim: usize,
    hidden_layers: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

const MODEL_FORMAT: &str = "nnflux-model-v1";

pub fn save_model(model: &SurrogateModel, path: impl AsRef<Path>) -> Result<(), SurrogateError> {
    let path = path.as_ref();
    let doc = ModelFile {
        format: MODEL_FORMAT.to_string(),
        kind: model.kind,
        lf_solver: model.lf_solver,
        pde: model.pde,
        seed: model.params.seed,
        activation: model.params.spec.activation,
        normalization: false,
        input_dim: model.params.spec.input_dim,
        output_dim: model.params.spec.output_dim,
        hidden_layers: model.params.spec.hidden_layers.clone(),
        weights: model.params.weights.clone(),
        biases: model.params.biases.clone(),
    };
    let text = serde_json::to_string_pretty(&doc).expect("model serializes");
    fs::write(path, text).map_err(|source| SurrogateError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SurrogateModel, SurrogateError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| SurrogateError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let doc: ModelFile =
        serde_json::from_str(&text).map_err(|e| SurrogateError::Malformed {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    if doc.format != MODEL_FORMAT {
        return Err(SurrogateError::Malformed {
            path: path.display().to_string(),
            message: format!("unknown format tag {:?}", doc.format),
        });
    }
    if doc.normalization {
        return Err(SurrogateError::Unsupported(
            "input normalization is not implemented by this evaluator".into(),
        ));
    }
    let spec = NetworkSpec {
        input_dim: doc.input_dim,
        output_dim: doc.output_dim,
        hidden_layers: doc.hidden_layers,
        activation: doc.activation,
    };
    spec.validate().map_err(|e| SurrogateError::Malformed {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let dims = spec.layer_dims();
    if doc.weights.len() != dims.len() - 1 || doc.biases.len() != dims.len() - 1 {
        return Err(SurrogateError::DimensionMismatch(format!(
            "{} weight / {} bias blocks for {} layers",
            doc.weights.len(),
            doc.biases.len(),
            dims.len() - 1
        )));
    }
    for l in 1..dims.len() {
        if doc.weights[l - 1].len() != dims[l] * dims[l - 1] || doc.biases[l - 1].len() != dims[l] {
            return Err(SurrogateError::DimensionMismatch(format!(
                "layer {} block sizes do not match widths {}x{}",
                l,
                dims[l],
                dims[l - 1]
            )));
        }
    }
    let params = NetworkParameters { spec, seed: doc.seed, weights: doc.weights, biases: doc.biases };
    if !params.all_finite() {
        return Err(SurrogateError::Malformed {
            path: path.display().to_string(),
            message: "non-finite parameter entries".into(),
        });
    }
    SurrogateModel::new(doc.kind, doc.lf_solver, doc.pde, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::neural::init_params;

    fn zeroed_params(spec: &NetworkSpec) -> NetworkParameters {
        let mut p = init_params(spec, 0).unwrap();
        p.weights.iter_mut().for_each(|w| w.iter_mut().for_each(|v| *v = 0.0));
        p
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn bifidelity_with_zero_network_is_the_lf_flux() {
        let spec = NetworkSpec::new(6, vec![4], 2);
        let model = SurrogateModel::new(
            SurrogateKind::BiFidelity,
            Some(LfSolver::Roe),
            PdeSystem::swe_1d(),
            zeroed_params(&spec),
        )
        .unwrap();
        let up = StateVector::pair(1.5, 0.3);
        let um = StateVector::pair(0.8, -0.2);
        let f = surrogate_flux_1d(&model, &up, &um).unwrap();
        let lf = lf_flux(LfSolver::Roe, &PdeSystem::swe_1d(), &up, &um).unwrap();
        assert!(f.abs_diff_max(&lf) == 0.0);
    }

    #[test]
    fn model_shape_validation() {
        let spec = NetworkSpec::new(3, vec![4], 1); // vanilla Burgers needs 2
        let err = SurrogateModel::new(
            SurrogateKind::Vanilla,
            None,
            PdeSystem::burgers_1d(),
            zeroed_params(&spec),
        );
        assert!(matches!(err, Err(SurrogateError::DimensionMismatch(_))));

        let spec = NetworkSpec::new(2, vec![4], 1);
        assert!(SurrogateModel::new(
            SurrogateKind::Vanilla,
            None,
            PdeSystem::burgers_1d(),
            zeroed_params(&spec),
        )
        .is_ok());
    }

    #[test]
    fn lift_reduces_to_1d_on_axis_normal() {
        let pde = PdeSystem::burgers_2d([1.0, 0.0]);
        let core = |a: &StateVector, b: &StateVector| -> Result<FluxVector, std::convert::Infallible> {
            Ok(StateVector::scalar(exact::godunov_flux_burgers(a[0], b[0])))
        };
        let up = StateVector::scalar(0.7);
        let um = StateVector::scalar(-0.4);
        let f = lift_flux_nd(&pde, &up, &um, &UnitNormal::X_PLUS, core).unwrap();
        assert_close(f[0], exact::godunov_flux_burgers(0.7, -0.4), 0.0);
    }

    #[test]
    fn lift_reflects_negative_projection() {
        // beta = (1,1), N = (-1,0): a = -1, so the oriented problem swaps
        // sides; with the exact core the expected value is -H(-1 side data)
        let pde = PdeSystem::burgers_2d([1.0, 1.0]);
        let core = |a: &StateVector, b: &StateVector| -> Result<FluxVector, std::convert::Infallible> {
            Ok(StateVector::scalar(exact::godunov_flux_burgers(a[0], b[0])))
        };
        let f = lift_flux_nd(
            &pde,
            &StateVector::scalar(1.0),
            &StateVector::scalar(-1.0),
            &UnitNormal::X_MINUS,
            core,
        )
        .unwrap();
        assert_close(f[0], -exact::godunov_flux_burgers(-1.0, 1.0), 0.0);
        assert_close(f[0], 0.0, 0.0);
    }

    #[test]
    fn lift_swe_consistency_through_rotation() {
        let pde = PdeSystem::swe_2d();
        let core = |a: &StateVector, b: &StateVector| {
            exact::godunov_flux(&RiemannFluxQuery {
                pde: PdeSystem::swe_1d(),
                u_plus: *a,
                u_minus: *b,
            })
        };
        let u = StateVector::triple(1.0, 0.0, 0.0);
        let n = UnitNormal::new(0.0, 1.0).unwrap();
        let f = lift_flux_nd(&pde, &u, &u, &n, core).unwrap();
        assert_close(f[0], 0.0, 1e-14);
        assert_close(f[1], 0.0, 1e-14);
        assert_close(f[2], 0.5, 1e-14);
    }

    #[test]
    fn model_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let spec = NetworkSpec::new(2, vec![5, 5], 1);
        let params = init_params(&spec, 1234).unwrap();
        let model =
            SurrogateModel::new(SurrogateKind::Vanilla, None, PdeSystem::burgers_1d(), params)
                .unwrap();
        let path_a = dir.path().join("model_a.json");
        let path_b = dir.path().join("model_b.json");
        save_model(&model, &path_a).unwrap();
        let loaded = load_model(&path_a).unwrap();
        assert_eq!(loaded.params, model.params);
        assert_eq!(loaded.kind, model.kind);
        save_model(&loaded, &path_b).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path_a).unwrap(),
            std::fs::read_to_string(&path_b).unwrap()
        );
    }

    #[test]
    fn load_rejects_wrong_input_dim() {
        let dir = tempfile::tempdir().unwrap();
        let spec = NetworkSpec::new(4, vec![5], 1); // burgers vanilla must be 2
        let params = init_params(&spec, 0).unwrap();
        let path = dir.path().join("bad.json");
        // write by hand since the constructor refuses to build it
        let doc = serde_json::json!({
            "format": MODEL_FORMAT,
            "kind": "vanilla",
            "pde": {"kind": "burgers1d", "viscosity": 0.0},
            "seed": 0,
            "activation": "tanh",
            "normalization": false,
            "input_dim": 4,
            "output_dim": 1,
            "hidden_layers": [5],
            "weights": [params.weights[0], params.weights[1]],
            "biases": [params.biases[0], params.biases[1]],
        });
        std::fs::write(&path, doc.to_string()).unwrap();
        assert!(load_model(&path).is_err());
    }

    #[test]
    fn bifidelity_tag_drives_evaluation() {
        let spec = NetworkSpec::new(6, vec![4], 2);
        let model = SurrogateModel::new(
            SurrogateKind::BiFidelity,
            Some(LfSolver::Roe),
            PdeSystem::swe_1d(),
            zeroed_params(&spec),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bf.json");
        save_model(&model, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(loaded.lf_solver, Some(LfSolver::Roe));
        let up = StateVector::pair(2.0, 0.5);
        let um = StateVector::pair(1.0, -0.5);
        let via_file = surrogate_flux_1d(&loaded, &up, &um).unwrap();
        let direct = surrogate_flux_1d(&model, &up, &um).unwrap();
        assert!(via_file.abs_diff_max(&direct) == 0.0);
    }
}
