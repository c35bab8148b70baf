//! First-order cell-centered finite volume solver.
//!
//! Semi-discretization: for each cell K,
//!   dU_K/dt = -(1/|K|) sum_j |dK_j| ( H(U^+, U^-, N_j) - F_V . N_j ),
//! with piecewise-constant traces (the adjacent cell averages), a pluggable
//! inviscid numerical flux H, a two-point viscous flux, ghost-state boundary
//! conditions, and explicit forward Euler with a CFL-limited step.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::approx::{self, ApproxError, HartenDelta};
use crate::exact::{self, RiemannError, RiemannFluxQuery};
use crate::ic::InitialCondition;
use crate::mesh::{self, BoundaryTag, Mesh, MeshError};
use crate::physics::{self, PdeSystem, PhysicsError};
use crate::state::{FluxVector, StateVector};
use crate::surrogate::{lift_flux_nd, surrogate_flux_1d, SurrogateError, SurrogateKind, SurrogateModel};

/// Cells more negative than this abort the run; small negatives inside the
/// tolerance are clamped to a dry state.
pub const DEPTH_FAILURE_TOL: f64 = 1e-12;

const WAVE_SPEED_FLOOR: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum FluxError {
    #[error(transparent)]
    Riemann(#[from] RiemannError),
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Surrogate(#[from] SurrogateError),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
}

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error("flux evaluation failed at face {face}, t = {time}: {source}")]
    Flux {
        face: usize,
        time: f64,
        #[source]
        source: FluxError,
    },
    #[error("depth went negative in cell {cell} at t = {time} (h = {depth:e})")]
    Positivity { cell: usize, time: f64, depth: f64 },
    #[error("non-finite state detected at t = {time}")]
    NonFinite { time: f64 },
    #[error("invalid simulation setup: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

impl SimulationError {
    /// (time, cell-or-face index, reason) of a numerical failure, for the
    /// structured failure record.
    pub fn failure_info(&self) -> Option<(f64, Option<usize>, String)> {
        match self {
            SimulationError::Flux { face, time, source } => {
                Some((*time, Some(*face), format!("flux evaluation failed: {source}")))
            }
            SimulationError::Positivity { cell, time, depth } => {
                Some((*time, Some(*cell), format!("negative depth {depth:e}")))
            }
            SimulationError::NonFinite { time } => {
                Some((*time, None, "non-finite state".to_string()))
            }
            _ => None,
        }
    }
}

/// Inviscid numerical flux selection.
#[derive(Clone, Debug)]
pub enum FluxChoice {
    Godunov,
    Roe,
    RoeHarten(HartenDelta),
    Hll,
    SurrogateVnn(SurrogateModel),
    SurrogateBfnn(SurrogateModel),
}

impl FluxChoice {
    pub fn name(&self) -> &'static str {
        match self {
            FluxChoice::Godunov => "godunov",
            FluxChoice::Roe => "roe",
            FluxChoice::RoeHarten(_) => "roe_harten",
            FluxChoice::Hll => "hll",
            FluxChoice::SurrogateVnn(_) => "vnn",
            FluxChoice::SurrogateBfnn(_) => "bfnn",
        }
    }

    pub fn validate(&self, pde: &PdeSystem) -> Result<(), SimulationError> {
        match self {
            FluxChoice::SurrogateVnn(m) | FluxChoice::SurrogateBfnn(m) => {
                let expected = match self {
                    FluxChoice::SurrogateVnn(_) => SurrogateKind::Vanilla,
                    _ => SurrogateKind::BiFidelity,
                };
                if m.kind != expected {
                    return Err(SimulationError::InvalidConfig(format!(
                        "flux choice {} given a {:?} model",
                        self.name(),
                        m.kind
                    )));
                }
                let family_ok = matches!(
                    (&m.pde, pde.as_1d()),
                    (PdeSystem::Burgers1D { .. }, PdeSystem::Burgers1D { .. })
                        | (PdeSystem::Swe1D { .. }, PdeSystem::Swe1D { .. })
                );
                if !family_ok {
                    return Err(SimulationError::InvalidConfig(format!(
                        "model trained on {:?} cannot serve {:?}",
                        m.pde, pde
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// x-directed 1D flux of the reduced system.
    pub fn flux_1d(
        &self,
        pde_1d: &PdeSystem,
        u_plus: &StateVector,
        u_minus: &StateVector,
    ) -> Result<FluxVector, FluxError> {
        let query = || RiemannFluxQuery { pde: *pde_1d, u_plus: *u_plus, u_minus: *u_minus };
        match self {
            FluxChoice::Godunov => Ok(exact::godunov_flux(&query())?),
            FluxChoice::Roe => Ok(approx::roe_flux(&query())?),
            FluxChoice::RoeHarten(delta) => Ok(approx::roe_flux_fixed(&query(), *delta)?),
            FluxChoice::Hll => Ok(approx::hll_flux(&query())?),
            FluxChoice::SurrogateVnn(m) | FluxChoice::SurrogateBfnn(m) => {
                Ok(surrogate_flux_1d(m, u_plus, u_minus)?)
            }
        }
    }

    /// Flux through a face with unit normal `n`, lifted from the 1D flux by
    /// rotational invariance when the system is multidimensional.
    pub fn face_flux(
        &self,
        pde: &PdeSystem,
        u_plus: &StateVector,
        u_minus: &StateVector,
        n: &physics::UnitNormal,
    ) -> Result<FluxVector, FluxError> {
        let pde_1d = pde.as_1d();
        lift_flux_nd(pde, u_plus, u_minus, n, |a, b| self.flux_1d(&pde_1d, a, b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryRule {
    /// Ghost state equals the interior state.
    Transmissive,
    /// Ghost state comes from the paired cell on the opposite side.
    Periodic,
    /// Ghost mirrors the normal velocity component (SWE).
    ReflectiveWall,
}

/// Per-tag boundary rules with resolved periodic partners.
#[derive(Clone, Debug)]
pub struct BoundaryConditions {
    rules: HashMap<BoundaryTag, BoundaryRule>,
    /// face index -> (partner cell, centroid-to-centroid distance through
    /// the seam) for the viscous two-point gradient
    periodic: HashMap<usize, (usize, f64)>,
}

impl BoundaryConditions {
    /// Every tag transmissive.
    pub fn transmissive() -> Self {
        BoundaryConditions { rules: HashMap::new(), periodic: HashMap::new() }
    }

    /// Every tag reflective (SWE walls).
    pub fn reflective() -> Self {
        let mut rules = HashMap::new();
        for tag in [
            BoundaryTag::Left,
            BoundaryTag::Right,
            BoundaryTag::Bottom,
            BoundaryTag::Top,
            BoundaryTag::Outer,
        ] {
            rules.insert(tag, BoundaryRule::ReflectiveWall);
        }
        BoundaryConditions { rules, periodic: HashMap::new() }
    }

    /// Periodic in x (left/right paired); other tags transmissive.
    pub fn periodic_x(mesh: &Mesh) -> Result<Self, MeshError> {
        let mut bc = BoundaryConditions::transmissive();
        bc.rules.insert(BoundaryTag::Left, BoundaryRule::Periodic);
        bc.rules.insert(BoundaryTag::Right, BoundaryRule::Periodic);
        bc.add_periodic_pairs(mesh, BoundaryTag::Left, BoundaryTag::Right)?;
        Ok(bc)
    }

    fn add_periodic_pairs(
        &mut self,
        mesh: &Mesh,
        tag_a: BoundaryTag,
        tag_b: BoundaryTag,
    ) -> Result<(), MeshError> {
        for (fa, fb) in mesh::pair_boundary_faces(mesh, tag_a, tag_b)? {
            let dist = |f: usize| {
                let face = &mesh.faces[f];
                let c = mesh.cells[face.owner].centroid;
                let d = [face.centroid[0] - c[0], face.centroid[1] - c[1]];
                (d[0] * d[0] + d[1] * d[1]).sqrt()
            };
            let through = dist(fa) + dist(fb);
            self.periodic.insert(fa, (mesh.faces[fb].owner, through));
            self.periodic.insert(fb, (mesh.faces[fa].owner, through));
        }
        Ok(())
    }

    pub fn rule(&self, tag: BoundaryTag) -> BoundaryRule {
        self.rules.get(&tag).copied().unwrap_or(BoundaryRule::Transmissive)
    }

    /// Ghost state and viscous-gradient distance for a boundary face; a
    /// `None` distance means a zero-gradient viscous closure.
    fn ghost(
        &self,
        pde: &PdeSystem,
        mesh: &Mesh,
        face_idx: usize,
        states: &[StateVector],
    ) -> (StateVector, Option<f64>) {
        let face = &mesh.faces[face_idx];
        let owner_state = states[face.owner];
        let tag = face.boundary.expect("boundary face");
        match self.rule(tag) {
            BoundaryRule::Transmissive => (owner_state, None),
            BoundaryRule::Periodic => match self.periodic.get(&face_idx) {
                Some(&(partner, dist)) => (states[partner], Some(dist)),
                None => (owner_state, None),
            },
            BoundaryRule::ReflectiveWall => {
                let n = &face.normal;
                match pde {
                    PdeSystem::Swe1D { .. } => {
                        let mut g = owner_state;
                        g[1] = -g[1];
                        (g, None)
                    }
                    PdeSystem::Swe2D { .. } => {
                        let (hu, hv) = (owner_state[1], owner_state[2]);
                        let mn = hu * n.x() + hv * n.y();
                        (
                            StateVector::triple(
                                owner_state[0],
                                hu - 2.0 * mn * n.x(),
                                hv - 2.0 * mn * n.y(),
                            ),
                            None,
                        )
                    }
                    // scalar laws have no wall velocity to mirror
                    _ => (owner_state, None),
                }
            }
        }
    }
}

/// Cell averages at a time level.
#[derive(Clone, Debug)]
pub struct SimState {
    pub states: Vec<StateVector>,
    pub t: f64,
}

/// Full simulation setup; validated before a run.
#[derive(Clone)]
pub struct SimulationConfig<'a> {
    pub pde: PdeSystem,
    pub mesh: &'a Mesh,
    pub flux: FluxChoice,
    pub bc: BoundaryConditions,
    pub cfl: f64,
    pub t_final: f64,
    pub snapshot_times: Vec<f64>,
}

impl<'a> SimulationConfig<'a> {
    pub fn new(pde: PdeSystem, mesh: &'a Mesh, flux: FluxChoice) -> Self {
        SimulationConfig {
            pde,
            mesh,
            flux,
            bc: BoundaryConditions::transmissive(),
            cfl: 0.4,
            t_final: 1.0,
            snapshot_times: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), SimulationError> {
        if self.pde.spatial_dim() != self.mesh.dim {
            return Err(SimulationError::InvalidConfig(format!(
                "{:?} is {}D but the mesh is {}D",
                self.pde,
                self.pde.spatial_dim(),
                self.mesh.dim
            )));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(SimulationError::InvalidConfig(format!("cfl {} not in (0, 1]", self.cfl)));
        }
        if self.t_final <= 0.0 {
            return Err(SimulationError::InvalidConfig("t_final must be positive".into()));
        }
        if self.pde.viscosity() > 0.0 && self.pde.is_swe() {
            return Err(SimulationError::InvalidConfig("viscosity only applies to Burgers".into()));
        }
        for &s in &self.snapshot_times {
            if s < 0.0 || s > self.t_final + 1e-12 {
                return Err(SimulationError::InvalidConfig(format!(
                    "snapshot time {s} outside (0, t_final)"
                )));
            }
        }
        self.flux.validate(&self.pde)
    }
}

fn face_fluxes(
    pde: &PdeSystem,
    mesh: &Mesh,
    states: &[StateVector],
    flux: &FluxChoice,
    bc: &BoundaryConditions,
) -> Result<Vec<FluxVector>, (usize, FluxError)> {
    let nu = pde.viscosity();
    let eval = |(fi, face): (usize, &mesh::Face)| -> Result<FluxVector, (usize, FluxError)> {
        let u_own = states[face.owner];
        let (u_nb, viscous_dist) = match face.neighbor {
            Some(nb) => {
                let c_own = mesh.cells[face.owner].centroid;
                let c_nb = mesh.cells[nb].centroid;
                let d = [c_nb[0] - c_own[0], c_nb[1] - c_own[1]];
                (states[nb], Some((d[0] * d[0] + d[1] * d[1]).sqrt()))
            }
            None => {
                let (g, dist) = bc.ghost(pde, mesh, fi, states);
                (g, dist)
            }
        };
        let mut total = flux
            .face_flux(pde, &u_own, &u_nb, &face.normal)
            .map_err(|e| (fi, e))?;
        if nu > 0.0 {
            if let Some(dist) = viscous_dist {
                // two-point gradient along the centroid line, second order
                // on orthogonal meshes
                for c in 0..total.len() {
                    total[c] -= nu * (u_nb[c] - u_own[c]) / dist;
                }
            }
        }
        Ok(total)
    };

    if mesh.faces.len() < 512 {
        mesh.faces.iter().enumerate().map(eval).collect()
    } else {
        mesh.faces.par_iter().enumerate().map(eval).collect()
    }
}

/// Rate of change of every cell average under the semi-discretization.
pub fn compute_residual(
    pde: &PdeSystem,
    mesh: &Mesh,
    state: &SimState,
    flux: &FluxChoice,
    bc: &BoundaryConditions,
) -> Result<Vec<StateVector>, SimulationError> {
    let (rates, _) = residual_with_boundary_flux(pde, mesh, state, flux, bc)?;
    Ok(rates)
}

/// As [`compute_residual`], also returning sum over boundary faces of
/// |dK_j| H_j for the conservation ledger.
pub fn residual_with_boundary_flux(
    pde: &PdeSystem,
    mesh: &Mesh,
    state: &SimState,
    flux: &FluxChoice,
    bc: &BoundaryConditions,
) -> Result<(Vec<StateVector>, FluxVector), SimulationError> {
    let m = pde.state_dim();
    let fluxes = face_fluxes(pde, mesh, &state.states, flux, bc).map_err(|(face, source)| {
        SimulationError::Flux { face, time: state.t, source }
    })?;

    let mut rates = vec![StateVector::zeros(m); mesh.n_cells()];
    let mut boundary = StateVector::zeros(m);
    for (face, total) in mesh.faces.iter().zip(&fluxes) {
        let scaled_own = *total * (face.measure / mesh.cells[face.owner].measure);
        rates[face.owner] = rates[face.owner] - scaled_own;
        match face.neighbor {
            Some(nb) => {
                let scaled_nb = *total * (face.measure / mesh.cells[nb].measure);
                rates[nb] = rates[nb] + scaled_nb;
            }
            None => {
                boundary = boundary + *total * face.measure;
            }
        }
    }
    Ok((rates, boundary))
}

/// CFL-limited explicit step: cfl * h_K / max wave speed, additionally
/// restricted by cfl * h_K^2 / (2 nu) for viscous runs.
pub fn cfl_timestep(pde: &PdeSystem, mesh: &Mesh, state: &SimState, cfl: f64) -> f64 {
    // per-cell size |K| / max face measure in one sweep over faces
    let mut max_face = vec![0.0f64; mesh.n_cells()];
    for f in &mesh.faces {
        max_face[f.owner] = max_face[f.owner].max(f.measure);
        if let Some(nb) = f.neighbor {
            max_face[nb] = max_face[nb].max(f.measure);
        }
    }
    let nu = pde.viscosity();
    let mut dt = f64::INFINITY;
    for (i, u) in state.states.iter().enumerate() {
        let h_k = mesh.cells[i].measure / max_face[i];
        let speed = physics::max_wave_speed(pde, u);
        dt = dt.min(cfl * h_k / (speed + WAVE_SPEED_FLOOR));
        if nu > 0.0 {
            dt = dt.min(cfl * h_k * h_k / (2.0 * nu));
        }
    }
    dt
}

/// One forward-Euler step of the free step size.
pub fn advance(config: &SimulationConfig<'_>, state: &SimState) -> Result<SimState, SimulationError> {
    let dt = cfl_timestep(&config.pde, config.mesh, state, config.cfl);
    advance_by(config, state, dt).map(|(s, _)| s)
}

fn advance_by(
    config: &SimulationConfig<'_>,
    state: &SimState,
    dt: f64,
) -> Result<(SimState, FluxVector), SimulationError> {
    let (rates, boundary) =
        residual_with_boundary_flux(&config.pde, config.mesh, state, &config.flux, &config.bc)?;
    let mut next = Vec::with_capacity(state.states.len());
    let t_next = state.t + dt;
    for (cell, (u, r)) in state.states.iter().zip(&rates).enumerate() {
        let mut v = *u + *r * dt;
        if !v.is_finite() {
            return Err(SimulationError::NonFinite { time: t_next });
        }
        if config.pde.is_swe() {
            let h = v[0];
            if h < -DEPTH_FAILURE_TOL {
                return Err(SimulationError::Positivity { cell, time: t_next, depth: h });
            }
            if h < 0.0 {
                // within tolerance: clamp to a dry state
                v = StateVector::zeros(v.len());
            }
        }
        next.push(v);
    }
    Ok((SimState { states: next, t: t_next }, boundary))
}

/// Result of a completed run.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub final_state: SimState,
    pub snapshots: Vec<(f64, SimState)>,
    pub steps: usize,
    /// Integral over time of the boundary flux, component-wise:
    /// mass balance closes as mass(T) - mass(0) + integral = 0.
    pub boundary_flux_integral: FluxVector,
}

/// Component-wise total sum |K| U_K.
pub fn total_mass(mesh: &Mesh, states: &[StateVector]) -> FluxVector {
    let m = states.first().map(|s| s.len()).unwrap_or(1);
    let mut acc = StateVector::zeros(m);
    for (cell, u) in mesh.cells.iter().zip(states) {
        acc = acc + *u * cell.measure;
    }
    acc
}

/// Initial cell averages by midpoint evaluation of the IC at centroids.
pub fn initialize(
    config: &SimulationConfig<'_>,
    ic: &InitialCondition,
) -> Result<SimState, SimulationError> {
    if ic.state_dim() != config.pde.state_dim() {
        return Err(SimulationError::InvalidConfig(format!(
            "initial condition produces {} components, {:?} needs {}",
            ic.state_dim(),
            config.pde,
            config.pde.state_dim()
        )));
    }
    let states: Vec<StateVector> =
        config.mesh.cells.iter().map(|c| ic.eval(c.centroid)).collect();
    for (cell, u) in states.iter().enumerate() {
        if config.pde.is_swe() && u[0] < 0.0 {
            return Err(SimulationError::InvalidConfig(format!(
                "initial depth negative in cell {cell}"
            )));
        }
    }
    Ok(SimState { states, t: 0.0 })
}

/// Run to `t_final` with snapshots at the configured times. The step is
/// clipped so snapshot times and the final time are hit exactly.
pub fn run_simulation(
    config: &SimulationConfig<'_>,
    ic: &InitialCondition,
) -> Result<RunResult, SimulationError> {
    config.validate()?;
    let mut state = initialize(config, ic)?;

    let mut events: Vec<f64> = config.snapshot_times.clone();
    events.push(config.t_final);
    events.sort_by(|a, b| a.partial_cmp(b).unwrap());
    events.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let mut snapshots = Vec::new();
    let wants = |t: f64| config.snapshot_times.iter().any(|&s| (s - t).abs() < 1e-12);
    if wants(0.0) {
        snapshots.push((0.0, state.clone()));
    }

    let m = config.pde.state_dim();
    let mut boundary_integral = StateVector::zeros(m);
    let mut steps = 0usize;
    for &event in events.iter().filter(|&&e| e > 1e-12) {
        while state.t < event - 1e-12 {
            let dt_cfl = cfl_timestep(&config.pde, config.mesh, &state, config.cfl);
            let dt = dt_cfl.min(event - state.t);
            let (next, boundary) = advance_by(config, &state, dt)?;
            boundary_integral = boundary_integral + boundary * dt;
            state = next;
            steps += 1;
        }
        state.t = event;
        if wants(event) {
            snapshots.push((event, state.clone()));
        }
    }

    Ok(RunResult { final_state: state, snapshots, steps, boundary_flux_integral: boundary_integral })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{make_pentagon_tri_mesh, make_quad_mesh_rect, make_uniform_grid_1d};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn uniform_state_has_zero_residual() {
        let meshes = vec![
            (PdeSystem::burgers_1d(), make_uniform_grid_1d(-1.0, 1.0, 16)),
            (PdeSystem::swe_2d(), make_quad_mesh_rect(0.0, 1.0, 0.0, 1.0, 6, 6)),
            (PdeSystem::burgers_2d([1.0, 1.0]), make_pentagon_tri_mesh(1.0, 4)),
        ];
        for (pde, mesh) in meshes {
            let m = pde.state_dim();
            let mut u = StateVector::zeros(m);
            u[0] = if pde.is_swe() { 1.3 } else { 0.7 };
            if m >= 2 {
                u[1] = 0.4;
            }
            let state = SimState { states: vec![u; mesh.n_cells()], t: 0.0 };
            for flux in [FluxChoice::Godunov, FluxChoice::Roe, FluxChoice::Hll] {
                let rates = compute_residual(
                    &pde,
                    &mesh,
                    &state,
                    &flux,
                    &BoundaryConditions::transmissive(),
                )
                .unwrap();
                let worst = rates
                    .iter()
                    .flat_map(|r| r.iter())
                    .fold(0.0f64, |m, v| m.max(v.abs()));
                assert!(worst < 1e-12, "{} residual {worst}", flux.name());
            }
        }
    }

    #[test]
    fn two_cell_hand_computed_rates() {
        let mesh = make_uniform_grid_1d(-0.5, 0.5, 2);
        let pde = PdeSystem::burgers_1d();
        let state = SimState {
            states: vec![StateVector::scalar(1.0), StateVector::scalar(0.0)],
            t: 0.0,
        };
        let rates = compute_residual(
            &pde,
            &mesh,
            &state,
            &FluxChoice::Godunov,
            &BoundaryConditions::transmissive(),
        )
        .unwrap();
        // interior flux f(1) = 0.5; boundary fluxes f(1) left, f(0) right
        assert_close(rates[0][0], 0.0, 1e-15);
        assert_close(rates[1][0], 1.0, 1e-15);
    }

    #[test]
    fn viscous_residual_approximates_laplacian() {
        // pure diffusion of sin(2 pi x) on a periodic grid: du/dt =
        // nu u_xx = -nu (2 pi)^2 sin(2 pi x); the discrete rate converges
        // at second order
        let nu = 0.1;
        let pde = PdeSystem::burgers_1d_viscous(nu);
        let mut errs = Vec::new();
        for n in [64usize, 128, 256] {
            let mesh = make_uniform_grid_1d(0.0, 1.0, n);
            let bc = BoundaryConditions::periodic_x(&mesh).unwrap();
            // zero the advective part by linearizing around u = 0: use tiny
            // amplitude so u u_x is negligible against nu u_xx
            let amp = 1e-8;
            let states: Vec<StateVector> = mesh
                .cells
                .iter()
                .map(|c| StateVector::scalar(amp * (std::f64::consts::TAU * c.centroid[0]).sin()))
                .collect();
            let state = SimState { states, t: 0.0 };
            let rates =
                compute_residual(&pde, &mesh, &state, &FluxChoice::Godunov, &bc).unwrap();
            let mut err = 0.0f64;
            for (c, r) in mesh.cells.iter().zip(&rates) {
                let x = c.centroid[0];
                let exact = -nu
                    * std::f64::consts::TAU.powi(2)
                    * amp
                    * (std::f64::consts::TAU * x).sin();
                err = err.max((r[0] - exact).abs() / amp);
            }
            errs.push(err);
        }
        assert!(errs[1] < 0.3 * errs[0], "{errs:?}");
        assert!(errs[2] < 0.3 * errs[1], "{errs:?}");
    }

    #[test]
    fn cfl_examples() {
        let mesh = make_uniform_grid_1d(0.0, 1.0, 10);
        let pde = PdeSystem::burgers_1d();
        let states: Vec<StateVector> = (0..10)
            .map(|i| StateVector::scalar(if i % 2 == 0 { 1.0 } else { -1.0 }))
            .collect();
        let dt = cfl_timestep(&pde, &mesh, &SimState { states, t: 0.0 }, 0.4);
        assert_close(dt, 0.04, 1e-12);

        // dry rest state: guarded, large but finite
        let pde = PdeSystem::swe_1d();
        let states = vec![StateVector::pair(0.0, 0.0); 10];
        let dt = cfl_timestep(&pde, &mesh, &SimState { states, t: 0.0 }, 0.4);
        assert!(dt.is_finite() && dt > 1e6);

        // viscous restriction: dt <= cfl h^2 / (2 nu) = 0.2 beats the
        // inviscid bound only when the state is slow
        let pde = PdeSystem::burgers_1d_viscous(1e-4);
        let mesh = make_uniform_grid_1d(0.0, 1.0, 100);
        let states = vec![StateVector::scalar(0.0); 100];
        let dt = cfl_timestep(&pde, &mesh, &SimState { states, t: 0.0 }, 0.4);
        assert_close(dt, 0.4 * 1e-4 / 2e-4, 1e-9);
    }

    #[test]
    fn constant_state_stays_constant() {
        let mesh = make_uniform_grid_1d(-1.0, 1.0, 20);
        let pde = PdeSystem::swe_1d();
        let mut config = SimulationConfig::new(pde, &mesh, FluxChoice::Godunov);
        config.t_final = 0.25;
        let state = SimState { states: vec![StateVector::pair(1.0, 0.5); 20], t: 0.0 };
        let next = advance(&config, &state).unwrap();
        for (a, b) in state.states.iter().zip(&next.states) {
            assert!(a.abs_diff_max(b) < 1e-14);
        }
    }

    #[test]
    fn burgers_case1_rarefaction_is_odd_symmetric() {
        let mesh = make_uniform_grid_1d(-1.0, 1.0, 200);
        let pde = PdeSystem::burgers_1d();
        let mut config = SimulationConfig::new(pde, &mesh, FluxChoice::Godunov);
        config.t_final = 0.75;
        let result = run_simulation(&config, &InitialCondition::BurgersCase1).unwrap();
        let u = &result.final_state.states;
        let n = u.len();
        for i in 0..n / 2 {
            assert!(
                (u[i][0] + u[n - 1 - i][0]).abs() < 1e-10,
                "odd symmetry broken at cell {i}"
            );
        }
        assert_close(result.final_state.t, 0.75, 0.0);
    }

    #[test]
    fn periodic_viscous_run_conserves_mass() {
        let mesh = make_uniform_grid_1d(0.0, 1.0, 64);
        let pde = PdeSystem::burgers_1d_viscous(1e-4);
        let mut config = SimulationConfig::new(pde, &mesh, FluxChoice::Godunov);
        config.bc = BoundaryConditions::periodic_x(&mesh).unwrap();
        config.t_final = 0.25;
        let init = initialize(&config, &InitialCondition::BurgersViscousSine).unwrap();
        let mass0 = total_mass(&mesh, &init.states)[0];
        let result = run_simulation(&config, &InitialCondition::BurgersViscousSine).unwrap();
        let mass1 = total_mass(&mesh, &result.final_state.states)[0];
        assert!(
            (mass1 - mass0).abs() <= 1e-12 * result.steps as f64,
            "mass drift {} over {} steps",
            mass1 - mass0,
            result.steps
        );
    }

    #[test]
    fn snapshots_land_on_requested_times() {
        let mesh = make_uniform_grid_1d(-1.0, 1.0, 50);
        let pde = PdeSystem::burgers_1d();
        let mut config = SimulationConfig::new(pde, &mesh, FluxChoice::Godunov);
        config.t_final = 0.5;
        config.snapshot_times = vec![0.2, 0.5];
        let result = run_simulation(&config, &InitialCondition::BurgersCase1).unwrap();
        assert_eq!(result.snapshots.len(), 2);
        assert_eq!(result.snapshots[0].0, 0.2);
        assert_eq!(result.snapshots[1].0, 0.5);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mesh = make_uniform_grid_1d(-1.0, 1.0, 10);
        let mut config = SimulationConfig::new(PdeSystem::swe_2d(), &mesh, FluxChoice::Godunov);
        assert!(matches!(config.validate(), Err(SimulationError::InvalidConfig(_))));
        config.pde = PdeSystem::swe_1d();
        config.cfl = 1.5;
        assert!(config.validate().is_err());
        config.cfl = 0.4;
        assert!(config.validate().is_ok());
        // IC/pde mismatch
        assert!(initialize(&config, &InitialCondition::BurgersCase1).is_err());
    }

    #[test]
    fn reflective_wall_keeps_still_water_still() {
        let mesh = make_quad_mesh_rect(0.0, 1.0, 0.0, 1.0, 5, 5);
        let pde = PdeSystem::swe_2d();
        let mut config = SimulationConfig::new(pde, &mesh, FluxChoice::Godunov);
        config.bc = BoundaryConditions::reflective();
        let state = SimState {
            states: vec![StateVector::triple(1.0, 0.0, 0.0); mesh.n_cells()],
            t: 0.0,
        };
        let rates =
            compute_residual(&pde, &mesh, &state, &config.flux, &config.bc).unwrap();
        let worst = rates.iter().flat_map(|r| r.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-13);
    }
}
