//! `simulate`: build the mesh, run the FVM with the configured numerical
//! flux, and write snapshot CSVs plus a run log. Numerical failures emit a
//! structured failure record instead of snapshots.

use std::path::Path;

use nnflux::fvm::{
    run_simulation, total_mass, BoundaryConditions, FluxChoice, SimState, SimulationConfig,
    SimulationError,
};
use nnflux::mesh::{self, Mesh};
use nnflux::surrogate::load_model;

use crate::config::{BcSpec, ExperimentConfig, FluxSpec, MeshSpec, SimulationSection};
use crate::util::{ensure_dir, write_json, CsvDoc};
use crate::CliError;

pub fn build_mesh(spec: &MeshSpec) -> Result<Mesh, CliError> {
    match spec {
        MeshSpec::Uniform1d { x_lo, x_hi, n_cells } => {
            if *n_cells < 2 || x_hi <= x_lo {
                return Err(CliError::validation(format!(
                    "simulation.mesh: bad 1D grid ({x_lo}, {x_hi}) with {n_cells} cells"
                )));
            }
            Ok(mesh::make_uniform_grid_1d(*x_lo, *x_hi, *n_cells))
        }
        MeshSpec::RectQuad { x_lo, x_hi, y_lo, y_hi, nx, ny } => {
            if *nx < 1 || *ny < 1 || x_hi <= x_lo || y_hi <= y_lo {
                return Err(CliError::validation("simulation.mesh: bad rectangle".into()));
            }
            Ok(mesh::make_quad_mesh_rect(*x_lo, *x_hi, *y_lo, *y_hi, *nx, *ny))
        }
        MeshSpec::Pentagon { circumradius, rings } => {
            if *circumradius <= 0.0 || *rings < 1 {
                return Err(CliError::validation("simulation.mesh: bad pentagon".into()));
            }
            Ok(mesh::make_pentagon_tri_mesh(*circumradius, *rings))
        }
        MeshSpec::File { path } => {
            mesh::read_mesh(path).map_err(|e| CliError::validation(e.to_string()))
        }
    }
}

pub fn build_flux(sim: &SimulationSection) -> Result<FluxChoice, CliError> {
    Ok(match sim.flux {
        FluxSpec::Godunov => FluxChoice::Godunov,
        FluxSpec::Roe => FluxChoice::Roe,
        FluxSpec::RoeHarten => FluxChoice::RoeHarten(FluxSpec::harten_default()),
        FluxSpec::Hll => FluxChoice::Hll,
        FluxSpec::Vnn | FluxSpec::Bfnn => {
            let path = sim.model.as_ref().ok_or_else(|| {
                CliError::validation("simulation.model is required for surrogate fluxes".into())
            })?;
            let model = load_model(path).map_err(|e| CliError::validation(e.to_string()))?;
            match sim.flux {
                FluxSpec::Vnn => FluxChoice::SurrogateVnn(model),
                _ => FluxChoice::SurrogateBfnn(model),
            }
        }
    })
}

fn snapshot_csv(
    mesh: &Mesh,
    state: &SimState,
    meta: &[(&str, &str)],
    path: &Path,
) -> Result<(), CliError> {
    let m = state.states[0].len();
    let mut header: Vec<String> = vec!["x".into(), "y".into()];
    for c in 0..m {
        header.push(format!("u_{c}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut doc = CsvDoc::new(meta, &header_refs);
    for (cell, u) in mesh.cells.iter().zip(&state.states) {
        let mut fields = vec![cell.centroid[0], cell.centroid[1]];
        fields.extend(u.iter().copied());
        doc.row_f64(&fields);
    }
    doc.write(path)
}

pub fn run(config_path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let (config, config_hash) = ExperimentConfig::load(config_path)?;
    let pde = config.pde()?;
    let sim = config
        .simulation
        .as_ref()
        .ok_or_else(|| CliError::validation("missing config section `simulation`".into()))?;
    let out_dir = config.output_dir(out)?;
    ensure_dir(&out_dir)?;

    let mesh = build_mesh(&sim.mesh)?;
    mesh::write_mesh(&out_dir.join("mesh.txt"), &mesh)
        .map_err(|e| CliError::validation(e.to_string()))?;
    let flux = build_flux(sim)?;

    let bc = match sim.bc {
        BcSpec::Transmissive => BoundaryConditions::transmissive(),
        BcSpec::Reflective => BoundaryConditions::reflective(),
        BcSpec::PeriodicX => BoundaryConditions::periodic_x(&mesh)
            .map_err(|e| CliError::validation(e.to_string()))?,
    };

    let mut snapshot_times = sim.snapshots.clone();
    if !snapshot_times.iter().any(|&t| (t - sim.t_final).abs() < 1e-12) {
        snapshot_times.push(sim.t_final);
    }

    let sim_config = SimulationConfig {
        pde,
        mesh: &mesh,
        flux,
        bc,
        cfl: sim.cfl,
        t_final: sim.t_final,
        snapshot_times,
    };
    sim_config.validate().map_err(|e| CliError::validation(e.to_string()))?;

    let initial = nnflux::fvm::initialize(&sim_config, &sim.ic)
        .map_err(|e| CliError::validation(e.to_string()))?;
    let mass_initial = total_mass(&mesh, &initial.states);

    match run_simulation(&sim_config, &sim.ic) {
        Ok(result) => {
            let meta = [("config_hash", config_hash.as_str())];
            let mut files = Vec::new();
            for (t, state) in &result.snapshots {
                let name = format!("snapshot_{t}.csv");
                snapshot_csv(&mesh, state, &meta, &out_dir.join(&name))?;
                files.push(serde_json::json!({ "t": t, "file": name }));
            }
            let mass_final = total_mass(&mesh, &result.final_state.states);
            let m = pde.state_dim();
            let balance: Vec<f64> = (0..m)
                .map(|c| mass_final[c] - mass_initial[c] + result.boundary_flux_integral[c])
                .collect();
            write_json(
                &out_dir.join("run.json"),
                &serde_json::json!({
                    "status": "completed",
                    "config_hash": config_hash,
                    "flux": sim_config.flux.name(),
                    "pde": pde,
                    "n_cells": mesh.n_cells(),
                    "steps": result.steps,
                    "t_final": sim.t_final,
                    "mass_initial": mass_initial.as_slice(),
                    "mass_final": mass_final.as_slice(),
                    "boundary_flux_integral": result.boundary_flux_integral.as_slice(),
                    "mass_balance_residual": balance,
                    "snapshots": files,
                }),
            )?;
            println!(
                "simulate: {} steps to t = {} on {} cells -> {}",
                result.steps,
                sim.t_final,
                mesh.n_cells(),
                out_dir.display()
            );
            Ok(())
        }
        Err(err) => {
            let (time, index, reason) = match err.failure_info() {
                Some(info) => info,
                None => return Err(CliError::validation(err.to_string())),
            };
            write_json(
                &out_dir.join("failure.json"),
                &serde_json::json!({
                    "status": "failed",
                    "config_hash": config_hash,
                    "flux": sim_config.flux.name(),
                    "time": time,
                    "index": index,
                    "reason": reason,
                }),
            )?;
            let kind = match err {
                SimulationError::InvalidConfig(_) | SimulationError::Mesh(_) => "setup",
                _ => "numerical",
            };
            Err(CliError::numerical(format!(
                "simulation aborted ({kind}) at t = {time}: {reason} (failure record written)"
            )))
        }
    }
}
