//! Riemann solvers, neural-network surrogates for the Godunov flux, and a
//! cell-centered finite volume solver to exercise them.
//!
//! The crate is organized around the pipeline:
//!
//! 1. [`physics`] — PDE systems (Burgers, shallow water), fluxes, Jacobians,
//!    rotation machinery.
//! 2. [`exact`] / [`approx`] — exact (Godunov) and approximate (Roe, HLL)
//!    Riemann solvers for the 1D systems.
//! 3. [`dataset`] — sampled Riemann problems with Godunov targets and
//!    optional low-fidelity fluxes.
//! 4. [`neural`] — a small fully connected network with exact
//!    backpropagation of the relative-l1 loss and Adam training.
//! 5. [`surrogate`] — trained networks wrapped as numerical flux functions,
//!    extended to 2D through rotational invariance.
//! 6. [`mesh`] / [`fvm`] — 1D grids, 2D quad/triangle meshes, and the
//!    first-order finite volume solver with pluggable fluxes.

pub mod approx;
pub mod dataset;
pub mod exact;
pub mod fvm;
pub mod ic;
pub mod mesh;
pub mod neural;
pub mod physics;
pub mod state;
pub mod surrogate;

pub use approx::{einfeldt_speeds, harten_fix, hll_flux, roe_flux, roe_flux_fixed, HartenDelta};
pub use exact::{godunov_flux, godunov_flux_burgers, solve_swe_star, RiemannFluxQuery};
pub use physics::{PdeSystem, UnitNormal};
pub use state::{FluxVector, StateVector};
