//! Exact (Godunov) Riemann solvers.
//!
//! The Burgers flux has a closed form. The shallow water solver runs a
//! Newton iteration for the star depth, classifies the two waves, and can
//! sample the full self-similar solution, including dry beds. The Godunov
//! numerical flux is the physical flux of the solution sampled at s/tau = 0.
//!
//! Wave relations follow the standard depth-function formulation: across a
//! wave connecting to side state (h_K, u_K),
//!   f_K(h) = 2 (sqrt(g h) - sqrt(g h_K))                   for h <= h_K,
//!   f_K(h) = (h - h_K) sqrt(g (h + h_K) / (2 h h_K))       for h >  h_K,
//! and the star depth solves f_L(h) + f_R(h) + (u_R - u_L) = 0.

use thiserror::Error;

use crate::physics::{self, PdeSystem, PhysicsError, UnitNormal, DRY_DEPTH};
use crate::state::{FluxVector, StateVector};

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: u32 = 100;

#[derive(Debug, Error)]
pub enum RiemannError {
    #[error("negative input depth ({h_left}, {h_right})")]
    NegativeInput { h_left: f64, h_right: f64 },
    #[error("star-depth Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: u32, residual: f64 },
    #[error("star state inconsistent with left/right data")]
    InconsistentStar,
    #[error("unsupported system for a 1D Riemann solve: {0:?}")]
    UnsupportedPde(PdeSystem),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
}

/// One side of the Riemann fan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WaveKind {
    Shock,
    Rarefaction,
}

/// Star region of the SWE Riemann problem.
#[derive(Clone, Copy, Debug)]
pub struct SweStarState {
    pub h_star: f64,
    pub u_star: f64,
    pub left_wave: WaveKind,
    pub right_wave: WaveKind,
    /// True when the star region is dry (generated by diverging velocities
    /// or by a dry input side).
    pub dry: bool,
    pub newton_iterations: u32,
}

/// Riemann flux query: `u_plus` is the interior trace occupying s < 0,
/// `u_minus` the exterior trace occupying s >= 0.
#[derive(Clone, Copy, Debug)]
pub struct RiemannFluxQuery {
    pub pde: PdeSystem,
    pub u_plus: StateVector,
    pub u_minus: StateVector,
}

impl RiemannFluxQuery {
    pub fn new(
        pde: PdeSystem,
        u_plus: StateVector,
        u_minus: StateVector,
    ) -> Result<Self, RiemannError> {
        pde.validate_state(&u_plus)?;
        pde.validate_state(&u_minus)?;
        Ok(Self { pde, u_plus, u_minus })
    }
}

/// Godunov flux of the 1D Burgers equation, f(u) = u^2 / 2.
///
/// Equivalent to sampling the exact similarity solution at s/tau = 0:
/// a shock of speed (u_plus + u_minus)/2 when u_plus > u_minus, otherwise a
/// rarefaction whose sonic-point flux vanishes when u_plus < 0 < u_minus.
pub fn godunov_flux_burgers(u_plus: f64, u_minus: f64) -> f64 {
    let f = |u: f64| 0.5 * u * u;
    f(u_plus.max(0.0)).max(f(u_minus.min(0.0)))
}

fn wave_function(h: f64, h_k: f64, g: f64) -> f64 {
    if h <= h_k {
        2.0 * ((g * h).sqrt() - (g * h_k).sqrt())
    } else {
        (h - h_k) * (0.5 * g * (h + h_k) / (h * h_k)).sqrt()
    }
}

fn wave_function_deriv(h: f64, h_k: f64, g: f64) -> f64 {
    if h <= h_k {
        (g / h).sqrt()
    } else {
        let gk = (0.5 * g * (h + h_k) / (h * h_k)).sqrt();
        gk - 0.25 * g * (h - h_k) / (h * h * gk)
    }
}

/// Solve for the SWE star state between (h_left, u_left) and
/// (h_right, u_right).
pub fn solve_swe_star(
    h_left: f64,
    u_left: f64,
    h_right: f64,
    u_right: f64,
    g: f64,
) -> Result<SweStarState, RiemannError> {
    assert!(g > 0.0, "gravity must be positive");
    if h_left < 0.0 || h_right < 0.0 {
        return Err(RiemannError::NegativeInput { h_left, h_right });
    }
    let c_left = (g * h_left).sqrt();
    let c_right = (g * h_right).sqrt();

    // A dry input side, or velocities diverging faster than the rarefaction
    // tails can fill, leaves a dry star region bounded by rarefactions.
    let dry_input = h_left <= DRY_DEPTH || h_right <= DRY_DEPTH;
    let dry_generated = u_right - u_left >= 2.0 * (c_left + c_right);
    if dry_input || dry_generated {
        return Ok(SweStarState {
            h_star: 0.0,
            u_star: 0.0,
            left_wave: WaveKind::Rarefaction,
            right_wave: WaveKind::Rarefaction,
            dry: true,
            newton_iterations: 0,
        });
    }

    // Two-rarefaction initial guess: exact when both waves are rarefactions,
    // and always positive.
    let c_guess = 0.5 * (c_left + c_right) + 0.25 * (u_left - u_right);
    let mut h = (c_guess * c_guess / g).max(1e-12);
    let phi = |h: f64| wave_function(h, h_left, g) + wave_function(h, h_right, g) + u_right - u_left;

    let mut iterations = 0;
    let mut residual = phi(h);
    loop {
        if residual.abs() < NEWTON_TOL {
            break;
        }
        if iterations >= NEWTON_MAX_ITER {
            return Err(RiemannError::NonConvergence { iterations, residual });
        }
        let slope = wave_function_deriv(h, h_left, g) + wave_function_deriv(h, h_right, g);
        let mut step = residual / slope;
        // keep iterates strictly positive
        while h - step <= 0.0 {
            step *= 0.5;
        }
        let h_next = h - step;
        iterations += 1;
        let small_update = (h_next - h).abs() < NEWTON_TOL * h_next.max(1.0);
        h = h_next;
        residual = phi(h);
        if small_update {
            break;
        }
    }
    if residual.abs() > 1e-10 {
        return Err(RiemannError::NonConvergence { iterations, residual });
    }

    let u_star = 0.5 * (u_left + u_right)
        + 0.5 * (wave_function(h, h_right, g) - wave_function(h, h_left, g));
    Ok(SweStarState {
        h_star: h,
        u_star,
        left_wave: if h > h_left { WaveKind::Shock } else { WaveKind::Rarefaction },
        right_wave: if h > h_right { WaveKind::Shock } else { WaveKind::Rarefaction },
        dry: false,
        newton_iterations: iterations,
    })
}

/// Sample the SWE Riemann solution at similarity coordinate `xi = s / tau`.
///
/// `star` must have been produced by [`solve_swe_star`] on the same data.
/// Returns the conserved state (h, hu).
pub fn sample_swe_solution(
    star: &SweStarState,
    h_left: f64,
    u_left: f64,
    h_right: f64,
    u_right: f64,
    g: f64,
    xi: f64,
) -> Result<StateVector, RiemannError> {
    if h_left < 0.0 || h_right < 0.0 {
        return Err(RiemannError::NegativeInput { h_left, h_right });
    }
    let c_left = (g * h_left).sqrt();
    let c_right = (g * h_right).sqrt();
    let conserved = |h: f64, u: f64| StateVector::pair(h, h * u);

    if star.dry {
        let wet_left = h_left > DRY_DEPTH;
        let wet_right = h_right > DRY_DEPTH;
        if !wet_left && !wet_right {
            return Ok(conserved(0.0, 0.0));
        }
        // Left fan (present if the left side is wet): head u_L - c_L,
        // dry front u_L + 2 c_L.
        if wet_left {
            if xi <= u_left - c_left {
                return Ok(conserved(h_left, u_left));
            }
            if xi < u_left + 2.0 * c_left {
                let c = (u_left + 2.0 * c_left - xi) / 3.0;
                return Ok(conserved(c * c / g, xi + c));
            }
        }
        // Right fan: head u_R + c_R, dry front u_R - 2 c_R.
        if wet_right {
            if xi >= u_right + c_right {
                return Ok(conserved(h_right, u_right));
            }
            if xi > u_right - 2.0 * c_right {
                let c = (xi - u_right + 2.0 * c_right) / 3.0;
                return Ok(conserved(c * c / g, xi - c));
            }
        }
        return Ok(conserved(0.0, 0.0));
    }

    let (h_star, u_star) = (star.h_star, star.u_star);
    if h_star < 0.0 {
        return Err(RiemannError::InconsistentStar);
    }
    let c_star = (g * h_star).sqrt();

    if xi <= u_star {
        // left side of the contact line
        match star.left_wave {
            WaveKind::Shock => {
                if h_star <= h_left {
                    return Err(RiemannError::InconsistentStar);
                }
                let q = (0.5 * (h_star + h_left) * h_star / (h_left * h_left)).sqrt();
                let speed = u_left - c_left * q;
                if xi <= speed {
                    Ok(conserved(h_left, u_left))
                } else {
                    Ok(conserved(h_star, u_star))
                }
            }
            WaveKind::Rarefaction => {
                let head = u_left - c_left;
                let tail = u_star - c_star;
                if xi <= head {
                    Ok(conserved(h_left, u_left))
                } else if xi >= tail {
                    Ok(conserved(h_star, u_star))
                } else {
                    let c = (u_left + 2.0 * c_left - xi) / 3.0;
                    Ok(conserved(c * c / g, xi + c))
                }
            }
        }
    } else {
        match star.right_wave {
            WaveKind::Shock => {
                if h_star <= h_right {
                    return Err(RiemannError::InconsistentStar);
                }
                let q = (0.5 * (h_star + h_right) * h_star / (h_right * h_right)).sqrt();
                let speed = u_right + c_right * q;
                if xi >= speed {
                    Ok(conserved(h_right, u_right))
                } else {
                    Ok(conserved(h_star, u_star))
                }
            }
            WaveKind::Rarefaction => {
                let head = u_right + c_right;
                let tail = u_star + c_star;
                if xi >= head {
                    Ok(conserved(h_right, u_right))
                } else if xi <= tail {
                    Ok(conserved(h_star, u_star))
                } else {
                    let c = (xi - u_right + 2.0 * c_right) / 3.0;
                    Ok(conserved(c * c / g, xi - c))
                }
            }
        }
    }
}

/// Godunov numerical flux for a 1D system (Burgers or SWE).
pub fn godunov_flux(q: &RiemannFluxQuery) -> Result<FluxVector, RiemannError> {
    match q.pde {
        PdeSystem::Burgers1D { .. } => Ok(StateVector::scalar(godunov_flux_burgers(
            q.u_plus[0],
            q.u_minus[0],
        ))),
        PdeSystem::Swe1D { gravity } => {
            let (h_l, h_r) = (q.u_plus[0], q.u_minus[0]);
            let u_l = physics::swe_velocity(h_l, q.u_plus[1]);
            let u_r = physics::swe_velocity(h_r, q.u_minus[1]);
            let star = solve_swe_star(h_l, u_l, h_r, u_r, gravity)?;
            let at_zero = sample_swe_solution(&star, h_l, u_l, h_r, u_r, gravity, 0.0)?;
            if at_zero[0] <= DRY_DEPTH {
                // dry-region flux is the zero vector
                return Ok(StateVector::zeros(2));
            }
            Ok(physics::projected_flux(&q.pde, &at_zero, &UnitNormal::X_PLUS)?)
        }
        other => Err(RiemannError::UnsupportedPde(other)),
    }
}
