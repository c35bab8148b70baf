//! Approximate Riemann solvers: Roe, Roe with the Harten entropy fix, and
//! HLL with Einfeldt wave-speed estimates.
//!
//! These serve both as baselines against the exact solver and as the
//! low-fidelity flux inside the bi-fidelity surrogate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::RiemannFluxQuery;
use crate::physics::{self, PdeSystem, PhysicsError, UnitNormal};
use crate::state::FluxVector;

#[derive(Debug, Error)]
pub enum ApproxError {
    #[error("Roe average undefined at dry state (h_plus = {h_plus}, h_minus = {h_minus})")]
    DryState { h_plus: f64, h_minus: f64 },
    #[error("unsupported system for a 1D approximate solve: {0:?}")]
    UnsupportedPde(PdeSystem),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
}

/// Roe-averaged SWE quantities.
#[derive(Clone, Copy, Debug)]
pub struct RoeAverageSwe {
    /// Arithmetic-mean depth entering the averaged celerity.
    pub h_tilde: f64,
    /// sqrt(h)-weighted velocity.
    pub u_tilde: f64,
    pub c_tilde: f64,
}

/// Einfeldt-type bounds on the Riemann fan. `s_plus` is the slow (left)
/// wave attached to the U+ side, `s_minus` the fast (right) wave attached
/// to the U- side; `s_plus <= s_minus` always.
#[derive(Clone, Copy, Debug)]
pub struct WaveSpeedPair {
    pub s_plus: f64,
    pub s_minus: f64,
}

/// Choice of smoothing width for the Harten entropy fix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HartenDelta {
    /// delta = factor * c_tilde for SWE, factor * max(|u+|, |u-|, 1e-8)
    /// for Burgers.
    ScaleAware { factor: f64 },
    Fixed { delta: f64 },
}

impl Default for HartenDelta {
    fn default() -> Self {
        HartenDelta::ScaleAware { factor: 0.1 }
    }
}

/// Roe average for the 1D SWE; requires wet states on both sides.
pub fn roe_average_swe(
    h_plus: f64,
    u_plus: f64,
    h_minus: f64,
    u_minus: f64,
    g: f64,
) -> Result<RoeAverageSwe, ApproxError> {
    if h_plus <= 0.0 || h_minus <= 0.0 {
        return Err(ApproxError::DryState { h_plus, h_minus });
    }
    let (sp, sm) = (h_plus.sqrt(), h_minus.sqrt());
    let h_tilde = 0.5 * (h_plus + h_minus);
    Ok(RoeAverageSwe {
        h_tilde,
        u_tilde: (sp * u_plus + sm * u_minus) / (sp + sm),
        c_tilde: (g * h_tilde).sqrt(),
    })
}

/// |lambda| smoothed near zero: |lambda| when |lambda| >= delta, otherwise
/// (lambda^2 + delta^2) / (2 delta).
pub fn harten_fix(lambda: f64, delta: f64) -> f64 {
    debug_assert!(delta > 0.0);
    let a = lambda.abs();
    if a >= delta {
        a
    } else {
        (lambda * lambda + delta * delta) / (2.0 * delta)
    }
}

fn roe_flux_impl(
    q: &RiemannFluxQuery,
    eig_map: impl Fn(f64, f64) -> f64,
) -> Result<FluxVector, ApproxError> {
    let n = UnitNormal::X_PLUS;
    let f_plus = physics::projected_flux(&q.pde, &q.u_plus, &n)?;
    let f_minus = physics::projected_flux(&q.pde, &q.u_minus, &n)?;
    let jump = q.u_minus - q.u_plus;

    match q.pde {
        PdeSystem::Burgers1D { .. } => {
            let a = 0.5 * (q.u_plus[0] + q.u_minus[0]);
            let scale = q.u_plus[0].abs().max(q.u_minus[0].abs()).max(1e-8);
            let a_abs = eig_map(a, scale);
            Ok((f_plus + f_minus) * 0.5 - jump * (0.5 * a_abs))
        }
        PdeSystem::Swe1D { gravity } => {
            let (h_p, h_m) = (q.u_plus[0], q.u_minus[0]);
            if h_p <= 0.0 || h_m <= 0.0 {
                return Err(ApproxError::DryState { h_plus: h_p, h_minus: h_m });
            }
            let avg = roe_average_swe(h_p, q.u_plus[1] / h_p, h_m, q.u_minus[1] / h_m, gravity)?;
            let jac = physics::swe_1d_jacobian(avg.u_tilde, avg.c_tilde, 1.0);
            let abs_b = jac.abs_matrix_with(|l| eig_map(l, avg.c_tilde));
            Ok((f_plus + f_minus) * 0.5 - abs_b.matvec(&jump) * 0.5)
        }
        other => Err(ApproxError::UnsupportedPde(other)),
    }
}

/// Roe flux: 1/2 [F(U+) + F(U-)] - 1/2 |B~| (U- - U+), with the projected
/// Jacobian evaluated at the Roe average.
pub fn roe_flux(q: &RiemannFluxQuery) -> Result<FluxVector, ApproxError> {
    roe_flux_impl(q, |lambda, _scale| lambda.abs())
}

/// Roe flux with each |lambda| replaced by the Harten-smoothed value.
pub fn roe_flux_fixed(
    q: &RiemannFluxQuery,
    delta_policy: HartenDelta,
) -> Result<FluxVector, ApproxError> {
    roe_flux_impl(q, move |lambda, scale| {
        let delta = match delta_policy {
            HartenDelta::ScaleAware { factor } => factor * scale,
            HartenDelta::Fixed { delta } => delta,
        };
        if delta > 0.0 {
            harten_fix(lambda, delta)
        } else {
            lambda.abs()
        }
    })
}

/// Einfeldt wave-speed estimates. Dry SWE sides use the dry-front
/// characteristic speed of the wet side.
pub fn einfeldt_speeds(q: &RiemannFluxQuery) -> Result<WaveSpeedPair, ApproxError> {
    match q.pde {
        PdeSystem::Burgers1D { .. } => {
            let (up, um) = (q.u_plus[0], q.u_minus[0]);
            let a = 0.5 * (up + um);
            Ok(WaveSpeedPair { s_plus: up.min(a), s_minus: um.max(a) })
        }
        PdeSystem::Swe1D { gravity } => {
            let (h_p, h_m) = (q.u_plus[0].max(0.0), q.u_minus[0].max(0.0));
            let u_p = physics::swe_velocity(h_p, q.u_plus[1]);
            let u_m = physics::swe_velocity(h_m, q.u_minus[1]);
            let c_p = (gravity * h_p).sqrt();
            let c_m = (gravity * h_m).sqrt();
            let wet_p = h_p > physics::DRY_DEPTH;
            let wet_m = h_m > physics::DRY_DEPTH;
            if !wet_p && !wet_m {
                return Ok(WaveSpeedPair { s_plus: 0.0, s_minus: 0.0 });
            }
            let (s_plus, s_minus) = if wet_p && wet_m {
                let avg =
                    roe_average_swe(h_p, u_p, h_m, u_m, gravity).expect("both sides wet");
                (
                    (u_p - c_p).min(avg.u_tilde - avg.c_tilde),
                    (u_m + c_m).max(avg.u_tilde + avg.c_tilde),
                )
            } else if wet_p {
                // dry right: the right-going front is the rarefaction tail
                (u_p - c_p, u_p + 2.0 * c_p)
            } else {
                (u_m - 2.0 * c_m, u_m + c_m)
            };
            Ok(WaveSpeedPair { s_plus: s_plus.min(s_minus), s_minus: s_minus.max(s_plus) })
        }
        other => Err(ApproxError::UnsupportedPde(other)),
    }
}

/// HLL flux with Einfeldt speeds: upwind outside the fan, the two-wave
/// average inside.
pub fn hll_flux(q: &RiemannFluxQuery) -> Result<FluxVector, ApproxError> {
    let speeds = einfeldt_speeds(q)?;
    let n = UnitNormal::X_PLUS;
    let f_plus = physics::projected_flux(&q.pde, &q.u_plus, &n)?;
    let f_minus = physics::projected_flux(&q.pde, &q.u_minus, &n)?;
    let (sp, sm) = (speeds.s_plus, speeds.s_minus);
    if sm - sp <= 0.0 {
        // degenerate fan: pure upwinding on the common speed
        return Ok(if sp >= 0.0 { f_plus } else { f_minus });
    }
    if sp >= 0.0 {
        Ok(f_plus)
    } else if sm <= 0.0 {
        Ok(f_minus)
    } else {
        let jump = q.u_minus - q.u_plus;
        Ok((f_plus * sm - f_minus * sp + jump * (sp * sm)) * (1.0 / (sm - sp)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::godunov_flux;
    use crate::state::StateVector;

    fn burgers_query(up: f64, um: f64) -> RiemannFluxQuery {
        RiemannFluxQuery::new(
            PdeSystem::burgers_1d(),
            StateVector::scalar(up),
            StateVector::scalar(um),
        )
        .unwrap()
    }

    fn swe_query(h_p: f64, u_p: f64, h_m: f64, u_m: f64) -> RiemannFluxQuery {
        RiemannFluxQuery::new(
            PdeSystem::swe_1d(),
            StateVector::pair(h_p, h_p * u_p),
            StateVector::pair(h_m, h_m * u_m),
        )
        .unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn roe_burgers_consistency_and_entropy_violation() {
        assert_close(roe_flux(&burgers_query(1.0, 1.0)).unwrap()[0], 0.5, 1e-15);
        // transonic rarefaction: Roe keeps the mean flux, Godunov gives 0
        assert_close(roe_flux(&burgers_query(-1.0, 1.0)).unwrap()[0], 0.5, 1e-15);
        assert_close(
            godunov_flux(&burgers_query(-1.0, 1.0)).unwrap()[0],
            0.0,
            0.0,
        );
    }

    #[test]
    fn roe_swe_symmetric_expansion() {
        let f = roe_flux(&swe_query(1.0, -1.0, 1.0, 1.0)).unwrap();
        assert_close(f[0], 0.0, 1e-14);
        assert_close(f[1], 0.5, 1e-14);
    }

    #[test]
    fn roe_rejects_dry_state() {
        let q = RiemannFluxQuery::new(
            PdeSystem::swe_1d(),
            StateVector::pair(0.0, 0.0),
            StateVector::pair(1.0, 0.0),
        )
        .unwrap();
        assert!(matches!(roe_flux(&q), Err(ApproxError::DryState { .. })));
    }

    #[test]
    fn harten_fix_values() {
        assert_close(harten_fix(2.0, 0.1), 2.0, 0.0);
        assert_close(harten_fix(0.0, 0.1), 0.05, 1e-16);
        assert_close(harten_fix(-0.1, 0.1), 0.1, 1e-16);
    }

    #[test]
    fn roe_fixed_examples() {
        assert_close(
            roe_flux_fixed(&burgers_query(1.0, 1.0), HartenDelta::default()).unwrap()[0],
            0.5,
            1e-15,
        );
        let f = roe_flux_fixed(&burgers_query(-1.0, 1.0), HartenDelta::Fixed { delta: 0.5 })
            .unwrap();
        assert_close(f[0], 0.25, 1e-15);
        let f = roe_flux_fixed(&swe_query(1.0, 0.0, 1.0, 0.0), HartenDelta::default()).unwrap();
        assert_close(f[0], 0.0, 1e-14);
        assert_close(f[1], 0.5, 1e-14);
    }

    #[test]
    fn einfeldt_examples() {
        let s = einfeldt_speeds(&burgers_query(-1.0, 1.0)).unwrap();
        assert_close(s.s_plus, -1.0, 0.0);
        assert_close(s.s_minus, 1.0, 0.0);

        let s = einfeldt_speeds(&swe_query(1.0, 0.0, 1.0, 0.0)).unwrap();
        assert_close(s.s_plus, -1.0, 1e-14);
        assert_close(s.s_minus, 1.0, 1e-14);

        let s = einfeldt_speeds(&burgers_query(2.0, 2.0)).unwrap();
        assert_close(s.s_plus, 2.0, 0.0);
        assert_close(s.s_minus, 2.0, 0.0);
    }

    #[test]
    fn hll_examples() {
        assert_close(hll_flux(&burgers_query(1.0, 1.0)).unwrap()[0], 0.5, 1e-15);
        assert_close(hll_flux(&burgers_query(-1.0, 1.0)).unwrap()[0], -0.5, 1e-15);
        let f = hll_flux(&swe_query(1.0, 0.0, 1.0, 0.0)).unwrap();
        assert_close(f[0], 0.0, 1e-14);
        assert_close(f[1], 0.5, 1e-14);
    }

    #[test]
    fn hll_handles_dry_side() {
        let q = RiemannFluxQuery::new(
            PdeSystem::swe_1d(),
            StateVector::pair(0.0, 0.0),
            StateVector::pair(1.0, 0.0),
        )
        .unwrap();
        let f = hll_flux(&q).unwrap();
        assert!(f.is_finite());
    }

    #[test]
    fn roe_average_bounds() {
        let avg = roe_average_swe(2.0, -1.0, 0.5, 1.0, 1.0).unwrap();
        assert!(avg.u_tilde >= -1.0 && avg.u_tilde <= 1.0);
        assert_close(avg.c_tilde, (0.5 * 2.5f64).sqrt(), 1e-14);
    }
}
