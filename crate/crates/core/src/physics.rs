//! PDE systems and their analytic flux structure.
//!
//! Covers the scalar Burgers equation in 1D/2D and the shallow water
//! equations in 1D/2D: inviscid fluxes, projected flux Jacobians with their
//! eigen-decomposition, the normal/tangential rotation used to reduce
//! multidimensional face fluxes to 1D problems, and wave-speed bounds for
//! CFL control.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::{FluxVector, SquareMatrix, StateVector};

/// Depths below this are treated as dry: velocities are defined as zero so
/// momentum/depth divisions cannot blow up.
pub const DRY_DEPTH: f64 = 1e-12;

const UNIT_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum PhysicsError {
    #[error("invalid state: depth h = {h} is negative")]
    NegativeDepth { h: f64 },
    #[error("dry state: depth h = {h} not strictly positive")]
    DryState { h: f64 },
    #[error("state has {got} components, {expected} expected")]
    WrongStateLength { got: usize, expected: usize },
    #[error("normal ({nx}, {ny}) is not unit length")]
    NotUnitNormal { nx: f64, ny: f64 },
}

/// Governing system of conservation laws.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum PdeSystem {
    /// u_t + (u^2/2)_x = (nu u_x)_x
    #[serde(rename = "burgers1d")]
    Burgers1D { viscosity: f64 },
    /// u_t + div(beta u^2/2) = 0, constant advection direction beta.
    #[serde(rename = "burgers2d")]
    Burgers2D { beta: [f64; 2], viscosity: f64 },
    /// (h, hu) with pressure term g h^2 / 2.
    #[serde(rename = "swe1d")]
    Swe1D { gravity: f64 },
    /// (h, hu, hv).
    #[serde(rename = "swe2d")]
    Swe2D { gravity: f64 },
}

impl PdeSystem {
    pub fn burgers_1d() -> Self {
        PdeSystem::Burgers1D { viscosity: 0.0 }
    }

    pub fn burgers_1d_viscous(viscosity: f64) -> Self {
        assert!(viscosity >= 0.0);
        PdeSystem::Burgers1D { viscosity }
    }

    pub fn burgers_2d(beta: [f64; 2]) -> Self {
        PdeSystem::Burgers2D { beta, viscosity: 0.0 }
    }

    pub fn swe_1d() -> Self {
        PdeSystem::Swe1D { gravity: 1.0 }
    }

    pub fn swe_2d() -> Self {
        PdeSystem::Swe2D { gravity: 1.0 }
    }

    /// Number of conserved variables m.
    pub fn state_dim(&self) -> usize {
        match self {
            PdeSystem::Burgers1D { .. } | PdeSystem::Burgers2D { .. } => 1,
            PdeSystem::Swe1D { .. } => 2,
            PdeSystem::Swe2D { .. } => 3,
        }
    }

    /// Spatial dimension d.
    pub fn spatial_dim(&self) -> usize {
        match self {
            PdeSystem::Burgers1D { .. } | PdeSystem::Swe1D { .. } => 1,
            PdeSystem::Burgers2D { .. } | PdeSystem::Swe2D { .. } => 2,
        }
    }

    pub fn gravity(&self) -> Option<f64> {
        match self {
            PdeSystem::Swe1D { gravity } | PdeSystem::Swe2D { gravity } => Some(*gravity),
            _ => None,
        }
    }

    pub fn viscosity(&self) -> f64 {
        match self {
            PdeSystem::Burgers1D { viscosity } | PdeSystem::Burgers2D { viscosity, .. } => {
                *viscosity
            }
            _ => 0.0,
        }
    }

    pub fn is_swe(&self) -> bool {
        matches!(self, PdeSystem::Swe1D { .. } | PdeSystem::Swe2D { .. })
    }

    /// The x-directed 1D system a 2D face flux reduces to.
    pub fn as_1d(&self) -> PdeSystem {
        match self {
            PdeSystem::Burgers2D { viscosity, .. } => PdeSystem::Burgers1D { viscosity: *viscosity },
            PdeSystem::Swe2D { gravity } => PdeSystem::Swe1D { gravity: *gravity },
            other => *other,
        }
    }

    pub fn validate_state(&self, u: &StateVector) -> Result<(), PhysicsError> {
        if u.len() != self.state_dim() {
            return Err(PhysicsError::WrongStateLength {
                got: u.len(),
                expected: self.state_dim(),
            });
        }
        if self.is_swe() && u[0] < 0.0 {
            return Err(PhysicsError::NegativeDepth { h: u[0] });
        }
        Ok(())
    }
}

/// Unit-length face normal. Stored as two components; 1D normals carry a
/// zero second component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitNormal {
    n: [f64; 2],
}

impl UnitNormal {
    pub const X_PLUS: UnitNormal = UnitNormal { n: [1.0, 0.0] };
    pub const X_MINUS: UnitNormal = UnitNormal { n: [-1.0, 0.0] };

    pub fn new(nx: f64, ny: f64) -> Result<Self, PhysicsError> {
        let norm = (nx * nx + ny * ny).sqrt();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(PhysicsError::NotUnitNormal { nx, ny });
        }
        Ok(UnitNormal { n: [nx, ny] })
    }

    /// Normalize an arbitrary nonzero direction.
    pub fn from_direction(dx: f64, dy: f64) -> Self {
        let norm = (dx * dx + dy * dy).sqrt();
        assert!(norm > 0.0, "cannot normalize the zero vector");
        UnitNormal { n: [dx / norm, dy / norm] }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.n[0]
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.n[1]
    }

    pub fn flipped(&self) -> UnitNormal {
        UnitNormal { n: [-self.n[0], -self.n[1]] }
    }

    /// Tangent rotated 90 degrees counter-clockwise from the normal.
    #[inline]
    pub fn tangent(&self) -> [f64; 2] {
        [-self.n[1], self.n[0]]
    }
}

/// Velocity of an SWE state, zero when the depth is dry.
#[inline]
pub fn swe_velocity(h: f64, momentum: f64) -> f64 {
    if h > DRY_DEPTH {
        momentum / h
    } else {
        0.0
    }
}

/// Inviscid flux F_I(U), one column per spatial direction.
#[derive(Clone, Copy, Debug)]
pub struct FluxColumns {
    cols: [StateVector; 2],
    d: usize,
}

impl FluxColumns {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn col(&self, j: usize) -> &StateVector {
        debug_assert!(j < self.d);
        &self.cols[j]
    }

    /// F_I(U) N.
    pub fn project(&self, n: &UnitNormal) -> FluxVector {
        if self.d == 1 {
            self.cols[0] * n.x()
        } else {
            self.cols[0] * n.x() + self.cols[1] * n.y()
        }
    }
}

/// F_I(U) for the given system. SWE momentum rows are zero at dry depths.
pub fn inviscid_flux(pde: &PdeSystem, u: &StateVector) -> Result<FluxColumns, PhysicsError> {
    pde.validate_state(u)?;
    match pde {
        PdeSystem::Burgers1D { .. } => Ok(FluxColumns {
            cols: [StateVector::scalar(0.5 * u[0] * u[0]), StateVector::zeros(1)],
            d: 1,
        }),
        PdeSystem::Burgers2D { beta, .. } => {
            let f = 0.5 * u[0] * u[0];
            Ok(FluxColumns {
                cols: [StateVector::scalar(f * beta[0]), StateVector::scalar(f * beta[1])],
                d: 2,
            })
        }
        PdeSystem::Swe1D { gravity } => {
            let (h, hu) = (u[0], u[1]);
            let vel = swe_velocity(h, hu);
            Ok(FluxColumns {
                cols: [
                    StateVector::pair(hu, hu * vel + 0.5 * gravity * h * h),
                    StateVector::zeros(2),
                ],
                d: 1,
            })
        }
        PdeSystem::Swe2D { gravity } => {
            let (h, hu, hv) = (u[0], u[1], u[2]);
            let (vx, vy) = (swe_velocity(h, hu), swe_velocity(h, hv));
            let p = 0.5 * gravity * h * h;
            Ok(FluxColumns {
                cols: [
                    StateVector::triple(hu, hu * vx + p, hv * vx),
                    StateVector::triple(hv, hu * vy, hv * vy + p),
                ],
                d: 2,
            })
        }
    }
}

/// F_I(U) N.
pub fn projected_flux(
    pde: &PdeSystem,
    u: &StateVector,
    n: &UnitNormal,
) -> Result<FluxVector, PhysicsError> {
    Ok(inviscid_flux(pde, u)?.project(n))
}

/// Jacobian of the projected inviscid flux together with its real
/// eigen-decomposition, eigenvalues sorted ascending.
#[derive(Clone, Copy, Debug)]
pub struct ProjectedJacobian {
    pub matrix: SquareMatrix,
    pub eigenvalues: StateVector,
    /// Columns are the right eigenvectors, ordered like `eigenvalues`.
    pub right_eigenvectors: SquareMatrix,
    /// Inverse of `right_eigenvectors`; rows are the left eigenvectors.
    pub left_eigenvectors: SquareMatrix,
}

impl ProjectedJacobian {
    /// |B| = R |Lambda| R^{-1}.
    pub fn abs_matrix(&self) -> SquareMatrix {
        let mut abs_eig = self.eigenvalues;
        for i in 0..abs_eig.len() {
            abs_eig[i] = abs_eig[i].abs();
        }
        self.right_eigenvectors
            .scale_columns(&abs_eig)
            .matmul(&self.left_eigenvectors)
    }

    /// As `abs_matrix` but with an arbitrary map applied to the eigenvalues
    /// (used for entropy fixes).
    pub fn abs_matrix_with(&self, f: impl Fn(f64) -> f64) -> SquareMatrix {
        let mut eig = self.eigenvalues;
        for i in 0..eig.len() {
            eig[i] = f(eig[i]);
        }
        self.right_eigenvectors.scale_columns(&eig).matmul(&self.left_eigenvectors)
    }
}

/// B(U, N) = d[F_I(U) N]/dU. SWE states must be wet.
pub fn projected_jacobian(
    pde: &PdeSystem,
    u: &StateVector,
    n: &UnitNormal,
) -> Result<ProjectedJacobian, PhysicsError> {
    pde.validate_state(u)?;
    match pde {
        PdeSystem::Burgers1D { .. } => Ok(scalar_jacobian(u[0] * n.x())),
        PdeSystem::Burgers2D { beta, .. } => {
            Ok(scalar_jacobian(u[0] * (beta[0] * n.x() + beta[1] * n.y())))
        }
        PdeSystem::Swe1D { gravity } => {
            let h = u[0];
            if h <= 0.0 {
                return Err(PhysicsError::DryState { h });
            }
            let vel = u[1] / h;
            let c = (gravity * h).sqrt();
            Ok(swe_1d_jacobian(vel, c, n.x()))
        }
        PdeSystem::Swe2D { gravity } => {
            let h = u[0];
            if h <= 0.0 {
                return Err(PhysicsError::DryState { h });
            }
            let (vx, vy) = (u[1] / h, u[2] / h);
            let c = (gravity * h).sqrt();
            Ok(swe_2d_jacobian(vx, vy, c, n))
        }
    }
}

fn scalar_jacobian(a: f64) -> ProjectedJacobian {
    let mut matrix = SquareMatrix::zeros(1);
    matrix.set(0, 0, a);
    ProjectedJacobian {
        matrix,
        eigenvalues: StateVector::scalar(a),
        right_eigenvectors: SquareMatrix::identity(1),
        left_eigenvectors: SquareMatrix::identity(1),
    }
}

/// 1D SWE Jacobian along a signed axis direction nx (+1 or -1), expressed at
/// velocity `vel` and celerity `c`.
pub(crate) fn swe_1d_jacobian(vel: f64, c: f64, nx: f64) -> ProjectedJacobian {
    let matrix = SquareMatrix::from_rows(&[
        &[0.0, nx],
        &[(c * c - vel * vel) * nx, 2.0 * vel * nx],
    ]);
    let (l1, l2) = ((vel - c) * nx, (vel + c) * nx);
    let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
    // eigenvector of eigenvalue lambda is (1, lambda/nx * ... ); for the
    // projected 1D system B = nx * A(vel, c), eigenvectors of A are reused.
    let (v_lo, v_hi) = if l1 <= l2 { (vel - c, vel + c) } else { (vel + c, vel - c) };
    let right = SquareMatrix::from_rows(&[&[1.0, 1.0], &[v_lo, v_hi]]);
    let left = right.inverse().expect("SWE eigenvector basis is nonsingular for c > 0");
    ProjectedJacobian {
        matrix,
        eigenvalues: StateVector::pair(lo, hi),
        right_eigenvectors: right,
        left_eigenvectors: left,
    }
}

fn swe_2d_jacobian(vx: f64, vy: f64, c: f64, n: &UnitNormal) -> ProjectedJacobian {
    let (nx, ny) = (n.x(), n.y());
    let un = vx * nx + vy * ny;
    let matrix = SquareMatrix::from_rows(&[
        &[0.0, nx, ny],
        &[(c * c - vx * vx) * nx - vx * vy * ny, 2.0 * vx * nx + vy * ny, vx * ny],
        &[-vx * vy * nx + (c * c - vy * vy) * ny, vy * nx, vx * nx + 2.0 * vy * ny],
    ]);
    // eigenvalues un - c < un < un + c with the shear wave in the middle
    let eigenvalues = StateVector::triple(un - c, un, un + c);
    let right = SquareMatrix::from_rows(&[
        &[1.0, 0.0, 1.0],
        &[vx - c * nx, -ny, vx + c * nx],
        &[vy - c * ny, nx, vy + c * ny],
    ]);
    let left = right.inverse().expect("SWE eigenvector basis is nonsingular for c > 0");
    ProjectedJacobian {
        matrix,
        eigenvalues,
        right_eigenvectors: right,
        left_eigenvectors: left,
    }
}

/// Rotate a state into face-aligned coordinates: SWE momenta become
/// (h u_n, h u_t) with t = (-N_y, N_x); scalar states are unchanged.
pub fn rotate_to_normal(pde: &PdeSystem, u: &StateVector, n: &UnitNormal) -> StateVector {
    match pde {
        PdeSystem::Swe2D { .. } => {
            let t = n.tangent();
            StateVector::triple(
                u[0],
                u[1] * n.x() + u[2] * n.y(),
                u[1] * t[0] + u[2] * t[1],
            )
        }
        _ => *u,
    }
}

/// Inverse of [`rotate_to_normal`].
pub fn rotate_back(pde: &PdeSystem, v: &StateVector, n: &UnitNormal) -> StateVector {
    match pde {
        PdeSystem::Swe2D { .. } => {
            let t = n.tangent();
            StateVector::triple(
                v[0],
                v[1] * n.x() + v[2] * t[0],
                v[1] * n.y() + v[2] * t[1],
            )
        }
        _ => *v,
    }
}

/// Largest characteristic speed of the state, for CFL control.
pub fn max_wave_speed(pde: &PdeSystem, u: &StateVector) -> f64 {
    match pde {
        PdeSystem::Burgers1D { .. } => u[0].abs(),
        PdeSystem::Burgers2D { beta, .. } => {
            u[0].abs() * (beta[0] * beta[0] + beta[1] * beta[1]).sqrt()
        }
        PdeSystem::Swe1D { gravity } => {
            let h = u[0].max(0.0);
            swe_velocity(h, u[1]).abs() + (gravity * h).sqrt()
        }
        PdeSystem::Swe2D { gravity } => {
            let h = u[0].max(0.0);
            let (vx, vy) = (swe_velocity(h, u[1]), swe_velocity(h, u[2]));
            (vx * vx + vy * vy).sqrt() + (gravity * h).sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn burgers_flux() {
        let pde = PdeSystem::burgers_1d();
        let f = inviscid_flux(&pde, &StateVector::scalar(2.0)).unwrap();
        assert_close(f.col(0)[0], 2.0, 0.0);
    }

    #[test]
    fn swe1d_rest_flux() {
        let pde = PdeSystem::swe_1d();
        let f = inviscid_flux(&pde, &StateVector::pair(1.0, 0.0)).unwrap();
        assert_close(f.col(0)[0], 0.0, 0.0);
        assert_close(f.col(0)[1], 0.5, 0.0);
    }

    #[test]
    fn swe2d_flux_columns() {
        let pde = PdeSystem::swe_2d();
        let f = inviscid_flux(&pde, &StateVector::triple(1.0, 1.0, 0.0)).unwrap();
        assert_eq!(f.col(0).as_slice(), &[1.0, 1.5, 0.0]);
        assert_eq!(f.col(1).as_slice(), &[0.0, 0.0, 0.5]);
    }

    #[test]
    fn negative_depth_rejected() {
        let pde = PdeSystem::swe_1d();
        assert!(matches!(
            inviscid_flux(&pde, &StateVector::pair(-0.1, 0.0)),
            Err(PhysicsError::NegativeDepth { .. })
        ));
    }

    #[test]
    fn dry_state_has_zero_flux() {
        let pde = PdeSystem::swe_1d();
        let f = inviscid_flux(&pde, &StateVector::pair(0.0, 0.0)).unwrap();
        assert_eq!(f.col(0).as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn projected_flux_examples() {
        let b1 = PdeSystem::burgers_1d();
        let f = projected_flux(&b1, &StateVector::scalar(2.0), &UnitNormal::X_PLUS).unwrap();
        assert_close(f[0], 2.0, 0.0);

        let b2 = PdeSystem::burgers_2d([1.0, 1.0]);
        let n = UnitNormal::new(0.0, 1.0).unwrap();
        let f = projected_flux(&b2, &StateVector::scalar(1.0), &n).unwrap();
        assert_close(f[0], 0.5, 1e-15);

        let s2 = PdeSystem::swe_2d();
        let f = projected_flux(&s2, &StateVector::triple(1.0, 0.0, 0.0), &n).unwrap();
        assert_eq!(f.as_slice(), &[0.0, 0.0, 0.5]);
    }

    #[test]
    fn jacobian_examples() {
        let b1 = PdeSystem::burgers_1d();
        let j = projected_jacobian(&b1, &StateVector::scalar(3.0), &UnitNormal::X_PLUS).unwrap();
        assert_close(j.matrix.get(0, 0), 3.0, 0.0);
        assert_close(j.eigenvalues[0], 3.0, 0.0);

        let s1 = PdeSystem::swe_1d();
        let j = projected_jacobian(&s1, &StateVector::pair(1.0, 0.0), &UnitNormal::X_PLUS).unwrap();
        assert_close(j.eigenvalues[0], -1.0, 1e-15);
        assert_close(j.eigenvalues[1], 1.0, 1e-15);
    }

    #[test]
    fn jacobian_rejects_dry_state() {
        let s1 = PdeSystem::swe_1d();
        assert!(matches!(
            projected_jacobian(&s1, &StateVector::pair(0.0, 0.0), &UnitNormal::X_PLUS),
            Err(PhysicsError::DryState { .. })
        ));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let eps = 1e-6;
        for _ in 0..200 {
            let (pde, u) = random_system_and_state(&mut rng);
            let n = random_normal(&mut rng, pde.spatial_dim());
            let jac = projected_jacobian(&pde, &u, &n).unwrap();
            let m = pde.state_dim();
            for k in 0..m {
                let mut up = u;
                let mut um = u;
                up[k] += eps;
                um[k] -= eps;
                let fp = projected_flux(&pde, &up, &n).unwrap();
                let fm = projected_flux(&pde, &um, &n).unwrap();
                for i in 0..m {
                    let fd = (fp[i] - fm[i]) / (2.0 * eps);
                    let scale = jac.matrix.get(i, k).abs().max(1.0);
                    assert!(
                        (jac.matrix.get(i, k) - fd).abs() <= 1e-6 * scale,
                        "entry ({i},{k}): analytic {} vs fd {fd}",
                        jac.matrix.get(i, k)
                    );
                }
            }
        }
    }

    #[test]
    fn eigen_decomposition_reconstructs_jacobian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let (pde, u) = random_system_and_state(&mut rng);
            let n = random_normal(&mut rng, pde.spatial_dim());
            let jac = projected_jacobian(&pde, &u, &n).unwrap();
            let rebuilt = jac
                .right_eigenvectors
                .scale_columns(&jac.eigenvalues)
                .matmul(&jac.left_eigenvectors);
            assert!(rebuilt.max_abs_diff(&jac.matrix) < 1e-10);
            let id = jac.right_eigenvectors.matmul(&jac.left_eigenvectors);
            assert!(id.max_abs_diff(&SquareMatrix::identity(jac.matrix.dim())) < 1e-10);
            for i in 1..jac.eigenvalues.len() {
                assert!(jac.eigenvalues[i - 1] <= jac.eigenvalues[i]);
            }
        }
    }

    #[test]
    fn rotation_identity_and_inverse() {
        let pde = PdeSystem::swe_2d();
        let u = StateVector::triple(1.0, 0.0, 1.0);
        let n = UnitNormal::new(0.0, 1.0).unwrap();
        let r = rotate_to_normal(&pde, &u, &n);
        assert_eq!(r.as_slice(), &[1.0, 1.0, 0.0]);

        let id = rotate_to_normal(&pde, &u, &UnitNormal::X_PLUS);
        assert_eq!(id, u);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let u = StateVector::triple(
                rng.gen_range(0.1..3.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let n = random_normal(&mut rng, 2);
            let back = rotate_back(&pde, &rotate_to_normal(&pde, &u, &n), &n);
            assert!(u.abs_diff_max(&back) < 1e-14);
        }
    }

    #[test]
    fn wave_speed_examples() {
        assert_close(
            max_wave_speed(&PdeSystem::burgers_1d(), &StateVector::scalar(-2.0)),
            2.0,
            0.0,
        );
        assert_close(
            max_wave_speed(&PdeSystem::swe_1d(), &StateVector::pair(1.0, 1.0)),
            2.0,
            1e-15,
        );
        assert_close(
            max_wave_speed(&PdeSystem::swe_1d(), &StateVector::pair(0.0, 0.0)),
            0.0,
            0.0,
        );
    }

    #[test]
    fn normal_constructor_validates_length() {
        assert!(UnitNormal::new(0.6, 0.8).is_ok());
        assert!(UnitNormal::new(1.0, 0.5).is_err());
        let n = UnitNormal::from_direction(3.0, 4.0);
        assert_close(n.x(), 0.6, 1e-15);
        assert_close(n.y(), 0.8, 1e-15);
    }

    fn random_normal(rng: &mut ChaCha8Rng, d: usize) -> UnitNormal {
        if d == 1 {
            if rng.gen_bool(0.5) {
                UnitNormal::X_PLUS
            } else {
                UnitNormal::X_MINUS
            }
        } else {
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            UnitNormal::from_direction(theta.cos(), theta.sin())
        }
    }

    fn random_system_and_state(rng: &mut ChaCha8Rng) -> (PdeSystem, StateVector) {
        match rng.gen_range(0..4) {
            0 => (PdeSystem::burgers_1d(), StateVector::scalar(rng.gen_range(-3.0..3.0))),
            1 => (
                PdeSystem::burgers_2d([rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)]),
                StateVector::scalar(rng.gen_range(-3.0..3.0)),
            ),
            2 => {
                let h = rng.gen_range(0.2..3.5);
                let u = rng.gen_range(-2.5..2.5);
                (PdeSystem::swe_1d(), StateVector::pair(h, h * u))
            }
            _ => {
                let h = rng.gen_range(0.2..3.5);
                let u = rng.gen_range(-2.5..2.5);
                let v = rng.gen_range(-2.5..2.5);
                (PdeSystem::swe_2d(), StateVector::triple(h, h * u, h * v))
            }
        }
    }
}
