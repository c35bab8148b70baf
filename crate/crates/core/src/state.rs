//! Small fixed-capacity vectors and matrices for conserved states and fluxes.
//!
//! Every system handled here has at most three conserved variables, so the
//! containers are stack-allocated and `Copy`.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// Maximum number of conserved variables (h, hu, hv).
pub const MAX_COMPONENTS: usize = 3;

/// Vector of conserved variables U (also used for numerical fluxes, which
/// have the same length m).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector {
    data: [f64; MAX_COMPONENTS],
    len: usize,
}

/// A numerical flux has the same shape as a state.
pub type FluxVector = StateVector;

impl StateVector {
    pub fn scalar(u: f64) -> Self {
        Self { data: [u, 0.0, 0.0], len: 1 }
    }

    pub fn pair(a: f64, b: f64) -> Self {
        Self { data: [a, b, 0.0], len: 2 }
    }

    pub fn triple(a: f64, b: f64, c: f64) -> Self {
        Self { data: [a, b, c], len: 3 }
    }

    pub fn zeros(len: usize) -> Self {
        assert!(len >= 1 && len <= MAX_COMPONENTS, "state length {len} out of range");
        Self { data: [0.0; MAX_COMPONENTS], len }
    }

    pub fn from_slice(vals: &[f64]) -> Self {
        let mut v = Self::zeros(vals.len());
        v.data[..vals.len()].copy_from_slice(vals);
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data[..self.len]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.as_slice().iter()
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|v| v.is_finite())
    }

    pub fn abs_diff_max(&self, other: &Self) -> f64 {
        assert_eq!(self.len, other.len);
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for StateVector {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        debug_assert!(i < self.len);
        &self.data[i]
    }
}

impl IndexMut<usize> for StateVector {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        debug_assert!(i < self.len);
        &mut self.data[i]
    }
}

impl Add for StateVector {
    type Output = StateVector;
    fn add(self, rhs: StateVector) -> StateVector {
        debug_assert_eq!(self.len, rhs.len);
        let mut out = self;
        for i in 0..self.len {
            out.data[i] += rhs.data[i];
        }
        out
    }
}

impl Sub for StateVector {
    type Output = StateVector;
    fn sub(self, rhs: StateVector) -> StateVector {
        debug_assert_eq!(self.len, rhs.len);
        let mut out = self;
        for i in 0..self.len {
            out.data[i] -= rhs.data[i];
        }
        out
    }
}

impl Mul<f64> for StateVector {
    type Output = StateVector;
    fn mul(self, s: f64) -> StateVector {
        let mut out = self;
        for i in 0..self.len {
            out.data[i] *= s;
        }
        out
    }
}

impl Neg for StateVector {
    type Output = StateVector;
    fn neg(self) -> StateVector {
        self * -1.0
    }
}

/// Square m-by-m matrix, m <= 3. Used for flux Jacobians and eigenvector
/// matrices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquareMatrix {
    data: [[f64; MAX_COMPONENTS]; MAX_COMPONENTS],
    m: usize,
}

impl SquareMatrix {
    pub fn zeros(m: usize) -> Self {
        assert!(m >= 1 && m <= MAX_COMPONENTS);
        Self { data: [[0.0; MAX_COMPONENTS]; MAX_COMPONENTS], m }
    }

    pub fn identity(m: usize) -> Self {
        let mut a = Self::zeros(m);
        for i in 0..m {
            a.data[i][i] = 1.0;
        }
        a
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let m = rows.len();
        let mut a = Self::zeros(m);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), m);
            a.data[i][..m].copy_from_slice(row);
        }
        a
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.m && j < self.m);
        self.data[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.m && j < self.m);
        self.data[i][j] = v;
    }

    pub fn matvec(&self, v: &StateVector) -> StateVector {
        debug_assert_eq!(self.m, v.len());
        let mut out = StateVector::zeros(self.m);
        for i in 0..self.m {
            let mut s = 0.0;
            for j in 0..self.m {
                s += self.data[i][j] * v[j];
            }
            out[i] = s;
        }
        out
    }

    pub fn matmul(&self, rhs: &SquareMatrix) -> SquareMatrix {
        debug_assert_eq!(self.m, rhs.m);
        let mut out = SquareMatrix::zeros(self.m);
        for i in 0..self.m {
            for j in 0..self.m {
                let mut s = 0.0;
                for k in 0..self.m {
                    s += self.data[i][k] * rhs.data[k][j];
                }
                out.data[i][j] = s;
            }
        }
        out
    }

    /// Scale column j by s; columns hold eigenvectors, so this applies a
    /// diagonal matrix from the right.
    pub fn scale_columns(&self, diag: &StateVector) -> SquareMatrix {
        debug_assert_eq!(self.m, diag.len());
        let mut out = *self;
        for i in 0..self.m {
            for j in 0..self.m {
                out.data[i][j] *= diag[j];
            }
        }
        out
    }

    pub fn determinant(&self) -> f64 {
        let a = &self.data;
        match self.m {
            1 => a[0][0],
            2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
            3 => {
                a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                    - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                    + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
            }
            _ => unreachable!(),
        }
    }

    /// Inverse via the adjugate; only valid for well-conditioned small
    /// matrices, which is all we ever invert (eigenvector bases).
    pub fn inverse(&self) -> Option<SquareMatrix> {
        let det = self.determinant();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let a = &self.data;
        let mut inv = SquareMatrix::zeros(self.m);
        match self.m {
            1 => inv.data[0][0] = 1.0 / det,
            2 => {
                inv.data[0][0] = a[1][1] / det;
                inv.data[0][1] = -a[0][1] / det;
                inv.data[1][0] = -a[1][0] / det;
                inv.data[1][1] = a[0][0] / det;
            }
            3 => {
                for i in 0..3 {
                    for j in 0..3 {
                        let (r0, r1) = match i {
                            0 => (1, 2),
                            1 => (0, 2),
                            _ => (0, 1),
                        };
                        let (c0, c1) = match j {
                            0 => (1, 2),
                            1 => (0, 2),
                            _ => (0, 1),
                        };
                        let minor = a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
                        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                        // adjugate transposes the cofactor matrix
                        inv.data[j][i] = sign * minor / det;
                    }
                }
            }
            _ => unreachable!(),
        }
        Some(inv)
    }

    pub fn max_abs_diff(&self, other: &SquareMatrix) -> f64 {
        debug_assert_eq!(self.m, other.m);
        let mut d = 0.0f64;
        for i in 0..self.m {
            for j in 0..self.m {
                d = d.max((self.data[i][j] - other.data[i][j]).abs());
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_arithmetic() {
        let a = StateVector::pair(1.0, 2.0);
        let b = StateVector::pair(0.5, -1.0);
        assert_eq!(a + b, StateVector::pair(1.5, 1.0));
        assert_eq!(a - b, StateVector::pair(0.5, 3.0));
        assert_eq!(a * 2.0, StateVector::pair(2.0, 4.0));
    }

    #[test]
    fn inverse_roundtrip_3x3() {
        let a = SquareMatrix::from_rows(&[
            &[2.0, 1.0, 0.5],
            &[-1.0, 3.0, 1.0],
            &[0.0, 0.25, 4.0],
        ]);
        let inv = a.inverse().unwrap();
        let id = a.matmul(&inv);
        assert!(id.max_abs_diff(&SquareMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn inverse_roundtrip_2x2() {
        let a = SquareMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let inv = a.inverse().unwrap();
        assert!(a.matmul(&inv).max_abs_diff(&SquareMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let a = SquareMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(a.inverse().is_none());
    }
}
