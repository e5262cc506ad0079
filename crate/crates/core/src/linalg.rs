//! Dense 4×4 complex matrices for two-qubit operators.
//!
//! Entries of the Pauli products are exact in {0, ±1, ±i}; the only rounding
//! comes from the real-angle observables used by the singlet oracle.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 2×2 complex matrix (single-qubit operator).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix2(pub [[Complex64; 2]; 2]);

impl Matrix2 {
    pub const fn identity() -> Self {
        Matrix2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub const fn sigma_x() -> Self {
        Matrix2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub const fn sigma_y() -> Self {
        Matrix2([[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]])
    }

    pub const fn sigma_z() -> Self {
        Matrix2([[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]])
    }

    /// Spin observable along `(sin θ, 0, cos θ)`, i.e. a direction in the x–z plane.
    pub fn spin_xz(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let x = Self::sigma_x().0;
        let z = Self::sigma_z().0;
        let mut m = [[ZERO; 2]; 2];
        for r in 0..2 {
            for k in 0..2 {
                m[r][k] = x[r][k] * s + z[r][k] * c;
            }
        }
        Matrix2(m)
    }

    /// Kronecker product `self ⊗ rhs`; the first factor acts on the
    /// most significant qubit of the 4-dimensional basis index.
    pub fn kron(&self, rhs: &Matrix2) -> Matrix4 {
        let mut out = [[ZERO; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (k, cell) in row.iter_mut().enumerate() {
                *cell = self.0[r / 2][k / 2] * rhs.0[r % 2][k % 2];
            }
        }
        Matrix4(out)
    }
}

/// A dense 4×4 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix4(pub [[Complex64; 4]; 4]);

impl Matrix4 {
    pub const fn zero() -> Self {
        Matrix4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for d in 0..4 {
            m.0[d][d] = ONE;
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|c| *c *= s);
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for r in 0..4 {
            for k in 0..4 {
                m.0[r][k] = self.0[k][r].conj();
            }
        }
        m
    }

    /// `AB − BA`.
    pub fn commutator(&self, rhs: &Matrix4) -> Self {
        *self * *rhs - *rhs * *self
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_dev(&self, other: &Matrix4) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn apply(&self, v: &[Complex64; 4]) -> [Complex64; 4] {
        let mut out = [ZERO; 4];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|k| self.0[r][k] * v[k]).sum();
        }
        out
    }

    /// `⟨v| self |v⟩`.
    pub fn expectation(&self, v: &[Complex64; 4]) -> Complex64 {
        let w = self.apply(v);
        v.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum()
    }
}

impl Add for Matrix4 {
    type Output = Matrix4;
    fn add(mut self, rhs: Matrix4) -> Matrix4 {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a += b;
        }
        self
    }
}

impl Sub for Matrix4 {
    type Output = Matrix4;
    fn sub(mut self, rhs: Matrix4) -> Matrix4 {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a -= b;
        }
        self
    }
}

impl Neg for Matrix4 {
    type Output = Matrix4;
    fn neg(self) -> Matrix4 {
        self.scale(-ONE)
    }
}

impl Mul for Matrix4 {
    type Output = Matrix4;
    fn mul(self, rhs: Matrix4) -> Matrix4 {
        let mut out = Matrix4::zero();
        for r in 0..4 {
            for k in 0..4 {
                out.0[r][k] = (0..4).map(|j| self.0[r][j] * rhs.0[j][k]).sum();
            }
        }
        out
    }
}
