//! Dense square complex matrices for small Hilbert spaces (dim ≤ 9).

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::real::Real;

/// Dense square complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::one();
        }
        m
    }

    /// Builds a matrix entry by entry from `f(row, col)`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from nested rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Self {
        let dim = rows.len();
        assert!(
            rows.iter().all(|r| r.len() == dim),
            "rows must form a square matrix"
        );
        Self::from_fn(dim, |i, j| rows[i][j])
    }

    /// |j⟩⟨k| on a `dim`-dimensional space.
    pub fn ketbra(dim: usize, j: usize, k: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(j, k)] = Complex::one();
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn set_zero(&mut self) {
        for z in &mut self.data {
            *z = Complex::zero();
        }
    }

    pub fn copy_from(&mut self, other: &Self) {
        assert_eq!(self.dim, other.dim);
        self.data.copy_from_slice(&other.data);
    }

    /// `out = self * rhs`, reusing the output buffer.
    pub fn mul_into(&self, rhs: &Self, out: &mut Self) {
        let n = self.dim;
        assert_eq!(n, rhs.dim);
        assert_eq!(n, out.dim);
        out.set_zero();
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re.is_zero() && a.im.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * *b;
                }
            }
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.dim);
        self.mul_into(rhs, &mut out);
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| self.data[j * n + i].conj())
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| self.data[j * n + i])
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        let mut out = self.clone();
        for z in &mut out.data {
            *z *= c;
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= *b;
        }
        out
    }

    /// `self += c * rhs`.
    pub fn axpy(&mut self, c: Complex<T>, rhs: &Self) {
        assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += c * *b;
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim)
            .map(|i| self.data[i * self.dim + i])
            .fold(Complex::zero(), |s, z| s + z)
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (n, m) = (self.dim, rhs.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self.data[i * n + j];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * rhs.data[k * m + l];
                    }
                }
            }
        }
        out
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .fold(Complex::zero(), |s, (a, b)| s + *a * *b)
            })
            .collect()
    }

    /// ⟨u|M|v⟩.
    pub fn sandwich(&self, u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
        let mv = self.apply(v);
        u.iter()
            .zip(&mv)
            .fold(Complex::zero(), |s, (a, b)| s + a.conj() * *b)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// max_ij |A_ij − conj(A_ji)|: zero for Hermitian matrices.
    pub fn hermiticity_defect(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// ‖U†U − I‖_max.
    pub fn unitarity_defect(&self) -> T {
        let prod = self.adjoint().mul(self);
        prod.sub(&Self::identity(self.dim)).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn ensure_finite(&self, context: &str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite {
                context: context.to_string(),
            })
        }
    }
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

/// Average gate fidelity between two unitaries of equal dimension,
/// F = (d + |tr(V†U)|²) / (d + d²); insensitive to global phase.
pub fn gate_fidelity_unitary<T: Real>(u: &ComplexMatrix<T>, v: &ComplexMatrix<T>) -> T {
    assert_eq!(u.dim(), v.dim());
    let d = T::from_usize(u.dim()).unwrap();
    let overlap = v.adjoint().mul(u).trace().norm_sqr();
    (d + overlap) / (d + d * d)
}
