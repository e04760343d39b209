//! Quantum channels reconstructed from a complete basis of evolved states.
//!
//! A Lindblad map is linear, so evolving dim² physical input states once is
//! enough to predict the output for any initial density operator. This is
//! what makes averaged gate fidelities affordable: the master equation runs
//! dim² times instead of once per sampled input state.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::Result;
use crate::qcore::density::{CollapseChannel, DensityOperator};
use crate::qcore::grid::TimeGrid;
use crate::qcore::lindblad::lindblad_final;
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::schrodinger::{Hamiltonian, Propagator};
use crate::real::{real, Real};

/// Completely determined linear map ρ ↦ Λ(ρ) on a `dim`-dimensional space,
/// stored as the images of the matrix units |j⟩⟨k|.
#[derive(Debug, Clone)]
pub struct QuantumChannel<T> {
    dim: usize,
    /// `images[j*dim + k]` = Λ(|j⟩⟨k|)
    images: Vec<ComplexMatrix<T>>,
}

impl<T: Real> QuantumChannel<T> {
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn image_of_unit(&self, j: usize, k: usize) -> &ComplexMatrix<T> {
        &self.images[j * self.dim + k]
    }

    /// Λ(ρ) by linearity over the matrix units.
    pub fn apply(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(rho.dim(), self.dim);
        let mut out = ComplexMatrix::zeros(self.dim);
        for j in 0..self.dim {
            for k in 0..self.dim {
                let c = rho[(j, k)];
                if c.re.is_zero() && c.im.is_zero() {
                    continue;
                }
                out.axpy(c, &self.images[j * self.dim + k]);
            }
        }
        out
    }

    /// ⟨φ|Λ(|ψ⟩⟨ψ|)|φ⟩ without building the full output matrix.
    pub fn pure_state_fidelity(&self, psi: &[Complex<T>], phi: &[Complex<T>]) -> T {
        let rho = ComplexMatrix::from_fn(self.dim, |i, j| psi[i] * psi[j].conj());
        let out = self.apply(&rho);
        out.sandwich(phi, phi).re
    }

    /// Unitary channel ρ ↦ UρU†.
    pub fn from_propagator(u: &Propagator<T>) -> Self {
        let dim = u.dim();
        let um = u.matrix();
        let udag = um.adjoint();
        let mut images = Vec::with_capacity(dim * dim);
        for j in 0..dim {
            for k in 0..dim {
                images.push(um.mul(&ComplexMatrix::ketbra(dim, j, k)).mul(&udag));
            }
        }
        Self { dim, images }
    }

    /// Identity map; handy in tests.
    pub fn identity(dim: usize) -> Self {
        let images = (0..dim * dim)
            .map(|i| ComplexMatrix::ketbra(dim, i / dim, i % dim))
            .collect();
        Self { dim, images }
    }
}

/// The dim² physical preparation states spanning the Hermitian operator
/// basis: |j⟩⟨j|, and (|j⟩+|k⟩)/√2, (|j⟩+i|k⟩)/√2 projectors for j < k.
fn preparation_states<T: Real>(dim: usize) -> Vec<DensityOperator<T>> {
    let inv_sqrt2 = real::<T>(std::f64::consts::FRAC_1_SQRT_2);
    let mut states = Vec::with_capacity(dim * dim);
    for j in 0..dim {
        states.push(DensityOperator::basis_state(dim, j));
    }
    for j in 0..dim {
        for k in (j + 1)..dim {
            let mut plus = vec![Complex::<T>::new(T::zero(), T::zero()); dim];
            plus[j] = Complex::new(inv_sqrt2, T::zero());
            plus[k] = Complex::new(inv_sqrt2, T::zero());
            states.push(DensityOperator::pure(&plus).expect("normalized by construction"));

            let mut plus_i = vec![Complex::<T>::new(T::zero(), T::zero()); dim];
            plus_i[j] = Complex::new(inv_sqrt2, T::zero());
            plus_i[k] = Complex::new(T::zero(), inv_sqrt2);
            states.push(DensityOperator::pure(&plus_i).expect("normalized by construction"));
        }
    }
    states
}

/// Evolves a complete Hermitian basis of dim² states through the master
/// equation (in parallel) and assembles the resulting channel.
///
/// Requires dim ≤ 9; the dense solver is not meant for anything larger.
pub fn evolve_channel_basis<T: Real>(
    hamiltonian: &(impl Hamiltonian<T> + Sync),
    channels: &[CollapseChannel<T>],
    grid: &TimeGrid<T>,
    dim: usize,
) -> Result<QuantumChannel<T>> {
    assert!(dim <= 9, "dense channel evolution is limited to dim <= 9");
    let states = preparation_states::<T>(dim);
    let finals: Vec<ComplexMatrix<T>> = states
        .par_iter()
        .map(|rho0| lindblad_final(hamiltonian, channels, rho0, grid).map(|d| d.into_matrix()))
        .collect::<Result<_>>()?;

    // First `dim` runs are the diagonal units; the pair runs follow in
    // (j, k) order, two per pair.
    let mut images = vec![ComplexMatrix::<T>::zeros(dim); dim * dim];
    for j in 0..dim {
        images[j * dim + j] = finals[j].clone();
    }
    let half = real::<T>(0.5);
    let mut idx = dim;
    for j in 0..dim {
        for k in (j + 1)..dim {
            let p_plus = &finals[idx];
            let p_imag = &finals[idx + 1];
            idx += 2;
            // Λ(|j⟩⟨k|) = Λ(P+) + iΛ(Pi) − (1+i)/2 (Λ(jj) + Λ(kk))
            let mut jk = p_plus.clone();
            jk.axpy(Complex::new(T::zero(), T::one()), p_imag);
            let w = Complex::new(-half, -half);
            let djj = images[j * dim + j].clone();
            let dkk = images[k * dim + k].clone();
            jk.axpy(w, &djj);
            jk.axpy(w, &dkk);
            images[k * dim + j] = jk.adjoint();
            images[j * dim + k] = jk;
        }
    }
    Ok(QuantumChannel { dim, images })
}
