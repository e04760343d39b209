//! Dense complex linear algebra, Schrödinger propagation and a Lindblad
//! master-equation solver for small Hilbert spaces (dim ≤ 9).
//!
//! Conventions: ħ = 1, energies and rates in rad/ns, times in ns. The master
//! equation is integrated in the form ρ̇ = i[ρ, H] + Σ Γ_k L(A_k).

pub mod channel;
pub mod density;
pub mod eig;
pub mod grid;
pub mod lindblad;
pub mod matrix;
pub mod schrodinger;

pub use channel::{evolve_channel_basis, QuantumChannel};
pub use density::{embed_state, state_fidelity, CollapseChannel, DensityOperator};
pub use eig::hermitian_eigenvalues;
pub use grid::TimeGrid;
pub use lindblad::{
    lindblad_final, propagate_lindblad, propagate_lindblad_strided, LindbladTrajectory,
};
pub use matrix::{gate_fidelity_unitary, ComplexMatrix};
pub use schrodinger::{hamiltonian_fn, propagate_schrodinger, Hamiltonian, MatrixFn, Propagator};
