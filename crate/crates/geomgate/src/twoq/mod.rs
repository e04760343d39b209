//! Parametrically modulated two-transmon control-phase gate: Bessel
//! machinery, effective and full rotating-frame models, and two-qubit gate
//! fidelity.

pub mod bessel;
pub mod model;

pub use bessel::{bessel_j1, invert_j1, j1_branch_max};
pub use model::{
    build_cphase_drive, cphase_channel, cphase_propagator, effective_hamiltonian, gate_fidelity_2q,
    index_of, simulate_cphase, simulate_cphase_trajectory, two_transmon_collapse_channels, u2_gate,
    CphaseDrive, FullTwoTransmonModel, ModulationDrive, TwoTransmonParams, CPHASE_ETA,
};
