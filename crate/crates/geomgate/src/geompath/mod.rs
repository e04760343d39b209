//! Cyclic evolution paths, drive inverse engineering, and phase functionals
//! for geometric single-qubit rotations.
//!
//! The state is parameterized by two angles χ(t), β(t) and a phase f(t); a
//! resonant drive (Ω, φ) realizes a prescribed path when
//!
//!   ḟ = −β̇/cos χ,   χ̇ = −Ω sin(β+φ),   β̇ = −Ω cot χ cos(β+φ).
//!
//! Loops built here retrace their χ profile so the dynamical phase cancels,
//! leaving a pure geometric phase set by the β saltations.

pub mod path;
pub mod phase;
pub mod synthesis;

pub use path::{
    build_single_loop_path, build_x_rotation_path, build_z_rotation_path, EvolutionPath,
    PathDescriptor, PathSampling, PathSegment, ScalarFn,
};
pub use phase::{
    dynamical_phase, geometric_phase_line_integral, ideal_loop_propagator, ideal_propagator,
    initial_state, phase_decomposition, target_gate, LoopDrive, PhaseDecomposition,
};
pub use synthesis::{
    constraint_residuals, synthesize_pulse, two_level_hamiltonian, ConstraintResiduals,
    PulseSchedule, ScheduleHamiltonian,
};
