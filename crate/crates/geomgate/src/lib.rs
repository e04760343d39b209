//! geomgate: pulse-level simulation and synthesis of nonadiabatic geometric
//! quantum gates on superconducting transmons.
//!
//! The toolkit inverse-engineers resonant drive pulses from prescribed cyclic
//! evolution paths, verifies the geometric/dynamical phase accounting, runs
//! open-system gate simulations with leakage on three-level transmons,
//! evaluates robustness against systematic amplitude errors, and models a
//! parametrically modulated two-transmon control-phase gate.
//!
//! Core math is generic over the floating-point scalar (see [`Real`]);
//! concrete `f64` aliases are exported at the crate root.

pub mod error;
pub mod geompath;
pub mod io;
pub mod octrobust;
pub mod qcore;
pub(crate) mod quad;
pub mod real;
pub mod transmon1q;
pub mod twoq;
pub mod units;

pub use error::{Error, Result};
pub use real::Real;

/// `f64` instantiations of the core types.
pub type ComplexMatrix64 = qcore::ComplexMatrix<f64>;
pub type DensityOperator64 = qcore::DensityOperator<f64>;
pub type Propagator64 = qcore::Propagator<f64>;
pub type TimeGrid64 = qcore::TimeGrid<f64>;
pub type EvolutionPath64 = geompath::EvolutionPath<f64>;
pub type PulseSchedule64 = geompath::PulseSchedule<f64>;
pub type QuantumChannel64 = qcore::QuantumChannel<f64>;

/// Default RK4 step for single-qubit (and other dim ≤ 3) runs, ns.
pub const DEFAULT_DT_1Q: f64 = 0.01;
/// Default RK4 step for two-qubit runs, ns (resolves the 2π×180 MHz
/// modulation, period ≈ 5.56 ns).
pub const DEFAULT_DT_2Q: f64 = 0.005;
/// Default sample count for pulse synthesis grids.
pub const DEFAULT_SYNTH_SAMPLES: usize = 20_001;
