use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the simulation and synthesis layers.
///
/// Diagnostic payloads are carried as `f64` regardless of the working scalar
/// so the error type stays non-generic.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max asymmetry {asymmetry:.3e} at t = {t_ns} ns")]
    NonHermitian { asymmetry: f64, t_ns: f64 },

    #[error("non-finite entries in {context}")]
    NonFinite { context: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("trace drift {drift:.3e} at t = {t_ns} ns exceeds 1e-6: step size too large")]
    TraceDrift { drift: f64, t_ns: f64 },

    #[error(
        "state diverged at t = {t_ns} ns (entry magnitude {magnitude:.3e}): step size too large"
    )]
    StepSizeFailure { magnitude: f64, t_ns: f64 },

    #[error("invalid density operator: {reason}")]
    InvalidDensity { reason: String },

    #[error("state vector is not normalized: |norm - 1| = {deviation:.3e}")]
    UnnormalizedState { deviation: f64 },

    #[error("evolution is not cyclic: initial state fails to return to itself (overlap defect {defect:.3e})")]
    NonCyclic { defect: f64 },

    #[error("accumulated phase {total:.6} rad disagrees with the declared rotation angle {expected:.6} rad")]
    PhaseMismatch { total: f64, expected: f64 },

    #[error("pulse synthesis produced a non-finite sample at s = {s}")]
    SynthesisNonFinite { s: f64 },

    #[error("schedule and path grids do not match: {reason}")]
    GridMismatch { reason: String },

    #[error("phase-functional integrand diverges near s = {s}")]
    DivergentIntegrand { s: f64 },

    #[error("quadrature failed to converge (reached recursion limit)")]
    QuadratureNonConvergence,

    #[error("time {t_ns} ns is outside the schedule span [0, {tau_ns}] ns")]
    OutOfTimeRange { t_ns: f64, tau_ns: f64 },

    #[error("sample count {got} is below the minimum {min}")]
    TooFewSamples { min: usize, got: usize },

    #[error("bessel argument {x} outside supported range |x| <= {max}")]
    BesselOutOfRange { x: f64, max: f64 },

    #[error("effective coupling exceeds J1 branch maximum: requested {y:.6}, branch top {max:.6}")]
    J1BranchOverflow { y: f64, max: f64 },

    #[error("peak effective coupling {peak:.6} rad/ns overflows the J1 branch ({max:.6} rad/ns): increase tau_prime")]
    CphaseBranchOverflow { peak: f64, max: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },
}

impl Error {
    pub(crate) fn invalid_param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            reason: reason.into(),
        }
    }
}
