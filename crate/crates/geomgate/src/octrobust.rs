//! Systematic amplitude errors, the second-order robustness functionals of
//! the optimal-control path gauge, and ε×Γ sweep engines.
//!
//! A static miscalibration Ω(t) → (1+ε)Ω(t) perturbs the half-path overlap as
//! P = 1 + Õ₁ + Õ₂ + ⋯ with Õ₁ = 0 and
//! Õ₂ = −ε²|∫ e^{−if} sin²χ dχ|² = −ε² sin²(ηπ)/(2η)² for the gauge
//! f(χ) = η[2χ − sin 2χ]; integer η cancels the second order entirely.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geompath::path::EvolutionPath;
use crate::geompath::phase::{initial_state, target_gate};
use crate::geompath::synthesis::{synthesize_pulse, PulseSchedule};
use crate::qcore::channel::QuantumChannel;
use crate::qcore::grid::TimeGrid;
use crate::qcore::schrodinger::propagate_schrodinger;
use crate::quad::adaptive_simpson_complex;
use crate::real::{real, Real};
use crate::transmon1q::{
    gate_channel, gate_fidelity_1q, ideal_qutrit_propagator, DragConfig, TransmonParams,
};

/// Static fractional amplitude miscalibration; |ε| ≤ 0.5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystematicError<T> {
    epsilon: T,
}

impl<T: Real> SystematicError<T> {
    pub fn new(epsilon: T) -> Result<Self> {
        if epsilon.abs() > real(0.5) {
            return Err(Error::invalid_param(
                "epsilon",
                "|epsilon| must not exceed 0.5",
            ));
        }
        Ok(Self { epsilon })
    }

    #[inline]
    pub fn epsilon(&self) -> T {
        self.epsilon
    }
}

/// Ω(t) → (1+ε)Ω(t); φ and τ are unchanged. The amplitude-cap check is waived
/// for the errored copy (its declared cap grows with the peak).
pub fn apply_error<T: Real>(
    schedule: &PulseSchedule<T>,
    err: SystematicError<T>,
) -> PulseSchedule<T> {
    schedule.scaled_amplitude(T::one() + err.epsilon)
}

/// Closed-form second-order term: −ε² sin²(ηπ)/(2η)², with the η → 0 limit
/// −π²ε²/4.
pub fn o2_analytic<T: Real>(eta: T, epsilon: T) -> T {
    assert!(eta >= T::zero(), "eta must be nonnegative");
    let e2 = epsilon * epsilon;
    if eta.abs() < real(1e-12) {
        return -T::PI() * T::PI() * e2 / real(4.0);
    }
    if (eta - eta.round()).abs() < real(1e-12) {
        // sin²(ηπ) vanishes identically at integer η.
        return T::zero();
    }
    let s = (eta * T::PI()).sin();
    let d = eta + eta;
    -e2 * s * s / (d * d)
}

/// Õ₂ by quadrature of −ε²|∫₀^π e^{−if(χ)} sin²χ dχ|² with
/// f(χ) = η[2χ − sin 2χ].
pub fn o2_numeric<T: Real>(eta: T, epsilon: T) -> Result<T> {
    assert!(eta >= T::zero(), "eta must be nonnegative");
    let two = real::<T>(2.0);
    let f = move |chi: T| {
        let phase = -eta * (two * chi - (two * chi).sin());
        let s = chi.sin();
        Complex::new(phase.cos(), phase.sin()).scale(s * s)
    };
    let integral = adaptive_simpson_complex(f, T::zero(), T::PI(), real(1e-12))?;
    Ok(-epsilon * epsilon * integral.norm_sqr())
}

/// Squared overlap |⟨ψ(τ/2)|ψ_ε(τ/2)⟩|² between the unperturbed and
/// amplitude-errored two-level evolutions at the half-path point.
pub fn perturbed_overlap<T: Real>(
    path: &EvolutionPath<T>,
    schedule: &PulseSchedule<T>,
    epsilon: T,
) -> Result<T> {
    let half_tau = schedule.tau() * real(0.5);
    let grid = TimeGrid::from_max_dt(half_tau, real(0.01))?;
    let u = propagate_schrodinger(&schedule.hamiltonian(), &grid)?;
    let errored = apply_error(schedule, SystematicError::new(epsilon)?);
    let u_eps = propagate_schrodinger(&errored.hamiltonian(), &grid)?;

    let psi0 = initial_state(path.chi0(), path.beta0());
    let psi = u.apply(&psi0);
    let psi_eps = u_eps.apply(&psi0);
    let overlap = psi
        .iter()
        .zip(&psi_eps)
        .fold(Complex::<T>::new(T::zero(), T::zero()), |s, (a, b)| {
            s + a.conj() * *b
        });
    Ok(overlap.norm_sqr().min(T::one()))
}

/// ε and Γ axes of a robustness sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid<T> {
    pub epsilon_values: Vec<T>,
    pub gamma_values: Vec<T>,
}

impl<T: Real> SweepGrid<T> {
    pub fn new(epsilon_values: Vec<T>, gamma_values: Vec<T>) -> Result<Self> {
        if epsilon_values.is_empty() || gamma_values.is_empty() {
            return Err(Error::invalid_param("grid", "axes must be nonempty"));
        }
        let sorted = |v: &[T]| v.windows(2).all(|w| w[0] <= w[1]);
        if !sorted(&epsilon_values) || !sorted(&gamma_values) {
            return Err(Error::invalid_param(
                "grid",
                "axes must be sorted ascending",
            ));
        }
        for e in &epsilon_values {
            SystematicError::new(*e)?;
        }
        for g in &gamma_values {
            if *g < T::zero() {
                return Err(Error::invalid_param(
                    "grid",
                    "decoherence rates must be nonnegative",
                ));
            }
        }
        Ok(Self {
            epsilon_values,
            gamma_values,
        })
    }

    /// Uniform ε axis from the symmetric range ±`epsilon_max` and uniform Γ
    /// axis over [0, gamma_max]; the reference sweep uses 41 × 21 points.
    pub fn uniform(epsilon_max: T, n_eps: usize, gamma_max: T, n_gamma: usize) -> Result<Self> {
        if n_eps < 1 || n_gamma < 1 {
            return Err(Error::invalid_param("grid", "axes need at least one point"));
        }
        let eps = linspace(-epsilon_max, epsilon_max, n_eps);
        let gam = linspace(T::zero(), gamma_max, n_gamma);
        Self::new(eps, gam)
    }
}

fn linspace<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![(a + b) * real(0.5)];
    }
    let nm1 = T::from_usize(n - 1).unwrap();
    (0..n)
        .map(|i| a + (b - a) * T::from_usize(i).unwrap() / nm1)
        .collect()
}

/// Everything needed to evaluate one gate family over a sweep.
#[derive(Debug, Clone)]
pub struct RobustnessSpec<T> {
    pub path: EvolutionPath<T>,
    pub omega_max: T,
    pub alpha: T,
    pub drag: DragConfig,
    /// RK4 step, ns.
    pub dt: T,
    /// Synthesis sample count.
    pub samples: usize,
    /// θ-grid size for the averaged gate fidelity.
    pub theta_samples: usize,
}

impl<T: Real> RobustnessSpec<T> {
    pub fn new(path: EvolutionPath<T>, omega_max: T, alpha: T, drag: DragConfig) -> Self {
        Self {
            path,
            omega_max,
            alpha,
            drag,
            dt: real(0.01),
            samples: crate::DEFAULT_SYNTH_SAMPLES,
            theta_samples: 1001,
        }
    }
}

/// Fidelity matrix over the (ε, Γ) grid, rows indexed by ε.
#[derive(Debug, Clone)]
pub struct SweepResult<T> {
    pub epsilon_values: Vec<T>,
    pub gamma_values: Vec<T>,
    /// `fidelity[i][j]` for `(epsilon_values[i], gamma_values[j])`.
    pub fidelity: Vec<Vec<T>>,
}

impl<T: Real> SweepResult<T> {
    pub fn at(&self, i_eps: usize, j_gamma: usize) -> T {
        self.fidelity[i_eps][j_gamma]
    }
}

/// Synthesizes the gate once, then evaluates the averaged gate fidelity at
/// every (ε, Γ) grid point (in parallel, deterministic assembly). With
/// `decoherence_on = false` the grid must carry the single rate Γ = 0 and the
/// qutrit propagates unitarily; otherwise each Γ runs the full master
/// equation with Γ₁ = Γ₂ = Γ.
pub fn robustness_sweep<T: Real>(
    spec: &RobustnessSpec<T>,
    grid: &SweepGrid<T>,
    decoherence_on: bool,
) -> Result<SweepResult<T>> {
    if !decoherence_on && (grid.gamma_values.len() != 1 || !grid.gamma_values[0].is_zero()) {
        return Err(Error::invalid_param(
            "grid",
            "decoherence_on = false requires the single rate 0",
        ));
    }
    let schedule = synthesize_pulse(&spec.path, spec.omega_max, spec.samples)?;
    let target = target_gate(spec.path.chi0(), spec.path.beta0(), spec.path.gamma());

    let mut points = Vec::new();
    for (i, &eps) in grid.epsilon_values.iter().enumerate() {
        for (j, &gam) in grid.gamma_values.iter().enumerate() {
            points.push((i, j, eps, gam));
        }
    }

    let results: Vec<(usize, usize, T)> = points
        .par_iter()
        .map(|&(i, j, eps, gam)| -> Result<(usize, usize, T)> {
            let errored = apply_error(&schedule, SystematicError::new(eps)?);
            let params = TransmonParams::new(spec.alpha, gam, gam, spec.omega_max)?;
            let channel = if decoherence_on {
                gate_channel(&errored, &params, spec.drag, spec.dt)?
            } else {
                let u = ideal_qutrit_propagator(&errored, &params, spec.drag, spec.dt)?;
                QuantumChannel::from_propagator(&u)
            };
            let f = gate_fidelity_1q(&channel, &target, spec.theta_samples)?;
            Ok((i, j, f))
        })
        .collect::<Result<_>>()?;

    let mut fidelity = vec![vec![T::zero(); grid.gamma_values.len()]; grid.epsilon_values.len()];
    for (i, j, f) in results {
        fidelity[i][j] = f;
    }
    Ok(SweepResult {
        epsilon_values: grid.epsilon_values.clone(),
        gamma_values: grid.gamma_values.clone(),
        fidelity,
    })
}
