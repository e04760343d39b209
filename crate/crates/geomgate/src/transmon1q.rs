//! Three-level transmon model: driven qutrit Hamiltonian with leakage,
//! optional DRAG correction, open-system gate simulation, and averaged gate
//! fidelities.
//!
//! Basis {|0⟩, |1⟩, |2⟩}; |2⟩ sits at −α in the frame rotating with the
//! resonant drive. Decay and dephasing enter through
//! σ₁ = |0⟩⟨1| + √2 |1⟩⟨2| and σ₂ = |1⟩⟨1| + 2 |2⟩⟨2|.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geompath::synthesis::PulseSchedule;
use crate::qcore::channel::{evolve_channel_basis, QuantumChannel};
use crate::qcore::density::{CollapseChannel, DensityOperator};
use crate::qcore::grid::TimeGrid;
use crate::qcore::lindblad::{propagate_lindblad_strided, LindbladTrajectory};
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::schrodinger::{propagate_schrodinger, Hamiltonian, Propagator};
use crate::real::{real, Real};

/// Transmon physical constants, all in rad/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonParams<T> {
    /// Anharmonicity α > 0.
    pub alpha: T,
    /// Decay rate Γ₁ ≥ 0.
    pub gamma1: T,
    /// Dephasing rate Γ₂ ≥ 0.
    pub gamma2: T,
    /// Drive amplitude cap Ω_max > 0.
    pub omega_max: T,
}

impl<T: Real> TransmonParams<T> {
    pub fn new(alpha: T, gamma1: T, gamma2: T, omega_max: T) -> Result<Self> {
        if !(alpha > T::zero()) {
            return Err(Error::invalid_param(
                "alpha",
                "anharmonicity must be positive",
            ));
        }
        if gamma1 < T::zero() {
            return Err(Error::invalid_param(
                "gamma1",
                "decay rate must be nonnegative",
            ));
        }
        if gamma2 < T::zero() {
            return Err(Error::invalid_param(
                "gamma2",
                "dephasing rate must be nonnegative",
            ));
        }
        if !(omega_max > T::zero()) {
            return Err(Error::invalid_param(
                "omega_max",
                "drive cap must be positive",
            ));
        }
        Ok(Self {
            alpha,
            gamma1,
            gamma2,
            omega_max,
        })
    }

    /// Reference device: α = 2π×300 MHz, Γ₁ = Γ₂ = 2π×2 kHz,
    /// Ω_max = 2π×16 MHz.
    pub fn reference_device() -> Self {
        Self {
            alpha: crate::units::two_pi_mhz(real(300.0)),
            gamma1: crate::units::two_pi_khz(real(2.0)),
            gamma2: crate::units::two_pi_khz(real(2.0)),
            omega_max: crate::units::two_pi_mhz(real(16.0)),
        }
    }

    pub fn with_rates(mut self, gamma: T) -> Self {
        self.gamma1 = gamma;
        self.gamma2 = gamma;
        self
    }
}

/// Whether the first-order derivative correction E → E + iĖ/α is applied to
/// the complex drive envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DragMode {
    Off,
    #[default]
    Derivative,
}

/// Coefficient of the 1–2 leakage coupling, as a multiple of the envelope:
/// `LadderConsistent` uses √2·Ω/2 (the harmonic-ladder continuation of the
/// Ω/2 qubit coupling), `Doubled` uses √2·Ω (no ladder ½), and `Decoupled`
/// zeroes the transition entirely (an α → ∞ two-level limit for
/// verification).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LeakagePrefactor {
    #[default]
    LadderConsistent,
    Doubled,
    Decoupled,
}

/// The DRAG / leakage-coupling flag pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct DragConfig {
    pub mode: DragMode,
    pub leakage: LeakagePrefactor,
}

impl DragConfig {
    pub fn off() -> Self {
        Self {
            mode: DragMode::Off,
            leakage: LeakagePrefactor::LadderConsistent,
        }
    }

    pub fn derivative() -> Self {
        Self {
            mode: DragMode::Derivative,
            leakage: LeakagePrefactor::LadderConsistent,
        }
    }

    /// Derivative DRAG with the doubled √2·Ω leakage coupling.
    pub fn doubled_leakage() -> Self {
        Self {
            mode: DragMode::Derivative,
            leakage: LeakagePrefactor::Doubled,
        }
    }
}

/// Driven three-level model of a schedule; precomputes the complex envelope
/// and its derivative so RK4 evaluations stay allocation-free.
pub struct QutritModel<T> {
    envelope: Vec<Complex<T>>,
    envelope_dot: Vec<Complex<T>>,
    tau: T,
    alpha: T,
    drag: DragConfig,
}

impl<T: Real> QutritModel<T> {
    pub fn new(schedule: &PulseSchedule<T>, params: &TransmonParams<T>, drag: DragConfig) -> Self {
        let n = schedule.len();
        let mut envelope = Vec::with_capacity(n);
        for k in 0..n {
            let w = schedule.omega()[k];
            let p = schedule.phi()[k];
            envelope.push(Complex::new(p.cos(), p.sin()).scale(w));
        }
        // Segment-aware derivative: centered inside, one-sided at the edges,
        // so the φ saltations never contaminate Ė.
        let h = schedule.tau() / T::from_usize(n - 1).unwrap();
        let mut envelope_dot = vec![Complex::new(T::zero(), T::zero()); n];
        let mut bounds: Vec<usize> = schedule.segment_starts().to_vec();
        bounds.push(n);
        for w in bounds.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a < 2 {
                continue;
            }
            for k in a..b {
                envelope_dot[k] = if k == a {
                    (envelope[k + 1] - envelope[k]).scale(T::one() / h)
                } else if k == b - 1 {
                    (envelope[k] - envelope[k - 1]).scale(T::one() / h)
                } else {
                    (envelope[k + 1] - envelope[k - 1]).scale(real::<T>(0.5) / h)
                };
            }
        }
        Self {
            envelope,
            envelope_dot,
            tau: schedule.tau(),
            alpha: params.alpha,
            drag,
        }
    }

    fn sample(&self, series: &[Complex<T>], t: T) -> Complex<T> {
        let n = series.len();
        let h = self.tau / T::from_usize(n - 1).unwrap();
        let x = (t / h).max(T::zero());
        let mut k = x.floor().to_usize().unwrap_or(0);
        if k >= n - 1 {
            k = n - 2;
        }
        let frac = (x - T::from_usize(k).unwrap()).max(T::zero()).min(T::one());
        series[k] + (series[k + 1] - series[k]).scale(frac)
    }

    /// Effective complex envelope at time t, after the DRAG correction.
    pub fn effective_envelope(&self, t: T) -> Complex<T> {
        let e = self.sample(&self.envelope, t);
        match self.drag.mode {
            DragMode::Off => e,
            DragMode::Derivative => {
                let de = self.sample(&self.envelope_dot, t);
                e - Complex::new(T::zero(), T::one()) * de.scale(T::one() / self.alpha)
            }
        }
    }
}

impl<T: Real> Hamiltonian<T> for QutritModel<T> {
    fn dim(&self) -> usize {
        3
    }

    fn eval_into(&self, t: T, out: &mut ComplexMatrix<T>) {
        let e = self.effective_envelope(t);
        let half = real::<T>(0.5);
        let sqrt2 = real::<T>(std::f64::consts::SQRT_2);
        out.set_zero();
        out[(0, 1)] = e.scale(half);
        out[(1, 0)] = out[(0, 1)].conj();
        let leak = match self.drag.leakage {
            LeakagePrefactor::LadderConsistent => e.scale(sqrt2 * half),
            LeakagePrefactor::Doubled => e.scale(sqrt2),
            LeakagePrefactor::Decoupled => Complex::new(T::zero(), T::zero()),
        };
        out[(1, 2)] = leak;
        out[(2, 1)] = leak.conj();
        out[(2, 2)] = Complex::new(-self.alpha, T::zero());
    }
}

/// Driven qutrit Hamiltonian at one instant; errors if `t` is outside the
/// schedule span.
pub fn qutrit_hamiltonian<T: Real>(
    schedule: &PulseSchedule<T>,
    params: &TransmonParams<T>,
    drag: DragConfig,
    t: T,
) -> Result<ComplexMatrix<T>> {
    if t < T::zero() || t > schedule.tau() * (T::one() + real(1e-9)) {
        return Err(Error::OutOfTimeRange {
            t_ns: t.to_f64().unwrap_or(f64::NAN),
            tau_ns: schedule.tau().to_f64().unwrap_or(f64::NAN),
        });
    }
    let model = QutritModel::new(schedule, params, drag);
    let mut h = ComplexMatrix::zeros(3);
    model.eval_into(t, &mut h);
    Ok(h)
}

/// σ₁, σ₂ collapse channels for the given rates.
pub fn collapse_channels<T: Real>(params: &TransmonParams<T>) -> Vec<CollapseChannel<T>> {
    let sqrt2 = real::<T>(std::f64::consts::SQRT_2);
    let mut sigma1 = ComplexMatrix::zeros(3);
    sigma1[(0, 1)] = Complex::new(T::one(), T::zero());
    sigma1[(1, 2)] = Complex::new(sqrt2, T::zero());
    let mut sigma2 = ComplexMatrix::zeros(3);
    sigma2[(1, 1)] = Complex::new(T::one(), T::zero());
    sigma2[(2, 2)] = Complex::new(real(2.0), T::zero());
    vec![
        CollapseChannel {
            operator: sigma1,
            rate: params.gamma1,
        },
        CollapseChannel {
            operator: sigma2,
            rate: params.gamma2,
        },
    ]
}

/// Open-system gate simulation with the σ₁/σ₂ channels; trajectory sampled
/// every ≈0.1 ns. `dt` defaults to 0.01 ns via [`simulate_gate`].
pub fn simulate_gate_with_dt<T: Real>(
    schedule: &PulseSchedule<T>,
    params: &TransmonParams<T>,
    drag: DragConfig,
    rho0: &DensityOperator<T>,
    dt: T,
) -> Result<LindbladTrajectory<T>> {
    let model = QutritModel::new(schedule, params, drag);
    let grid = TimeGrid::from_max_dt(schedule.tau(), dt)?;
    let stride = (real::<T>(0.1) / grid.dt())
        .round()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    propagate_lindblad_strided(&model, &collapse_channels(params), rho0, &grid, stride)
}

pub fn simulate_gate<T: Real>(
    schedule: &PulseSchedule<T>,
    params: &TransmonParams<T>,
    drag: DragConfig,
    rho0: &DensityOperator<T>,
) -> Result<LindbladTrajectory<T>> {
    simulate_gate_with_dt(schedule, params, drag, rho0, real(0.01))
}

/// Evolves the full Hermitian basis of the qutrit space through the open
/// dynamics, yielding the gate's quantum channel.
pub fn gate_channel<T: Real>(
    schedule: &PulseSchedule<T>,
    params: &TransmonParams<T>,
    drag: DragConfig,
    dt: T,
) -> Result<QuantumChannel<T>> {
    let model = QutritModel::new(schedule, params, drag);
    let grid = TimeGrid::from_max_dt(schedule.tau(), dt)?;
    evolve_channel_basis(&model, &collapse_channels(params), &grid, 3)
}

/// Closed-system three-level propagator of the schedule (decoherence off).
pub fn ideal_qutrit_propagator<T: Real>(
    schedule: &PulseSchedule<T>,
    params: &TransmonParams<T>,
    drag: DragConfig,
    dt: T,
) -> Result<Propagator<T>> {
    let model = QutritModel::new(schedule, params, drag);
    let grid = TimeGrid::from_max_dt(schedule.tau(), dt)?;
    propagate_schrodinger(&model, &grid)
}

/// Gate fidelity averaged over the θ family cos θ|0⟩ + sin θ|1⟩ on a uniform
/// grid of `theta_samples` points over [0, 2π]: mean of
/// ⟨Φ_ideal|Λ(|Φ(0)⟩⟨Φ(0)|)|Φ_ideal⟩ with Φ_ideal = target·Φ(0).
pub fn gate_fidelity_1q<T: Real>(
    channel: &QuantumChannel<T>,
    target: &Propagator<T>,
    theta_samples: usize,
) -> Result<T> {
    if theta_samples < 2 {
        return Err(Error::TooFewSamples {
            min: 2,
            got: theta_samples,
        });
    }
    assert_eq!(target.dim(), 2, "target acts on the qubit subspace");
    let dim = channel.dim();
    assert!(dim >= 2);
    let n = T::from_usize(theta_samples).unwrap();
    let mut acc = T::zero();
    for k in 0..theta_samples {
        let theta = T::TAU() * T::from_usize(k).unwrap() / n;
        let (c, s) = (theta.cos(), theta.sin());
        let input2 = [Complex::new(c, T::zero()), Complex::new(s, T::zero())];
        let ideal2 = target.apply(&input2);
        let mut input = vec![Complex::<T>::new(T::zero(), T::zero()); dim];
        let mut ideal = input.clone();
        input[..2].copy_from_slice(&input2);
        ideal[..2].copy_from_slice(&ideal2);
        acc += channel.pure_state_fidelity(&input, &ideal);
    }
    Ok(acc / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geompath::{build_z_rotation_path, synthesize_pulse};
    use crate::units::two_pi_mhz;

    fn reference_schedule() -> PulseSchedule<f64> {
        let path = build_z_rotation_path(-std::f64::consts::FRAC_PI_8, 0.2).unwrap();
        synthesize_pulse(&path, two_pi_mhz(16.0), 2001).unwrap()
    }

    #[test]
    fn zero_drive_leaves_only_anharmonicity() {
        let params = TransmonParams::<f64>::reference_device();
        let schedule = reference_schedule();
        // Z-path drive vanishes at t = 0.
        let h = qutrit_hamiltonian(&schedule, &params, DragConfig::off(), 0.0).unwrap();
        assert!(h[(0, 1)].norm() < 1e-12);
        assert!(h[(1, 2)].norm() < 1e-12);
        assert!((h[(2, 2)].re + params.alpha).abs() < 1e-15);
    }

    #[test]
    fn doubled_coupling_is_sqrt2_omega() {
        let params = TransmonParams::<f64>::reference_device();
        let schedule = reference_schedule();
        // Peak sample: Ω = Ω_max.
        let k = schedule
            .omega()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        let t = schedule.times()[k];
        let drag = DragConfig {
            mode: DragMode::Off,
            leakage: LeakagePrefactor::Doubled,
        };
        let h = qutrit_hamiltonian(&schedule, &params, drag, t).unwrap();
        let want = std::f64::consts::SQRT_2 * params.omega_max;
        assert!((h[(1, 2)].norm() - want).abs() < 1e-9 * want);
        // Ladder-consistent default carries the extra 1/2.
        let h2 = qutrit_hamiltonian(&schedule, &params, DragConfig::off(), t).unwrap();
        assert!((h2[(1, 2)].norm() - want / 2.0).abs() < 1e-9 * want);
    }

    #[test]
    fn hamiltonian_is_hermitian_everywhere() {
        let params = TransmonParams::<f64>::reference_device();
        let schedule = reference_schedule();
        for frac in [0.0, 0.1, 0.25, 0.5, 0.77, 1.0] {
            let t = frac * schedule.tau();
            let h = qutrit_hamiltonian(&schedule, &params, DragConfig::derivative(), t).unwrap();
            assert_eq!(h.hermiticity_defect(), 0.0);
        }
    }

    #[test]
    fn rejects_out_of_span_time() {
        let params = TransmonParams::<f64>::reference_device();
        let schedule = reference_schedule();
        assert!(qutrit_hamiltonian(&schedule, &params, DragConfig::off(), -1.0).is_err());
        assert!(
            qutrit_hamiltonian(&schedule, &params, DragConfig::off(), schedule.tau() * 1.1)
                .is_err()
        );
    }

    #[test]
    fn identity_channel_scores_one() {
        let channel = QuantumChannel::<f64>::identity(3);
        let target = Propagator::from_matrix(ComplexMatrix::identity(2));
        let f = gate_fidelity_1q(&channel, &target, 101).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_theta_samples_rejected() {
        let channel = QuantumChannel::<f64>::identity(3);
        let target = Propagator::from_matrix(ComplexMatrix::identity(2));
        assert!(gate_fidelity_1q(&channel, &target, 1).is_err());
    }
}
