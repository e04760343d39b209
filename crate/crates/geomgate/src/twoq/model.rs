//! Two capacitively coupled transmons with parametric frequency modulation:
//! rotating-frame Hamiltonians, control-phase drive construction, and the
//! two-qubit gate fidelity.
//!
//! Product basis |ab⟩ with a, b ∈ {0,1,2}, index 3a + b. Modulating transmon
//! A with F(t) = λ(t) sin(νt + φ(t)) at ν = Δ − α_A makes the first sideband
//! of the |20⟩⟨11| coupling resonant with strength 2√2 g J₁(λ).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geompath::build_z_rotation_path;
use crate::geompath::path::PathDescriptor;
use crate::geompath::synthesis::{synthesize_dimensionless, two_level_hamiltonian, PulseSchedule};
use crate::qcore::channel::{evolve_channel_basis, QuantumChannel};
use crate::qcore::density::{CollapseChannel, DensityOperator};
use crate::qcore::grid::TimeGrid;
use crate::qcore::lindblad::{lindblad_final, propagate_lindblad_strided, LindbladTrajectory};
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::schrodinger::{propagate_schrodinger, Hamiltonian, Propagator};
use crate::real::{real, Real};
use crate::twoq::bessel::{invert_j1_with_branch, j1_branch_max};

/// Path gauge used for the control-phase loop, matching the single-qubit
/// Z-rotation construction.
pub const CPHASE_ETA: f64 = 0.2;

/// Basis index of |ab⟩ in the two-qutrit product space.
#[inline]
pub fn index_of(a: usize, b: usize) -> usize {
    debug_assert!(a < 3 && b < 3);
    3 * a + b
}

/// Device constants of the coupled pair, rad/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoTransmonParams<T> {
    /// Qubit frequency difference Δ = ω_A − ω_B.
    pub delta: T,
    pub alpha_a: T,
    pub alpha_b: T,
    /// Static capacitive coupling g.
    pub g: T,
    /// Modulation frequency ν.
    pub nu: T,
    /// Per-transmon decay rate Γ₁.
    pub gamma1: T,
    /// Per-transmon dephasing rate Γ₂.
    pub gamma2: T,
}

impl<T: Real> TwoTransmonParams<T> {
    /// Validates the resonant configuration ν = Δ − α_A (within 1e-9 rad/ns);
    /// use [`Self::new_off_resonant`] to bypass deliberately.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        delta: T,
        alpha_a: T,
        alpha_b: T,
        g: T,
        nu: T,
        gamma1: T,
        gamma2: T,
    ) -> Result<Self> {
        let p = Self::new_off_resonant(delta, alpha_a, alpha_b, g, nu, gamma1, gamma2)?;
        let resonant = delta - alpha_a;
        if (nu - resonant).abs() > real(1e-9) {
            return Err(Error::invalid_param(
                "nu",
                format!(
                    "modulation frequency must equal delta - alpha_a = {:.6} rad/ns for the resonant |11>-|20> configuration (got {:.6}); use new_off_resonant to override",
                    resonant.to_f64().unwrap_or(f64::NAN),
                    nu.to_f64().unwrap_or(f64::NAN),
                ),
            ));
        }
        Ok(p)
    }

    /// Skips the ν = Δ − α_A resonance assertion.
    #[allow(clippy::too_many_arguments)]
    pub fn new_off_resonant(
        delta: T,
        alpha_a: T,
        alpha_b: T,
        g: T,
        nu: T,
        gamma1: T,
        gamma2: T,
    ) -> Result<Self> {
        for (name, v, positive) in [
            ("delta", delta, true),
            ("alpha_a", alpha_a, true),
            ("alpha_b", alpha_b, true),
            ("g", g, true),
            ("nu", nu, true),
            ("gamma1", gamma1, false),
            ("gamma2", gamma2, false),
        ] {
            if positive && !(v > T::zero()) {
                return Err(Error::invalid_param(name, "must be positive"));
            }
            if !positive && v < T::zero() {
                return Err(Error::invalid_param(name, "must be nonnegative"));
            }
        }
        Ok(Self {
            delta,
            alpha_a,
            alpha_b,
            g,
            nu,
            gamma1,
            gamma2,
        })
    }

    /// Reference setup: Δ = 2π×500 MHz, α_A = 2π×320 MHz, α_B = 2π×300 MHz,
    /// g = 2π×5 MHz, ν = 2π×180 MHz, Γ₁ = Γ₂ = 2π×2 kHz.
    pub fn reference_device() -> Self {
        use crate::units::{two_pi_khz, two_pi_mhz};
        Self {
            delta: two_pi_mhz(real(500.0)),
            alpha_a: two_pi_mhz(real(320.0)),
            alpha_b: two_pi_mhz(real(300.0)),
            g: two_pi_mhz(real(5.0)),
            nu: two_pi_mhz(real(180.0)),
            gamma1: two_pi_khz(real(2.0)),
            gamma2: two_pi_khz(real(2.0)),
        }
    }

    /// Warning when g is not small against every detuning scale in the
    /// rotating-wave reduction (g ≤ min(ν, Δ−ν, Δ+α_B−ν)/10).
    pub fn rwa_warning(&self) -> Option<String> {
        let scales = [
            self.nu,
            self.delta - self.nu,
            self.delta + self.alpha_b - self.nu,
        ];
        let min = scales.iter().cloned().fold(T::infinity(), T::min);
        if self.g > min / real(10.0) {
            Some(format!(
                "coupling g = {:.5} rad/ns is not small against the slowest detuning {:.5} rad/ns; the effective two-level reduction may be inaccurate",
                self.g.to_f64().unwrap_or(f64::NAN),
                min.to_f64().unwrap_or(f64::NAN),
            ))
        } else {
            None
        }
    }
}

/// Sampled modulation waveform: F(t) = λ(t) sin(νt + φ(t)).
#[derive(Debug, Clone)]
pub struct ModulationDrive<T> {
    times: Vec<T>,
    lambda: Vec<T>,
    phi2: Vec<T>,
    nu: T,
}

impl<T: Real> ModulationDrive<T> {
    pub fn new(times: Vec<T>, lambda: Vec<T>, phi2: Vec<T>, nu: T) -> Result<Self> {
        if times.len() != lambda.len() || times.len() != phi2.len() || times.len() < 2 {
            return Err(Error::GridMismatch {
                reason: "drive arrays disagree in length".into(),
            });
        }
        let top = real::<T>(1.8412);
        for (k, l) in lambda.iter().enumerate() {
            if !l.is_finite() || !phi2[k].is_finite() {
                return Err(Error::NonFinite {
                    context: "modulation drive".into(),
                });
            }
            if *l < T::zero() || *l > top {
                return Err(Error::invalid_param(
                    "lambda",
                    "samples must stay on the first monotone branch [0, 1.8412]",
                ));
            }
        }
        Ok(Self {
            times,
            lambda,
            phi2,
            nu,
        })
    }

    #[inline]
    pub fn tau(&self) -> T {
        *self.times.last().unwrap()
    }

    #[inline]
    pub fn nu(&self) -> T {
        self.nu
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn lambda(&self) -> &[T] {
        &self.lambda
    }

    pub fn phi2(&self) -> &[T] {
        &self.phi2
    }

    fn sample(&self, series: &[T], t: T) -> T {
        let n = series.len();
        let h = self.tau() / T::from_usize(n - 1).unwrap();
        let x = (t / h).max(T::zero());
        let mut k = x.floor().to_usize().unwrap_or(0);
        if k >= n - 1 {
            k = n - 2;
        }
        let frac = (x - T::from_usize(k).unwrap()).max(T::zero()).min(T::one());
        series[k] + (series[k + 1] - series[k]) * frac
    }

    pub fn lambda_at(&self, t: T) -> T {
        self.sample(&self.lambda, t)
    }

    pub fn phi2_at(&self, t: T) -> T {
        self.sample(&self.phi2, t)
    }

    /// F(t) = λ(t) sin(νt + φ(t)).
    pub fn f_at(&self, t: T) -> T {
        self.lambda_at(t) * (self.nu * t + self.phi2_at(t)).sin()
    }
}

/// Effective Hamiltonian in the {|11⟩, |20⟩} subspace,
/// ½ [[0, g′ e^{iφ}], [g′ e^{−iφ}, 0]] — the same form as the single-qubit
/// drive with Ω → g′.
pub fn effective_hamiltonian<T: Real>(g_eff: T, phi2: T) -> ComplexMatrix<T> {
    two_level_hamiltonian(g_eff, phi2)
}

/// Full rotating-frame model on the two-qutrit space.
pub struct FullTwoTransmonModel<'a, T> {
    params: TwoTransmonParams<T>,
    drive: &'a ModulationDrive<T>,
}

impl<'a, T: Real> FullTwoTransmonModel<'a, T> {
    pub fn new(params: TwoTransmonParams<T>, drive: &'a ModulationDrive<T>) -> Self {
        Self { params, drive }
    }
}

impl<T: Real> Hamiltonian<T> for FullTwoTransmonModel<'_, T> {
    fn dim(&self) -> usize {
        9
    }

    fn eval_into(&self, t: T, out: &mut ComplexMatrix<T>) {
        let p = &self.params;
        let f = self.drive.f_at(t);
        let mod_phase = Complex::new(f.cos(), -f.sin()); // e^{−iF(t)}
        let sqrt2 = real::<T>(std::f64::consts::SQRT_2);

        out.set_zero();
        let mut put = |row: usize, col: usize, amp: T, rot: T| {
            let v = Complex::new(rot.cos(), rot.sin()).scale(amp) * mod_phase;
            out[(row, col)] = v;
            out[(col, row)] = v.conj();
        };
        // g |10⟩⟨01| e^{iΔt}
        put(index_of(1, 0), index_of(0, 1), p.g, p.delta * t);
        // √2 g |11⟩⟨02| e^{i(Δ+α_B)t}
        put(
            index_of(1, 1),
            index_of(0, 2),
            sqrt2 * p.g,
            (p.delta + p.alpha_b) * t,
        );
        // √2 g |20⟩⟨11| e^{i(Δ−α_A)t}
        put(
            index_of(2, 0),
            index_of(1, 1),
            sqrt2 * p.g,
            (p.delta - p.alpha_a) * t,
        );
    }
}

/// One-shot evaluation of the full rotating-frame Hamiltonian at time `t`;
/// errors if `t` lies outside the drive span.
pub fn full_hamiltonian<T: Real>(
    params: &TwoTransmonParams<T>,
    drive: &ModulationDrive<T>,
    t: T,
) -> Result<ComplexMatrix<T>> {
    if t < T::zero() || t > drive.tau() * (T::one() + real(1e-9)) {
        return Err(Error::OutOfTimeRange {
            t_ns: t.to_f64().unwrap_or(f64::NAN),
            tau_ns: drive.tau().to_f64().unwrap_or(f64::NAN),
        });
    }
    let model = FullTwoTransmonModel::new(*params, drive);
    let mut h = ComplexMatrix::zeros(9);
    model.eval_into(t, &mut h);
    Ok(h)
}

/// Control-phase drive: the Z-rotation loop (η = 1/5) in the {|11⟩, |20⟩}
/// subspace at fixed duration τ′, plus the modulation amplitude λ(t) that
/// realizes the required effective coupling.
#[derive(Debug, Clone)]
pub struct CphaseDrive<T> {
    pub drive: ModulationDrive<T>,
    /// Effective-coupling schedule: omega() holds g′(t), phi() the loop phase.
    pub schedule: PulseSchedule<T>,
    /// Peak g′ reached at τ′, rad/ns.
    pub peak_g_eff: T,
}

/// Builds the γ′ control-phase drive for a fixed duration `tau_prime` ns.
/// Unlike single-qubit synthesis the duration is pinned and the peak g′ is an
/// output; it must stay on the J₁ branch or the build fails with a request
/// for a longer τ′.
pub fn build_cphase_drive<T: Real>(
    gamma_prime: T,
    tau_prime: T,
    params: &TwoTransmonParams<T>,
) -> Result<CphaseDrive<T>> {
    if !(tau_prime > T::zero()) {
        return Err(Error::invalid_param(
            "tau_prime",
            "duration must be positive",
        ));
    }
    let path = build_z_rotation_path(gamma_prime, real(CPHASE_ETA))?;
    let dp = synthesize_dimensionless(&path, crate::DEFAULT_SYNTH_SAMPLES)?;

    let times: Vec<T> = dp.s.iter().map(|&s| s * tau_prime).collect();
    let g_eff: Vec<T> = dp.omega.iter().map(|&w| w / tau_prime).collect();
    let peak_g_eff = dp.peak / tau_prime;

    let denom = real::<T>(2.0) * real::<T>(std::f64::consts::SQRT_2) * params.g;
    let (lambda_star, y_max) = j1_branch_max::<T>();
    let peak_ratio = peak_g_eff / denom;
    if peak_ratio > y_max {
        return Err(Error::CphaseBranchOverflow {
            peak: peak_g_eff.to_f64().unwrap_or(f64::NAN),
            max: (y_max * denom).to_f64().unwrap_or(f64::NAN),
        });
    }
    let lambda: Vec<T> = g_eff
        .iter()
        .map(|&ge| invert_j1_with_branch(ge / denom, lambda_star, y_max))
        .collect::<Result<_>>()?;

    let descriptor = PathDescriptor {
        family: "cphase-z-loop".to_string(),
        gamma_rad: gamma_prime.to_f64().unwrap_or(f64::NAN),
        eta: Some(CPHASE_ETA),
        chi0_rad: 0.0,
        beta0_rad: 0.0,
        segments: 2,
    };
    let schedule = PulseSchedule::from_parts(
        times.clone(),
        g_eff,
        dp.phi.clone(),
        tau_prime,
        peak_g_eff,
        dp.segment_starts.clone(),
        descriptor,
    )?;
    let drive = ModulationDrive::new(times, lambda, dp.phi, params.nu)?;
    Ok(CphaseDrive {
        drive,
        schedule,
        peak_g_eff,
    })
}

/// Per-transmon σ₁/σ₂ collapse channels, each tensored with the identity on
/// the partner transmon.
pub fn two_transmon_collapse_channels<T: Real>(
    params: &TwoTransmonParams<T>,
) -> Vec<CollapseChannel<T>> {
    let sqrt2 = real::<T>(std::f64::consts::SQRT_2);
    let mut sigma1 = ComplexMatrix::zeros(3);
    sigma1[(0, 1)] = Complex::new(T::one(), T::zero());
    sigma1[(1, 2)] = Complex::new(sqrt2, T::zero());
    let mut sigma2 = ComplexMatrix::zeros(3);
    sigma2[(1, 1)] = Complex::new(T::one(), T::zero());
    sigma2[(2, 2)] = Complex::new(real(2.0), T::zero());
    let id = ComplexMatrix::identity(3);
    vec![
        CollapseChannel {
            operator: sigma1.kron(&id),
            rate: params.gamma1,
        },
        CollapseChannel {
            operator: sigma2.kron(&id),
            rate: params.gamma2,
        },
        CollapseChannel {
            operator: id.kron(&sigma1),
            rate: params.gamma1,
        },
        CollapseChannel {
            operator: id.kron(&sigma2),
            rate: params.gamma2,
        },
    ]
}

/// Open-system evolution of `rho0` under the full model; returns the final
/// state.
pub fn simulate_cphase<T: Real>(
    params: &TwoTransmonParams<T>,
    drive: &ModulationDrive<T>,
    rho0: &DensityOperator<T>,
    dt: T,
) -> Result<DensityOperator<T>> {
    let model = FullTwoTransmonModel::new(*params, drive);
    let grid = TimeGrid::from_max_dt(drive.tau(), dt)?;
    lindblad_final(&model, &two_transmon_collapse_channels(params), rho0, &grid)
}

/// Sampled trajectory variant of [`simulate_cphase`] for dynamics plots.
pub fn simulate_cphase_trajectory<T: Real>(
    params: &TwoTransmonParams<T>,
    drive: &ModulationDrive<T>,
    rho0: &DensityOperator<T>,
    dt: T,
) -> Result<LindbladTrajectory<T>> {
    let model = FullTwoTransmonModel::new(*params, drive);
    let grid = TimeGrid::from_max_dt(drive.tau(), dt)?;
    let stride = grid.steps().div_ceil(2000);
    propagate_lindblad_strided(
        &model,
        &two_transmon_collapse_channels(params),
        rho0,
        &grid,
        stride,
    )
}

/// Closed-system propagator of the full model (decoherence off).
pub fn cphase_propagator<T: Real>(
    params: &TwoTransmonParams<T>,
    drive: &ModulationDrive<T>,
    dt: T,
) -> Result<Propagator<T>> {
    let model = FullTwoTransmonModel::new(*params, drive);
    let grid = TimeGrid::from_max_dt(drive.tau(), dt)?;
    propagate_schrodinger(&model, &grid)
}

/// Quantum channel of the full open dynamics (81 basis trajectories, run in
/// parallel).
pub fn cphase_channel<T: Real>(
    params: &TwoTransmonParams<T>,
    drive: &ModulationDrive<T>,
    dt: T,
) -> Result<QuantumChannel<T>> {
    let model = FullTwoTransmonModel::new(*params, drive);
    let grid = TimeGrid::from_max_dt(drive.tau(), dt)?;
    evolve_channel_basis(&model, &two_transmon_collapse_channels(params), &grid, 9)
}

/// The ideal control-phase gate U₂(γ′) on the computational subspace
/// {|00⟩, |01⟩, |10⟩, |11⟩}.
pub fn u2_gate<T: Real>(gamma_prime: T) -> Propagator<T> {
    let mut m = ComplexMatrix::identity(4);
    m[(3, 3)] = Complex::new(gamma_prime.cos(), gamma_prime.sin());
    Propagator::from_matrix(m)
}

/// Two-qubit gate fidelity over separable inputs
/// (cos ϑ₁|0⟩ + sin ϑ₁|1⟩) ⊗ (cos ϑ₂|0⟩ + sin ϑ₂|1⟩), averaged on a
/// near-square grid of `samples` (ϑ₁, ϑ₂) pairs: an m×m uniform periodic grid
/// with m = ⌊√samples⌋ plus corner duplicates for the remainder (10001 →
/// 100×100 + 1; 10201 → exactly 101×101).
pub fn gate_fidelity_2q<T: Real>(
    channel: &QuantumChannel<T>,
    gamma_prime: T,
    samples: usize,
) -> Result<T> {
    if samples < 4 {
        return Err(Error::TooFewSamples {
            min: 4,
            got: samples,
        });
    }
    assert_eq!(channel.dim(), 9, "channel must act on the two-qutrit space");
    let m = (samples as f64).sqrt().floor() as usize;
    let extra = samples - m * m;
    let phase = Complex::new(gamma_prime.cos(), gamma_prime.sin());

    let eval = |t1: T, t2: T| -> T {
        let (c1, s1) = (t1.cos(), t1.sin());
        let (c2, s2) = (t2.cos(), t2.sin());
        let mut input = vec![Complex::<T>::new(T::zero(), T::zero()); 9];
        input[index_of(0, 0)] = Complex::new(c1 * c2, T::zero());
        input[index_of(0, 1)] = Complex::new(c1 * s2, T::zero());
        input[index_of(1, 0)] = Complex::new(s1 * c2, T::zero());
        input[index_of(1, 1)] = Complex::new(s1 * s2, T::zero());
        let mut ideal = input.clone();
        ideal[index_of(1, 1)] = ideal[index_of(1, 1)] * phase;
        channel.pure_state_fidelity(&input, &ideal)
    };

    let mut acc = T::zero();
    let mt = T::from_usize(m).unwrap();
    for i in 0..m {
        let t1 = T::TAU() * T::from_usize(i).unwrap() / mt;
        for j in 0..m {
            let t2 = T::TAU() * T::from_usize(j).unwrap() / mt;
            acc += eval(t1, t2);
        }
    }
    // Remainder: the (2π, 2π) corner, duplicated as needed.
    if extra > 0 {
        let corner = eval(T::TAU(), T::TAU());
        acc += corner * T::from_usize(extra).unwrap();
    }
    Ok(acc / T::from_usize(samples).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::two_pi_mhz;

    #[test]
    fn param_validation() {
        let p = TwoTransmonParams::<f64>::reference_device();
        assert!(p.rwa_warning().is_none());
        // ν must match Δ − α_A unless overridden.
        assert!(TwoTransmonParams::new(
            p.delta,
            p.alpha_a,
            p.alpha_b,
            p.g,
            p.nu * 1.01,
            p.gamma1,
            p.gamma2
        )
        .is_err());
        assert!(TwoTransmonParams::new_off_resonant(
            p.delta,
            p.alpha_a,
            p.alpha_b,
            p.g,
            p.nu * 1.01,
            p.gamma1,
            p.gamma2
        )
        .is_ok());
        // Strong coupling triggers the RWA warning.
        let strong = TwoTransmonParams::new_off_resonant(
            p.delta,
            p.alpha_a,
            p.alpha_b,
            two_pi_mhz(40.0),
            p.nu,
            p.gamma1,
            p.gamma2,
        )
        .unwrap();
        assert!(strong.rwa_warning().is_some());
    }

    #[test]
    fn zero_coupling_gives_zero_hamiltonian() {
        let mut p = TwoTransmonParams::<f64>::reference_device();
        p.g = f64::MIN_POSITIVE;
        let drive =
            ModulationDrive::new(vec![0.0, 1.0], vec![0.0, 0.0], vec![0.0, 0.0], p.nu).unwrap();
        let model = FullTwoTransmonModel::new(p, &drive);
        let mut h = ComplexMatrix::zeros(9);
        model.eval_into(0.5, &mut h);
        assert!(h.max_abs() < 1e-300);
    }

    #[test]
    fn coupling_structure_and_coefficients() {
        let p = TwoTransmonParams::<f64>::reference_device();
        let drive =
            ModulationDrive::new(vec![0.0, 1.0], vec![0.5, 0.5], vec![0.1, 0.1], p.nu).unwrap();
        let model = FullTwoTransmonModel::new(p, &drive);
        let mut h = ComplexMatrix::zeros(9);
        model.eval_into(0.0, &mut h);
        // ⟨20|H|11⟩ magnitude is √2 g.
        let v = h[(index_of(2, 0), index_of(1, 1))];
        assert!((v.norm() - std::f64::consts::SQRT_2 * p.g).abs() < 1e-12);
        // At t = 0 only the modulation phase remains: e^{−iF(0)}.
        let f0 = 0.5 * (0.1f64).sin();
        assert!((v.arg() - (-f0)).abs() < 1e-12);
        assert_eq!(h.hermiticity_defect(), 0.0);

        // Couplings stay within total-excitation blocks.
        let allowed = [
            (index_of(1, 0), index_of(0, 1)),
            (index_of(0, 1), index_of(1, 0)),
            (index_of(1, 1), index_of(0, 2)),
            (index_of(0, 2), index_of(1, 1)),
            (index_of(2, 0), index_of(1, 1)),
            (index_of(1, 1), index_of(2, 0)),
        ];
        for r in 0..9 {
            for c in 0..9 {
                if h[(r, c)].norm() > 0.0 {
                    assert!(allowed.contains(&(r, c)), "unexpected coupling ({r},{c})");
                }
            }
        }
    }

    #[test]
    fn one_shot_hamiltonian_checks_the_span() {
        let p = TwoTransmonParams::<f64>::reference_device();
        let drive =
            ModulationDrive::new(vec![0.0, 1.0], vec![0.3, 0.3], vec![0.0, 0.0], p.nu).unwrap();
        let h = full_hamiltonian(&p, &drive, 0.4).unwrap();
        assert_eq!(h.hermiticity_defect(), 0.0);
        assert!(full_hamiltonian(&p, &drive, -0.1).is_err());
        assert!(full_hamiltonian(&p, &drive, 1.5).is_err());
    }

    #[test]
    fn effective_hamiltonian_matches_drive_form() {
        let h = effective_hamiltonian(0.05f64, 0.7);
        let want = two_level_hamiltonian(0.05, 0.7);
        assert_eq!(h, want);
        assert!(effective_hamiltonian(0.0f64, 1.0).max_abs() < 1e-300);
    }

    #[test]
    fn lambda_envelope_shape() {
        let p = TwoTransmonParams::<f64>::reference_device();
        let built = build_cphase_drive(std::f64::consts::FRAC_PI_2, 250.0, &p).unwrap();
        // Peak g′ close to 2π×8 MHz.
        assert!((built.peak_g_eff - two_pi_mhz(8.0)).abs() < two_pi_mhz(0.2));
        // λ vanishes at the loop edges and at the segment boundary.
        let lam = built.drive.lambda();
        let n = lam.len();
        assert!(lam[0] < 1e-6 && lam[n - 1] < 1e-6 && lam[n / 2] < 1e-4);
        // Single lobe per half: one strict maximum inside each.
        for half in [&lam[..n / 2], &lam[n / 2..]] {
            let peaks = half
                .windows(3)
                .filter(|w| w[1] > w[0] && w[1] > w[2])
                .count();
            assert!(
                peaks <= 2,
                "expected a single-lobe envelope, found {peaks} local maxima"
            );
        }
    }

    #[test]
    fn branch_overflow_reports_tau() {
        let p = TwoTransmonParams::<f64>::reference_device();
        let err = build_cphase_drive(std::f64::consts::FRAC_PI_2, 100.0, &p).unwrap_err();
        assert!(matches!(err, Error::CphaseBranchOverflow { .. }));
    }

    #[test]
    fn identity_channel_perfect_for_zero_angle() {
        let ch = QuantumChannel::<f64>::identity(9);
        let f = gate_fidelity_2q(&ch, 0.0, 441).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
        assert!(gate_fidelity_2q(&ch, 0.0, 3).is_err());
    }
}
