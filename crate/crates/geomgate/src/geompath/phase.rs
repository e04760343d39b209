//! Phase accounting for cyclic evolutions: dynamical phase, geometric phase,
//! and the target unitary a path is meant to realize.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geompath::path::EvolutionPath;
use crate::geompath::synthesis::PulseSchedule;
use crate::qcore::grid::TimeGrid;
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::schrodinger::{propagate_schrodinger, Hamiltonian, Propagator};
use crate::quad::adaptive_simpson;
use crate::real::{real, Real};

/// e^{iγ n⃗·σ⃗} with n⃗ = (sin χ₀ cos β₀, sin χ₀ sin β₀, cos χ₀): the rotation
/// a cyclic path starting at (χ₀, β₀) with accumulated phase γ realizes.
pub fn target_gate<T: Real>(chi0: T, beta0: T, gamma: T) -> Propagator<T> {
    let (cg, sg) = (gamma.cos(), gamma.sin());
    let (cx, sx) = (chi0.cos(), chi0.sin());
    let mut m = ComplexMatrix::zeros(2);
    m[(0, 0)] = Complex::new(cg, cx * sg);
    m[(1, 1)] = Complex::new(cg, -cx * sg);
    let off = Complex::new(T::zero(), sg * sx);
    let eb = Complex::new(beta0.cos(), beta0.sin());
    m[(0, 1)] = off * eb.conj();
    m[(1, 0)] = off * eb;
    Propagator::from_matrix(m)
}

/// Initial state of the parameterized evolution,
/// [cos(χ₀/2) e^{−iβ₀/2}, sin(χ₀/2) e^{iβ₀/2}].
pub fn initial_state<T: Real>(chi0: T, beta0: T) -> Vec<Complex<T>> {
    let half = real::<T>(0.5);
    let hb = beta0 * half;
    let eb = Complex::new(hb.cos(), -hb.sin());
    vec![
        eb.scale((chi0 * half).cos()),
        eb.conj().scale((chi0 * half).sin()),
    ]
}

const QUAD_TOL: f64 = 1e-11;

/// Dynamical phase ½ ∮ β̇ sin²χ / cos χ dt plus ½ Δβ sin²χ/cos χ at each β
/// saltation. The smooth integrand is evaluated in the pole-free form
/// −½ (df/dχ) χ̇ sin²χ (β̇ = −ḟ cos χ cancels the cos χ); time-rescale
/// invariant, so it is integrated over the loop parameter directly.
pub fn dynamical_phase<T: Real>(path: &EvolutionPath<T>) -> Result<T> {
    let mut total = T::zero();
    let half = real::<T>(0.5);
    for seg in path.segments() {
        let integrand = |s: T| {
            let chi = seg.chi(s);
            let sin = chi.sin();
            -half * seg.df_dchi(chi) * seg.chi_dot(s) * sin * sin
        };
        total += adaptive_simpson(integrand, seg.s_start, seg.s_end, real(QUAD_TOL))?;
        let jump = seg.beta_jump_at_start;
        if !jump.is_zero() {
            let chi_b = seg.chi(seg.s_start);
            let (sinb, cosb) = (chi_b.sin(), chi_b.cos());
            if cosb.abs() < real(1e-9) {
                if sinb * sinb * jump.abs() > real::<T>(1e-12) {
                    return Err(Error::DivergentIntegrand {
                        s: seg.s_start.to_f64().unwrap_or(f64::NAN),
                    });
                }
            } else if sinb.abs() > real(1e-12) {
                // Saltations at the poles (sin χ = 0) contribute exactly zero.
                total += half * jump * sinb * sinb / cosb;
            }
        }
    }
    Ok(total)
}

/// The geometric-phase line integral ½ ∮ β̇ cos χ dt (plus ½ Δβ cos χ jump
/// terms), taken literally in the path's own gauge. For a path whose β does
/// not return to β(0) this differs from the gauge-closed geometric phase of
/// [`phase_decomposition`]; both are exposed deliberately.
pub fn geometric_phase_line_integral<T: Real>(path: &EvolutionPath<T>) -> Result<T> {
    let mut total = T::zero();
    let half = real::<T>(0.5);
    for seg in path.segments() {
        let integrand = |s: T| {
            let chi = seg.chi(s);
            let c = chi.cos();
            -half * seg.df_dchi(chi) * seg.chi_dot(s) * c * c
        };
        total += adaptive_simpson(integrand, seg.s_start, seg.s_end, real(QUAD_TOL))?;
        let jump = seg.beta_jump_at_start;
        if !jump.is_zero() {
            total += half * jump * seg.chi(seg.s_start).cos();
        }
    }
    Ok(total)
}

/// Cyclic-phase decomposition, all in rad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDecomposition<T> {
    /// Total phase picked up by the initial state over the loop.
    pub total: T,
    /// Dynamical part (zero by construction for the built-in paths).
    pub dynamical: T,
    /// Geometric part in the gauge-closed (Aharonov–Anandan) sense:
    /// total − dynamical.
    pub geometric: T,
}

fn wrap_angle<T: Real>(x: T) -> T {
    let tau = T::TAU();
    let mut y = x % tau;
    if y > T::PI() {
        y -= tau;
    }
    if y <= -T::PI() {
        y += tau;
    }
    y
}

/// Extracts the total cyclic phase from the ideal two-level propagator of the
/// schedule — U(τ)|ψ(0)⟩ = e^{i·total}|ψ(0)⟩ — and splits off the dynamical
/// part. Errors if the evolution is not cyclic (|ψ(0)⟩ fails to be an
/// eigenvector within 1e-6) or if the total disagrees with the path's
/// declared rotation angle.
pub fn phase_decomposition<T: Real>(
    path: &EvolutionPath<T>,
    schedule: &PulseSchedule<T>,
) -> Result<PhaseDecomposition<T>> {
    let u = ideal_propagator(schedule, real(0.01))?;
    let psi0 = initial_state(path.chi0(), path.beta0());
    let upsi = u.apply(&psi0);
    let overlap = psi0
        .iter()
        .zip(&upsi)
        .fold(Complex::<T>::new(T::zero(), T::zero()), |s, (a, b)| {
            s + a.conj() * *b
        });
    // Eigenvector residual ‖Uψ − ⟨ψ|Uψ⟩ψ‖.
    let defect = psi0
        .iter()
        .zip(&upsi)
        .map(|(a, b)| (*b - overlap * *a).norm_sqr())
        .sum::<T>()
        .sqrt();
    if defect > real(1e-6) {
        return Err(Error::NonCyclic {
            defect: defect.to_f64().unwrap_or(f64::NAN),
        });
    }
    let total = overlap.im.atan2(overlap.re);
    let mismatch = wrap_angle(total - path.gamma()).abs();
    if mismatch > real(1e-6) {
        return Err(Error::PhaseMismatch {
            total: total.to_f64().unwrap_or(f64::NAN),
            expected: path.gamma().to_f64().unwrap_or(f64::NAN),
        });
    }
    let dynamical = dynamical_phase(path)?;
    Ok(PhaseDecomposition {
        total,
        dynamical,
        geometric: total - dynamical,
    })
}

/// Ideal two-level propagator of a schedule (RK4, step ≤ `max_dt` ns).
pub fn ideal_propagator<T: Real>(schedule: &PulseSchedule<T>, max_dt: T) -> Result<Propagator<T>> {
    let grid = TimeGrid::from_max_dt(schedule.tau(), max_dt)?;
    propagate_schrodinger(&schedule.hamiltonian(), &grid)
}

/// Exact drive of a path evaluated straight from its closures on the
/// dimensionless loop parameter (no sampled envelope in between). The gate is
/// invariant under time rescaling, so the loop is propagated over s ∈ [0, 1].
pub struct LoopDrive<'a, T> {
    path: &'a EvolutionPath<T>,
}

impl<T: Real> Hamiltonian<T> for LoopDrive<'_, T> {
    fn dim(&self) -> usize {
        2
    }

    fn eval_into(&self, s: T, out: &mut ComplexMatrix<T>) {
        let s = s.max(T::zero()).min(T::one());
        let path = self.path;
        let j = path.segment_index(s);
        let seg = &path.segments()[j];
        let chi = seg.chi(s);
        let chi_dot = seg.chi_dot(s);
        let df = seg.df_dchi(chi);
        let proj = df * chi.sin();
        let omega = chi_dot.abs() * (T::one() + proj * proj).sqrt();
        // Branch direction: sign of χ̇, probed just inside the segment where
        // χ is momentarily stationary.
        let tiny = real::<T>(1e-9);
        let mut dir = chi_dot;
        if dir.abs() < tiny {
            let probe = real::<T>(1e-6);
            let inward = if s + probe <= seg.s_end {
                s + probe
            } else {
                s - probe
            };
            dir = seg.chi_dot(inward);
        }
        let sigma = if dir >= T::zero() {
            T::one()
        } else {
            -T::one()
        };
        let psi = (-sigma).atan2(sigma * proj);
        let beta = path.beta(s);
        let phi = psi - beta;

        let half = real::<T>(0.5);
        let e = Complex::new(phi.cos(), phi.sin());
        out.set_zero();
        out[(0, 1)] = e.scale(omega * half);
        out[(1, 0)] = out[(0, 1)].conj();
    }
}

/// Propagator of the exact loop drive over s ∈ [0, 1]; `steps` RK4 steps
/// (the dimensionless envelope peaks near 10–41 for the built-in families, so
/// 20 000 steps leave only roundoff).
pub fn ideal_loop_propagator<T: Real>(
    path: &EvolutionPath<T>,
    steps: usize,
) -> Result<Propagator<T>> {
    let grid = TimeGrid::new(T::zero(), T::one(), steps.max(1))?;
    propagate_schrodinger(&LoopDrive { path }, &grid)
}
