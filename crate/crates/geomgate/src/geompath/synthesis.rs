//! Inverse engineering of the drive: from a path (χ, β, f) to the physical
//! envelope Ω(t) and phase φ(t).
//!
//! With ψ ≡ β + φ the constraints read Ω sin ψ = −χ̇ and Ω cos ψ = −β̇ tan χ
//! = (df/dχ) χ̇ sin χ, so Ω = |χ̇|·√(1 + (df/dχ)² sin²χ) ≥ 0 and ψ follows
//! from the two-argument arctangent. Where χ̇ = 0 the direction of travel
//! just inside the segment fixes the branch (the χ̇ factor cancels).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geompath::path::{EvolutionPath, PathDescriptor};
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::schrodinger::Hamiltonian;
use crate::real::{real, Real};

/// Sampled drive schedule on a uniform time grid over [0, τ] ns.
#[derive(Debug, Clone)]
pub struct PulseSchedule<T> {
    times: Vec<T>,
    omega: Vec<T>,
    phi: Vec<T>,
    tau: T,
    omega_max: T,
    segment_starts: Vec<usize>,
    descriptor: PathDescriptor,
}

impl<T: Real> PulseSchedule<T> {
    pub(crate) fn from_parts(
        times: Vec<T>,
        omega: Vec<T>,
        phi: Vec<T>,
        tau: T,
        omega_max: T,
        segment_starts: Vec<usize>,
        descriptor: PathDescriptor,
    ) -> Result<Self> {
        if times.len() != omega.len() || times.len() != phi.len() || times.len() < 2 {
            return Err(Error::GridMismatch {
                reason: "sample arrays disagree in length".into(),
            });
        }
        let bound = omega_max + real(1e-9);
        for (k, w) in omega.iter().enumerate() {
            if !w.is_finite() || !phi[k].is_finite() {
                return Err(Error::SynthesisNonFinite {
                    s: (T::from_usize(k).unwrap() / T::from_usize(times.len() - 1).unwrap())
                        .to_f64()
                        .unwrap_or(f64::NAN),
                });
            }
            if w.abs() > bound {
                return Err(Error::invalid_param(
                    "omega",
                    "sample exceeds the declared cap",
                ));
            }
        }
        Ok(Self {
            times,
            omega,
            phi,
            tau,
            omega_max,
            segment_starts,
            descriptor,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    #[inline]
    pub fn tau(&self) -> T {
        self.tau
    }

    /// Declared amplitude cap, rad/ns.
    #[inline]
    pub fn omega_max(&self) -> T {
        self.omega_max
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn omega(&self) -> &[T] {
        &self.omega
    }

    pub fn phi(&self) -> &[T] {
        &self.phi
    }

    pub fn segment_starts(&self) -> &[usize] {
        &self.segment_starts
    }

    pub fn descriptor(&self) -> &PathDescriptor {
        &self.descriptor
    }

    pub fn peak_omega(&self) -> T {
        self.omega.iter().fold(T::zero(), |m, w| m.max(w.abs()))
    }

    #[inline]
    fn locate(&self, t: T) -> Result<(usize, T)> {
        let tol = self.tau * real(1e-9) + real(1e-12);
        if t < -tol || t > self.tau + tol {
            return Err(Error::OutOfTimeRange {
                t_ns: t.to_f64().unwrap_or(f64::NAN),
                tau_ns: self.tau.to_f64().unwrap_or(f64::NAN),
            });
        }
        let h = self.tau / T::from_usize(self.len() - 1).unwrap();
        let x = (t / h).max(T::zero());
        let mut k = x.floor().to_usize().unwrap_or(0);
        if k >= self.len() - 1 {
            k = self.len() - 2;
        }
        let frac = (x - T::from_usize(k).unwrap()).max(T::zero()).min(T::one());
        Ok((k, frac))
    }

    /// Linearly interpolated Ω(t).
    pub fn omega_at(&self, t: T) -> Result<T> {
        let (k, frac) = self.locate(t)?;
        Ok(self.omega[k] + (self.omega[k + 1] - self.omega[k]) * frac)
    }

    /// Linearly interpolated φ(t).
    pub fn phi_at(&self, t: T) -> Result<T> {
        let (k, frac) = self.locate(t)?;
        Ok(self.phi[k] + (self.phi[k + 1] - self.phi[k]) * frac)
    }

    /// Scales every Ω sample (and the declared cap, when growing) by `factor`;
    /// φ and τ are untouched.
    pub fn scaled_amplitude(&self, factor: T) -> Self {
        let mut out = self.clone();
        for w in &mut out.omega {
            *w *= factor;
        }
        if factor.abs() > T::one() {
            out.omega_max *= factor.abs();
        }
        out
    }

    /// Two-level drive Hamiltonian source backed by this schedule.
    pub fn hamiltonian(&self) -> ScheduleHamiltonian<'_, T> {
        ScheduleHamiltonian { schedule: self }
    }
}

/// H_d(t) = ½ [[0, Ω e^{iφ}], [Ω e^{−iφ}, 0]].
pub fn two_level_hamiltonian<T: Real>(omega: T, phi: T) -> ComplexMatrix<T> {
    let mut h = ComplexMatrix::zeros(2);
    let half = real::<T>(0.5);
    let e = Complex::new(phi.cos(), phi.sin());
    h[(0, 1)] = e.scale(omega * half);
    h[(1, 0)] = h[(0, 1)].conj();
    h
}

/// Ideal two-level model of a schedule, for closed-system propagation.
pub struct ScheduleHamiltonian<'a, T> {
    schedule: &'a PulseSchedule<T>,
}

impl<T: Real> Hamiltonian<T> for ScheduleHamiltonian<'_, T> {
    fn dim(&self) -> usize {
        2
    }

    fn eval_into(&self, t: T, out: &mut ComplexMatrix<T>) {
        let omega = self.schedule.omega_at(t).expect("t within schedule span");
        let phi = self.schedule.phi_at(t).expect("t within schedule span");
        let half = real::<T>(0.5);
        let e = Complex::new(phi.cos(), phi.sin());
        out.set_zero();
        out[(0, 1)] = e.scale(omega * half);
        out[(1, 0)] = out[(0, 1)].conj();
    }
}

pub(crate) struct DimensionlessPulse<T> {
    pub s: Vec<T>,
    /// dΩ/ds-scale envelope (units 1/s of loop parameter).
    pub omega: Vec<T>,
    pub phi: Vec<T>,
    pub segment_starts: Vec<usize>,
    pub peak: T,
}

/// Envelope and phase on the dimensionless loop, before any time scaling.
pub(crate) fn synthesize_dimensionless<T: Real>(
    path: &EvolutionPath<T>,
    samples: usize,
) -> Result<DimensionlessPulse<T>> {
    if samples < 1000 {
        return Err(Error::TooFewSamples {
            min: 1000,
            got: samples,
        });
    }
    let n = if samples % 2 == 1 {
        samples
    } else {
        samples + 1
    };
    let sampling = path.sample(n);

    let chi_dot_scale = sampling
        .chi_dot
        .iter()
        .fold(T::zero(), |m, v| m.max(v.abs()));
    let dir_eps = chi_dot_scale * real(1e-9);

    // Direction of χ travel per sample; stationary points inherit it from the
    // nearest moving sample inside the same segment.
    let mut dir = vec![T::zero(); n];
    for (start, end) in sampling.segment_ranges() {
        let mut last = T::zero();
        for i in start..end {
            if sampling.chi_dot[i].abs() > dir_eps {
                last = sampling.chi_dot[i].signum();
            }
            dir[i] = last;
        }
        let mut next = T::zero();
        for i in (start..end).rev() {
            if sampling.chi_dot[i].abs() > dir_eps {
                next = sampling.chi_dot[i].signum();
            }
            if dir[i].is_zero() {
                dir[i] = next;
            }
        }
        for d in dir[start..end].iter_mut() {
            if d.is_zero() {
                *d = T::one(); // χ stationary over the whole segment: Ω ≡ 0, branch moot
            }
        }
    }

    let mut omega = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    for i in 0..n {
        let chi = sampling.chi[i];
        let proj = sampling.df_dchi[i] * chi.sin();
        let w = sampling.chi_dot[i].abs() * (T::one() + proj * proj).sqrt();
        let psi = (-dir[i]).atan2(dir[i] * proj);
        let ph = psi - sampling.beta[i];
        if !w.is_finite() || !ph.is_finite() {
            return Err(Error::SynthesisNonFinite {
                s: sampling.s[i].to_f64().unwrap_or(f64::NAN),
            });
        }
        omega.push(w);
        phi.push(ph);
    }

    // Unwrap φ within each segment; saltations stay at segment starts.
    let tau_round = T::TAU();
    for (start, end) in sampling.segment_ranges() {
        for i in (start + 1)..end {
            let delta = phi[i] - phi[i - 1];
            let wraps = (delta / tau_round).round();
            phi[i] -= wraps * tau_round;
        }
    }

    let peak = omega.iter().fold(T::zero(), |m, w| m.max(*w));
    if peak <= T::zero() {
        return Err(Error::SynthesisNonFinite { s: 0.0 });
    }
    Ok(DimensionlessPulse {
        s: sampling.s,
        omega,
        phi,
        segment_starts: sampling.segment_starts,
        peak,
    })
}

/// Inversely determines Ω(t), φ(t) on a uniform grid and rescales time so the
/// peak envelope equals `omega_max` (rad/ns); phases and the path itself are
/// invariant under this rescaling. Even `samples` are rounded up to odd so
/// the grid hits segment boundaries exactly.
pub fn synthesize_pulse<T: Real>(
    path: &EvolutionPath<T>,
    omega_max: T,
    samples: usize,
) -> Result<PulseSchedule<T>> {
    if !(omega_max > T::zero()) {
        return Err(Error::invalid_param(
            "omega_max",
            "amplitude cap must be positive",
        ));
    }
    let dp = synthesize_dimensionless(path, samples)?;
    let tau = dp.peak / omega_max;
    let times: Vec<T> = dp.s.iter().map(|&s| s * tau).collect();
    let omega: Vec<T> = dp.omega.iter().map(|&w| w / tau).collect();
    PulseSchedule::from_parts(
        times,
        omega,
        dp.phi,
        tau,
        omega_max,
        dp.segment_starts,
        path.descriptor().clone(),
    )
}

/// Finite-difference residuals of the three drive constraints
/// ḟ = −β̇/cos χ, χ̇ = −Ω sin(β+φ), β̇ = −Ω cot χ cos(β+φ), evaluated on the
/// schedule grid in rad/ns.
#[derive(Debug, Clone)]
pub struct ConstraintResiduals<T> {
    pub s: Vec<T>,
    pub f_residual: Vec<T>,
    pub chi_residual: Vec<T>,
    pub beta_residual: Vec<T>,
    /// Grid indices excluded (segment edges, χ ∈ {0, π} crossings).
    pub excluded: Vec<usize>,
}

impl<T: Real> ConstraintResiduals<T> {
    pub fn max_abs(&self) -> T {
        self.f_residual
            .iter()
            .chain(&self.chi_residual)
            .chain(&self.beta_residual)
            .fold(T::zero(), |m, r| m.max(r.abs()))
    }
}

/// Checks the synthesized schedule against the path it came from, by centered
/// finite differences on the sampled grid. Grid points adjacent to each
/// χ ∈ {0, π} crossing are excluded (the cot χ constraint is singular there),
/// as are segment edges where β and f jump.
pub fn constraint_residuals<T: Real>(
    schedule: &PulseSchedule<T>,
    path: &EvolutionPath<T>,
) -> Result<ConstraintResiduals<T>> {
    let n = schedule.len();
    let sampling = path.sample(n);
    // The schedule must actually be this path's synthesis output.
    let dp = synthesize_dimensionless(path, n)?;
    if dp.s.len() != n {
        return Err(Error::GridMismatch {
            reason: "sample counts differ".into(),
        });
    }
    let tau = schedule.tau();
    let mut worst = T::zero();
    for i in 0..n {
        let w = (dp.omega[i] / tau - schedule.omega()[i]).abs();
        worst = worst.max(w);
    }
    if worst > schedule.omega_max() * real(1e-6) {
        return Err(Error::GridMismatch {
            reason: "schedule was not synthesized from this path".into(),
        });
    }

    let h = tau / T::from_usize(n - 1).unwrap();
    let two_h = h + h;

    let mut excluded = vec![false; n];
    let ranges = sampling.segment_ranges();
    for &(start, end) in &ranges {
        excluded[start] = true;
        if start > 0 {
            excluded[start - 1] = true;
        }
        if start + 1 < n {
            excluded[start + 1] = true;
        }
        excluded[end - 1] = true;
        if end < n {
            excluded[end] = true;
        }
    }
    excluded[0] = true;
    excluded[n - 1] = true;
    // χ ∈ {0, π} crossings: local minima of sin χ close to zero.
    let crossing_tol = real::<T>(0.01);
    for i in 1..n - 1 {
        let s0 = sampling.chi[i].sin().abs();
        if s0 < crossing_tol
            && s0 <= sampling.chi[i - 1].sin().abs()
            && s0 <= sampling.chi[i + 1].sin().abs()
        {
            excluded[i - 1] = true;
            excluded[i] = true;
            excluded[i + 1] = true;
        }
    }
    // Equator: the first constraint divides by cos χ, which amplifies the
    // finite-difference error without bound as χ → π/2.
    let equator_tol = real::<T>(5e-3);
    for i in 0..n {
        if sampling.chi[i].cos().abs() < equator_tol {
            excluded[i] = true;
        }
    }

    let mut out = ConstraintResiduals {
        s: Vec::new(),
        f_residual: Vec::new(),
        chi_residual: Vec::new(),
        beta_residual: Vec::new(),
        excluded: excluded
            .iter()
            .enumerate()
            .filter_map(|(i, &e)| if e { Some(i) } else { None })
            .collect(),
    };

    for i in 1..n - 1 {
        if excluded[i] || excluded[i - 1] || excluded[i + 1] {
            continue;
        }
        let fd = |series: &[T]| (series[i + 1] - series[i - 1]) / two_h;
        let f_dot = fd(&sampling.f);
        let chi_dot = fd(&sampling.chi);
        let beta_dot = fd(&sampling.beta);
        let chi = sampling.chi[i];
        let omega = schedule.omega()[i];
        let angle = sampling.beta[i] + schedule.phi()[i];

        out.s.push(sampling.s[i]);
        out.f_residual.push(f_dot + beta_dot / chi.cos());
        out.chi_residual.push(chi_dot + omega * angle.sin());
        out.beta_residual
            .push(beta_dot + omega * (chi.cos() / chi.sin()) * angle.cos());
    }
    Ok(out)
}
