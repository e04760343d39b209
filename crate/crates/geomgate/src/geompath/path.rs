//! Cyclic evolution paths (χ, β, f) on the dimensionless loop parameter
//! s ∈ [0, 1].
//!
//! A path is a contiguous list of segments. Within a segment the three angles
//! are smooth, tied together by β̇ = −ḟ cos χ; β is allowed to jump at segment
//! starts. State continuity then forces the parameterized phase f to jump by
//! −Δβ/cos χ at the same spot, which is where the geometric phase of the
//! realized gate comes from.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{real, Real};

pub type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// One smooth piece of the loop.
///
/// `beta_antideriv` is B(χ) with B′(χ) = −(df/dχ) cos χ, so the in-segment
/// β profile is B(χ(s)) − B(χ(s_start)); builders supply it in closed form.
#[derive(Clone)]
pub struct PathSegment<T> {
    pub s_start: T,
    pub s_end: T,
    pub beta_jump_at_start: T,
    chi: ScalarFn<T>,
    chi_dot: ScalarFn<T>,
    f_of_chi: ScalarFn<T>,
    df_dchi: ScalarFn<T>,
    beta_antideriv: ScalarFn<T>,
}

impl<T: Real> PathSegment<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        s_start: T,
        s_end: T,
        beta_jump_at_start: T,
        chi: ScalarFn<T>,
        chi_dot: ScalarFn<T>,
        f_of_chi: ScalarFn<T>,
        df_dchi: ScalarFn<T>,
        beta_antideriv: ScalarFn<T>,
    ) -> Self {
        Self {
            s_start,
            s_end,
            beta_jump_at_start,
            chi,
            chi_dot,
            f_of_chi,
            df_dchi,
            beta_antideriv,
        }
    }

    #[inline]
    pub fn chi(&self, s: T) -> T {
        (self.chi)(s)
    }

    #[inline]
    pub fn chi_dot(&self, s: T) -> T {
        (self.chi_dot)(s)
    }

    #[inline]
    pub fn f_of_chi(&self, chi: T) -> T {
        (self.f_of_chi)(chi)
    }

    #[inline]
    pub fn df_dchi(&self, chi: T) -> T {
        (self.df_dchi)(chi)
    }

    /// β(s) − β(s_start⁺), the smooth in-segment accumulation.
    #[inline]
    pub fn beta_rel(&self, s: T) -> T {
        (self.beta_antideriv)(self.chi(s)) - (self.beta_antideriv)(self.chi(self.s_start))
    }
}

impl<T: std::fmt::Debug> std::fmt::Debug for PathSegment<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PathSegment")
            .field("s_start", &self.s_start)
            .field("s_end", &self.s_end)
            .field("beta_jump_at_start", &self.beta_jump_at_start)
            .finish_non_exhaustive()
    }
}

/// Serializable summary of how a path was built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDescriptor {
    pub family: String,
    pub gamma_rad: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    pub chi0_rad: f64,
    pub beta0_rad: f64,
    pub segments: usize,
}

/// Cyclic evolution path with per-segment β saltations.
#[derive(Clone)]
pub struct EvolutionPath<T> {
    segments: Vec<PathSegment<T>>,
    chi0: T,
    beta0: T,
    gamma: T,
    /// β(s_start⁺) for each segment (jump applied).
    beta_offsets: Vec<T>,
    /// Additive offset of f within each segment (from the −Δβ/cos χ jumps).
    f_offsets: Vec<T>,
    descriptor: PathDescriptor,
}

impl<T> std::fmt::Debug for EvolutionPath<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EvolutionPath")
            .field("descriptor", &self.descriptor)
            .finish_non_exhaustive()
    }
}

impl<T: Real> EvolutionPath<T> {
    pub fn new(
        segments: Vec<PathSegment<T>>,
        chi0: T,
        beta0: T,
        gamma: T,
        descriptor: PathDescriptor,
    ) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::invalid_param(
                "segments",
                "path needs at least one segment",
            ));
        }
        let tol = real::<T>(1e-9);
        if segments[0].s_start.abs() > tol
            || (segments.last().unwrap().s_end - T::one()).abs() > tol
        {
            return Err(Error::invalid_param(
                "segments",
                "path must span s in [0, 1]",
            ));
        }
        for w in segments.windows(2) {
            if (w[0].s_end - w[1].s_start).abs() > tol {
                return Err(Error::invalid_param(
                    "segments",
                    "segments must be contiguous",
                ));
            }
            let boundary_chi_gap = (w[0].chi(w[0].s_end) - w[1].chi(w[1].s_start)).abs();
            if boundary_chi_gap > tol {
                return Err(Error::invalid_param(
                    "segments",
                    "chi must be continuous at boundaries",
                ));
            }
        }
        let first_chi = segments[0].chi(T::zero());
        let last_chi = segments.last().unwrap().chi(T::one());
        if (first_chi - last_chi).abs() > tol {
            return Err(Error::invalid_param(
                "segments",
                "path must be cyclic: chi(1) = chi(0)",
            ));
        }
        if (first_chi - chi0).abs() > tol {
            return Err(Error::invalid_param(
                "chi0",
                "declared chi0 disagrees with chi(0)",
            ));
        }

        // Accumulate the β and f bookkeeping across jumps.
        let mut beta_offsets = Vec::with_capacity(segments.len());
        let mut f_offsets = Vec::with_capacity(segments.len());
        let mut beta_carry = beta0;
        let mut f_carry = T::zero();
        for (j, seg) in segments.iter().enumerate() {
            let chi_b = seg.chi(seg.s_start);
            let jump = seg.beta_jump_at_start;
            if !jump.is_zero() {
                let c = chi_b.cos();
                if c.abs() < tol {
                    return Err(Error::DivergentIntegrand {
                        s: seg.s_start.to_f64().unwrap_or(f64::NAN),
                    });
                }
                beta_carry += jump;
                f_carry -= jump / c;
            }
            if j > 0 {
                // Formula continuity correction (zero for the built-in families).
                let prev = &segments[j - 1];
                f_carry += prev.f_of_chi(chi_b) - seg.f_of_chi(chi_b);
            }
            beta_offsets.push(beta_carry);
            f_offsets.push(f_carry);
            beta_carry += seg.beta_rel(seg.s_end);
        }

        Ok(Self {
            segments,
            chi0,
            beta0,
            gamma,
            beta_offsets,
            f_offsets,
            descriptor,
        })
    }

    #[inline]
    pub fn segments(&self) -> &[PathSegment<T>] {
        &self.segments
    }

    #[inline]
    pub fn chi0(&self) -> T {
        self.chi0
    }

    #[inline]
    pub fn beta0(&self) -> T {
        self.beta0
    }

    /// Target rotation angle γ declared at construction.
    #[inline]
    pub fn gamma(&self) -> T {
        self.gamma
    }

    #[inline]
    pub fn descriptor(&self) -> &PathDescriptor {
        &self.descriptor
    }

    /// Segment owning `s`; boundary points belong to the later segment.
    pub fn segment_index(&self, s: T) -> usize {
        for j in (0..self.segments.len()).rev() {
            if s >= self.segments[j].s_start {
                return j;
            }
        }
        0
    }

    pub fn chi(&self, s: T) -> T {
        let seg = &self.segments[self.segment_index(s)];
        seg.chi(s)
    }

    pub fn chi_dot(&self, s: T) -> T {
        let seg = &self.segments[self.segment_index(s)];
        seg.chi_dot(s)
    }

    pub fn beta(&self, s: T) -> T {
        let j = self.segment_index(s);
        self.beta_offsets[j] + self.segments[j].beta_rel(s)
    }

    pub fn f(&self, s: T) -> T {
        let j = self.segment_index(s);
        let seg = &self.segments[j];
        seg.f_of_chi(seg.chi(s)) + self.f_offsets[j]
    }

    pub fn df_dchi_at(&self, s: T) -> T {
        let seg = &self.segments[self.segment_index(s)];
        seg.df_dchi(seg.chi(s))
    }

    /// β̇(s) = −(df/dχ) χ̇ cos χ.
    pub fn beta_dot(&self, s: T) -> T {
        let seg = &self.segments[self.segment_index(s)];
        let chi = seg.chi(s);
        -seg.df_dchi(chi) * seg.chi_dot(s) * chi.cos()
    }

    /// Uniformly samples the whole loop at `n` points (n ≥ 2), tagging where
    /// each segment begins.
    pub fn sample(&self, n: usize) -> PathSampling<T> {
        assert!(n >= 2);
        let nm1 = T::from_usize(n - 1).unwrap();
        let mut s = Vec::with_capacity(n);
        let mut chi = Vec::with_capacity(n);
        let mut chi_dot = Vec::with_capacity(n);
        let mut beta = Vec::with_capacity(n);
        let mut f = Vec::with_capacity(n);
        let mut df = Vec::with_capacity(n);
        let mut seg_of = Vec::with_capacity(n);
        for i in 0..n {
            let si = T::from_usize(i).unwrap() / nm1;
            let j = self.segment_index(si);
            let seg = &self.segments[j];
            let c = seg.chi(si);
            s.push(si);
            chi.push(c);
            chi_dot.push(seg.chi_dot(si));
            beta.push(self.beta_offsets[j] + seg.beta_rel(si));
            f.push(seg.f_of_chi(c) + self.f_offsets[j]);
            df.push(seg.df_dchi(c));
            seg_of.push(j);
        }
        let mut segment_starts = vec![0usize];
        for i in 1..n {
            if seg_of[i] != seg_of[i - 1] {
                segment_starts.push(i);
            }
        }
        PathSampling {
            s,
            chi,
            chi_dot,
            beta,
            f,
            df_dchi: df,
            segment_starts,
        }
    }
}

/// Uniform sampling of a path; produced by [`EvolutionPath::sample`].
#[derive(Debug, Clone)]
pub struct PathSampling<T> {
    pub s: Vec<T>,
    pub chi: Vec<T>,
    pub chi_dot: Vec<T>,
    pub beta: Vec<T>,
    pub f: Vec<T>,
    pub df_dchi: Vec<T>,
    /// Index of the first sample of each segment, ascending.
    pub segment_starts: Vec<usize>,
}

impl<T: Real> PathSampling<T> {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Half-open sample ranges, one per segment.
    pub fn segment_ranges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.segment_starts.len());
        for (k, &start) in self.segment_starts.iter().enumerate() {
            let end = self
                .segment_starts
                .get(k + 1)
                .copied()
                .unwrap_or(self.len());
            out.push((start, end));
        }
        out
    }
}

fn check_gamma<T: Real>(gamma: T) -> Result<()> {
    if gamma <= -T::PI() - real(1e-12) || gamma > T::PI() + real(1e-12) {
        return Err(Error::invalid_param(
            "gamma",
            "rotation angle must lie in (-pi, pi]",
        ));
    }
    Ok(())
}

fn check_eta<T: Real>(eta: T) -> Result<()> {
    if eta < T::zero() {
        return Err(Error::invalid_param(
            "eta",
            "path-gauge strength must be nonnegative",
        ));
    }
    Ok(())
}

/// Four-segment loop realizing the rotation e^{iγ n⃗·σ⃗} with
/// n⃗ = x̂ (χ₀ = π/2, β₀ = 0): χ = π[1 ± sin²(2πs)]/2 with f(χ) = cos(2χ)/5,
/// and β saltations −γ at s = 1/4 and +γ at s = 3/4.
pub fn build_x_rotation_path<T: Real>(gamma: T) -> Result<EvolutionPath<T>> {
    check_gamma(gamma)?;
    let pi = T::PI();
    let half = real::<T>(0.5);
    let two = real::<T>(2.0);
    let fifth = real::<T>(0.2);

    let chi_up: ScalarFn<T> = Arc::new(move |s: T| {
        let w = (two * pi * s).sin();
        pi * half * (T::one() + w * w)
    });
    let chi_up_dot: ScalarFn<T> = Arc::new(move |s: T| pi * pi * (real::<T>(4.0) * pi * s).sin());
    let chi_dn: ScalarFn<T> = Arc::new(move |s: T| {
        let w = (two * pi * s).sin();
        pi * half * (T::one() - w * w)
    });
    let chi_dn_dot: ScalarFn<T> = Arc::new(move |s: T| -pi * pi * (real::<T>(4.0) * pi * s).sin());

    let f: ScalarFn<T> = Arc::new(move |chi: T| (two * chi).cos() * fifth);
    let df: ScalarFn<T> = Arc::new(move |chi: T| -two * fifth * (two * chi).sin());
    // B(χ) with B' = −(df/dχ) cos χ = (4/5) sin χ cos²χ  →  B = −(4/15) cos³χ.
    let b: ScalarFn<T> = Arc::new(move |chi: T| {
        let c = chi.cos();
        -real::<T>(4.0 / 15.0) * c * c * c
    });

    let quarter = real::<T>(0.25);
    let mk = |j: usize, jump: T, chi: &ScalarFn<T>, chi_dot: &ScalarFn<T>| {
        PathSegment::new(
            quarter * T::from_usize(j).unwrap(),
            quarter * T::from_usize(j + 1).unwrap(),
            jump,
            chi.clone(),
            chi_dot.clone(),
            f.clone(),
            df.clone(),
            b.clone(),
        )
    };
    let segments = vec![
        mk(0, T::zero(), &chi_up, &chi_up_dot),
        mk(1, -gamma, &chi_up, &chi_up_dot),
        mk(2, T::zero(), &chi_dn, &chi_dn_dot),
        mk(3, gamma, &chi_dn, &chi_dn_dot),
    ];
    let descriptor = PathDescriptor {
        family: "x-rotation".to_string(),
        gamma_rad: gamma.to_f64().unwrap_or(f64::NAN),
        eta: None,
        chi0_rad: std::f64::consts::FRAC_PI_2,
        beta0_rad: 0.0,
        segments: 4,
    };
    EvolutionPath::new(segments, pi * half, T::zero(), gamma, descriptor)
}

/// Two-segment loop realizing e^{iγ σ_z} (χ₀ = 0, β₀ = 0): χ = π sin²(πs)
/// with the optimal-control gauge f(χ) = η[2χ − sin 2χ] and a single β
/// saltation −γ at s = 1/2. η = 1/5 reproduces the reference Phase-gate
/// construction; η = 0 the conventional scheme.
pub fn build_z_rotation_path<T: Real>(gamma: T, eta: T) -> Result<EvolutionPath<T>> {
    check_gamma(gamma)?;
    check_eta(eta)?;
    let pi = T::PI();
    let two = real::<T>(2.0);

    let chi: ScalarFn<T> = Arc::new(move |s: T| {
        let w = (pi * s).sin();
        pi * w * w
    });
    let chi_dot: ScalarFn<T> = Arc::new(move |s: T| pi * pi * (two * pi * s).sin());
    let f: ScalarFn<T> = Arc::new(move |c: T| eta * (two * c - (two * c).sin()));
    let df: ScalarFn<T> = Arc::new(move |c: T| two * eta * (T::one() - (two * c).cos()));
    // B' = −(df/dχ) cos χ = −4η sin²χ cos χ  →  B = −(4η/3) sin³χ.
    let b: ScalarFn<T> = Arc::new(move |c: T| {
        let s = c.sin();
        -real::<T>(4.0 / 3.0) * eta * s * s * s
    });

    let half = real::<T>(0.5);
    let segments = vec![
        PathSegment::new(
            T::zero(),
            half,
            T::zero(),
            chi.clone(),
            chi_dot.clone(),
            f.clone(),
            df.clone(),
            b.clone(),
        ),
        PathSegment::new(half, T::one(), -gamma, chi, chi_dot, f, df, b),
    ];
    let descriptor = PathDescriptor {
        family: "z-rotation".to_string(),
        gamma_rad: gamma.to_f64().unwrap_or(f64::NAN),
        eta: Some(eta.to_f64().unwrap_or(f64::NAN)),
        chi0_rad: 0.0,
        beta0_rad: 0.0,
        segments: 2,
    };
    EvolutionPath::new(segments, T::zero(), T::zero(), gamma, descriptor)
}

/// Generalized single-loop builder for an arbitrary axis (χ₀, β₀): χ sweeps
/// χ₀ → π → χ₀ → 0 → χ₀ in four sin²-eased quarters with the η-gauge, and β
/// saltates by −γ at χ = π and +γ at χ = 0 (the two poles are the only spots
/// where a saltation leaves the state continuous and β still closes the
/// loop). χ₀ = π/2 with f-gauge cos(2χ)/5 is the X-rotation construction.
pub fn build_single_loop_path<T: Real>(
    chi0: T,
    beta0: T,
    gamma: T,
    eta: T,
) -> Result<EvolutionPath<T>> {
    check_gamma(gamma)?;
    check_eta(eta)?;
    let pi = T::PI();
    if chi0 < T::zero() || chi0 >= pi - real(1e-6) {
        return Err(Error::invalid_param(
            "chi0",
            "initial polar angle must lie in [0, pi)",
        ));
    }
    let up = pi - chi0;
    let two = real::<T>(2.0);

    let chi_hi: ScalarFn<T> = Arc::new(move |s: T| {
        let w = (two * pi * s).sin();
        chi0 + up * w * w
    });
    let chi_hi_dot: ScalarFn<T> =
        Arc::new(move |s: T| up * two * pi * (two * pi * s).sin() * (two * pi * s).cos() * two);
    let chi_lo: ScalarFn<T> = Arc::new(move |s: T| {
        let w = (two * pi * s).sin();
        chi0 * (T::one() - w * w)
    });
    let chi_lo_dot: ScalarFn<T> =
        Arc::new(move |s: T| -chi0 * two * pi * (two * pi * s).sin() * (two * pi * s).cos() * two);

    let f: ScalarFn<T> = Arc::new(move |c: T| eta * (two * c - (two * c).sin()));
    let df: ScalarFn<T> = Arc::new(move |c: T| two * eta * (T::one() - (two * c).cos()));
    // B' = −(df/dχ) cos χ = −4η sin²χ cos χ  →  B = −(4η/3) sin³χ.
    let b: ScalarFn<T> = Arc::new(move |c: T| {
        let s = c.sin();
        -real::<T>(4.0 / 3.0) * eta * s * s * s
    });

    let quarter = real::<T>(0.25);
    let mk = |j: usize, jump: T, chi: &ScalarFn<T>, chi_dot: &ScalarFn<T>| {
        PathSegment::new(
            quarter * T::from_usize(j).unwrap(),
            quarter * T::from_usize(j + 1).unwrap(),
            jump,
            chi.clone(),
            chi_dot.clone(),
            f.clone(),
            df.clone(),
            b.clone(),
        )
    };
    let segments = vec![
        mk(0, T::zero(), &chi_hi, &chi_hi_dot),
        mk(1, -gamma, &chi_hi, &chi_hi_dot),
        mk(2, T::zero(), &chi_lo, &chi_lo_dot),
        mk(3, gamma, &chi_lo, &chi_lo_dot),
    ];
    let descriptor = PathDescriptor {
        family: "single-loop".to_string(),
        gamma_rad: gamma.to_f64().unwrap_or(f64::NAN),
        eta: Some(eta.to_f64().unwrap_or(f64::NAN)),
        chi0_rad: chi0.to_f64().unwrap_or(f64::NAN),
        beta0_rad: beta0.to_f64().unwrap_or(f64::NAN),
        segments: 4,
    };
    EvolutionPath::new(segments, chi0, beta0, gamma, descriptor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_path_is_cyclic_and_continuous() {
        let p = build_x_rotation_path(std::f64::consts::FRAC_PI_2).unwrap();
        assert!((p.chi(0.0) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((p.chi(1.0) - p.chi(0.0)).abs() < 1e-12);
        // χ hits π at s = 1/4 and 0 at s = 3/4.
        assert!((p.chi(0.25) - std::f64::consts::PI).abs() < 1e-12);
        assert!(p.chi(0.75).abs() < 1e-12);
    }

    #[test]
    fn x_path_beta_is_cyclic() {
        // The two ±γ saltations cancel and the smooth parts retrace.
        let p = build_x_rotation_path(1.1f64).unwrap();
        assert!(p.beta(0.0).abs() < 1e-12);
        assert!((p.beta(1.0) - 0.0).abs() < 1e-10);
    }

    #[test]
    fn z_path_beta_jump_bookkeeping() {
        let gamma = -std::f64::consts::FRAC_PI_8;
        let p = build_z_rotation_path(gamma, 0.2).unwrap();
        // β(τ/2⁻) = 0 (sin³χ vanishes at both ends), β(τ/2⁺) = −γ.
        assert!(p.beta(0.4999999).abs() < 1e-5);
        assert!((p.beta(0.5) - (-gamma)).abs() < 1e-10);
        assert!((p.beta(1.0) - (-gamma)).abs() < 1e-10);
        // f picks up −Δβ/cos χ = −γ at the jump, so f(1) = −γ.
        assert!((p.f(1.0) + gamma).abs() < 1e-10);
    }

    #[test]
    fn beta_consistency_with_numeric_integration() {
        // Stored β must agree with integrating β̇ = −ḟ cos χ.
        let p = build_z_rotation_path(0.7, 0.2).unwrap();
        let n = 20_001;
        let h = 1.0 / (n - 1) as f64;
        let mut beta_num = 0.0;
        let mut worst: f64 = 0.0;
        for i in 0..n - 1 {
            let s0 = i as f64 * h;
            let s1 = s0 + h;
            // Simpson over the step, with the saltation landing at s = 1/2.
            let m = 0.5 * (s0 + s1);
            beta_num += h / 6.0 * (p.beta_dot(s0) + 4.0 * p.beta_dot(m) + p.beta_dot(s1));
            if (s1 - 0.5).abs() < h / 2.0 {
                beta_num += -p.gamma();
            }
            worst = worst.max((beta_num - p.beta(s1)).abs());
        }
        assert!(worst < 1e-6, "beta mismatch {worst}");
    }

    #[test]
    fn rejects_out_of_range_gamma() {
        assert!(build_x_rotation_path(4.0).is_err());
        assert!(build_z_rotation_path(-3.5, 0.2).is_err());
        assert!(build_z_rotation_path(0.5, -0.1).is_err());
    }

    #[test]
    fn sampling_tags_segments() {
        let p = build_x_rotation_path(0.5).unwrap();
        let s = p.sample(8001);
        assert_eq!(s.segment_starts, vec![0, 2000, 4000, 6000]);
        assert_eq!(s.segment_ranges().len(), 4);
    }
}
