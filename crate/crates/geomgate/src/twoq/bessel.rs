//! Bessel function J₁ and its numerical inverse on the first monotone branch.
//!
//! The parametric modulation F(t) = λ sin(νt + φ) turns the static coupling g
//! into an effective 2√2 g J₁(λ); pulse design needs λ(t) = J₁⁻¹ of the
//! requested coupling, which only makes sense on the rising branch of J₁ up
//! to its first maximum at λ ≈ 1.8412.

use crate::error::{Error, Result};
use crate::real::{real, Real};

const MAX_ARG: f64 = 20.0;

/// J₁(x) for |x| ≤ 20, accurate to 1e-12 in f64: alternating power series for
/// |x| ≤ 4, Miller backward recurrence beyond.
pub fn bessel_j1<T: Real>(x: T) -> Result<T> {
    if !x.is_finite() || x.abs() > real(MAX_ARG) {
        return Err(Error::BesselOutOfRange {
            x: x.to_f64().unwrap_or(f64::NAN),
            max: MAX_ARG,
        });
    }
    let ax = x.abs();
    let val = if ax <= real(4.0) {
        j1_series(ax)
    } else {
        j1_recurrence(ax)
    };
    Ok(if x < T::zero() { -val } else { val })
}

/// Σ (−1)^m (x/2)^{2m+1} / (m!(m+1)!)
fn j1_series<T: Real>(x: T) -> T {
    let half_x = x * real(0.5);
    let q = -half_x * half_x;
    let mut term = half_x;
    let mut sum = term;
    let mut m = T::one();
    loop {
        term = term * q / (m * (m + T::one()));
        sum += term;
        if term.abs() < real::<T>(1e-18) * sum.abs().max(real(1e-18)) {
            break;
        }
        m += T::one();
        if m > real(200.0) {
            break;
        }
    }
    sum
}

/// Miller's algorithm: downward recurrence J_{n−1} = (2n/x) J_n − J_{n+1}
/// normalized by J₀ + 2ΣJ_{2k} = 1. Start order comfortably above x.
fn j1_recurrence<T: Real>(x: T) -> T {
    let start = 2 * ((x.to_f64().unwrap_or(MAX_ARG) as usize + 30) / 2) + 30;
    let mut jp = T::zero(); // J_{n+1}
    let mut jc = real::<T>(1e-30); // J_n (arbitrary seed)
    let mut j1 = T::zero();
    let mut norm = T::zero();
    for n in (1..=start).rev() {
        let jm = real::<T>(2.0) * T::from_usize(n).unwrap() / x * jc - jp;
        jp = jc;
        jc = jm;
        if n - 1 == 1 {
            j1 = jc;
        }
        if (n - 1) % 2 == 0 {
            norm += if n - 1 == 0 { jc } else { jc + jc };
        }
        // Rescale to dodge overflow of the unnormalized recurrence.
        if jc.abs() > real(1e20) {
            let s = real::<T>(1e-20);
            jc *= s;
            jp *= s;
            j1 *= s;
            norm *= s;
        }
    }
    j1 / norm
}

/// J₀(x) by its power series (used only on the branch, |x| ≲ 2.5).
fn j0_series<T: Real>(x: T) -> T {
    let q = -x * x * real(0.25);
    let mut term = T::one();
    let mut sum = term;
    let mut m = T::one();
    loop {
        term = term * q / (m * m);
        sum += term;
        if term.abs() < real(1e-18) {
            break;
        }
        m += T::one();
        if m > real(200.0) {
            break;
        }
    }
    sum
}

/// Location and value of the first maximum of J₁: (λ*, J₁(λ*)); the usable
/// inversion branch is [0, λ*].
pub fn j1_branch_max<T: Real>() -> (T, T) {
    // J₁'(x) = J₀(x) − J₁(x)/x, strictly decreasing through its root here.
    let dj1 = |x: T| j0_series(x) - j1_series(x) / x;
    let mut lo = real::<T>(1.7);
    let mut hi = real::<T>(2.0);
    for _ in 0..200 {
        let mid = (lo + hi) * real(0.5);
        if dj1(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < real(1e-16) {
            break;
        }
    }
    let lambda_star = (lo + hi) * real(0.5);
    (lambda_star, j1_series(lambda_star))
}

/// λ ∈ [0, λ*] with J₁(λ) = y, by bisection on the monotone branch;
/// round-trip accurate to 1e-10.
pub fn invert_j1<T: Real>(y: T) -> Result<T> {
    let (lambda_star, y_max) = j1_branch_max::<T>();
    invert_j1_with_branch(y, lambda_star, y_max)
}

pub(crate) fn invert_j1_with_branch<T: Real>(y: T, lambda_star: T, y_max: T) -> Result<T> {
    if y < T::zero() || y > y_max + real(1e-12) {
        return Err(Error::J1BranchOverflow {
            y: y.to_f64().unwrap_or(f64::NAN),
            max: y_max.to_f64().unwrap_or(f64::NAN),
        });
    }
    if y <= T::zero() {
        return Ok(T::zero());
    }
    if y >= y_max {
        return Ok(lambda_star);
    }
    let mut lo = T::zero();
    let mut hi = lambda_star;
    for _ in 0..200 {
        let mid = (lo + hi) * real(0.5);
        let v = j1_series(mid);
        if (v - y).abs() <= real(1e-14) {
            return Ok(mid);
        }
        if v < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < real(1e-16) {
            break;
        }
    }
    Ok((lo + hi) * real(0.5))
}
