//! Adaptive Simpson quadrature for smooth 1-D integrands.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{real, Real};

const MAX_DEPTH: usize = 48;

fn simpson<T: Real>(fa: T, fm: T, fb: T, h: T) -> T {
    h / real::<T>(6.0) * (fa + real::<T>(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<T: Real>(
    f: &impl Fn(T) -> T,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: usize,
) -> Result<T> {
    let m = (a + b) * real(0.5);
    let lm = (a + m) * real(0.5);
    let rm = (m + b) * real(0.5);
    let flm = f(lm);
    let frm = f(rm);
    if !flm.is_finite() || !frm.is_finite() {
        return Err(Error::DivergentIntegrand {
            s: lm.to_f64().unwrap_or(f64::NAN),
        });
    }
    let h = m - a;
    let left = simpson(fa, flm, fm, h);
    let right = simpson(fm, frm, fb, h);
    let delta = left + right - whole;
    if delta.abs() <= real::<T>(15.0) * tol || (b - a).abs() < real(1e-14) {
        return Ok(left + right + delta / real(15.0));
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureNonConvergence);
    }
    let half_tol = tol * real(0.5);
    let l = recurse(f, a, m, fa, flm, fm, left, half_tol, depth + 1)?;
    let r = recurse(f, m, b, fm, frm, fb, right, half_tol, depth + 1)?;
    Ok(l + r)
}

/// ∫_a^b f(x) dx to absolute tolerance `tol`.
pub fn adaptive_simpson<T: Real>(f: impl Fn(T) -> T, a: T, b: T, tol: T) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    let m = (a + b) * real(0.5);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    if !fa.is_finite() || !fm.is_finite() || !fb.is_finite() {
        return Err(Error::DivergentIntegrand {
            s: a.to_f64().unwrap_or(f64::NAN),
        });
    }
    let whole = simpson(fa, fm, fb, b - a);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 0)
}

/// Complex-valued integrand, integrated componentwise.
pub fn adaptive_simpson_complex<T: Real>(
    f: impl Fn(T) -> Complex<T> + Copy,
    a: T,
    b: T,
    tol: T,
) -> Result<Complex<T>> {
    let re = adaptive_simpson(move |x| f(x).re, a, b, tol)?;
    let im = adaptive_simpson(move |x| f(x).im, a, b, tol)?;
    Ok(Complex::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_sin() {
        let v = adaptive_simpson(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn integrates_polynomial_exactly() {
        let v = adaptive_simpson(|x: f64| 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_divergent() {
        let r = adaptive_simpson(|x: f64| 1.0 / x, 0.0, 1.0, 1e-10);
        assert!(r.is_err());
    }
}
