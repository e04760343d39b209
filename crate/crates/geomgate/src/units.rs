//! Unit conversions.
//!
//! All energies, drive amplitudes and decay rates are handled internally in
//! rad/ns (with ħ = 1, so 1 rad/ns = 1 GHz angular frequency). Device
//! constants are usually quoted as 2π × frequency; these helpers do the
//! conversion once at the boundary so no 2π ambiguity leaks inside.

use crate::real::{real, Real};

/// 2π × `f` MHz expressed in rad/ns. Example: 2π × 16 MHz → 0.100531 rad/ns.
#[inline]
pub fn two_pi_mhz<T: Real>(f: T) -> T {
    T::TAU() * f * real(1e-3)
}

/// 2π × `f` kHz expressed in rad/ns.
#[inline]
pub fn two_pi_khz<T: Real>(f: T) -> T {
    T::TAU() * f * real(1e-6)
}

/// Inverse of [`two_pi_mhz`], for reporting.
#[inline]
pub fn to_two_pi_mhz<T: Real>(omega: T) -> T {
    omega / (T::TAU() * real(1e-3))
}
