//! Uniform integration grids.

use crate::error::{Error, Result};
use crate::real::Real;

/// Uniform time grid over [t_start, t_end] ns with `steps` RK4 steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T> {
    t_start: T,
    t_end: T,
    steps: usize,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(t_start: T, t_end: T, steps: usize) -> Result<Self> {
        if !(t_end > t_start) {
            return Err(Error::invalid_param("t_end", "must exceed t_start"));
        }
        if steps == 0 {
            return Err(Error::invalid_param("steps", "must be positive"));
        }
        Ok(Self {
            t_start,
            t_end,
            steps,
        })
    }

    /// Grid over [0, tau] with step size at most `max_dt`.
    pub fn from_max_dt(tau: T, max_dt: T) -> Result<Self> {
        if !(max_dt > T::zero()) {
            return Err(Error::invalid_param("max_dt", "must be positive"));
        }
        let steps = (tau / max_dt).ceil().to_usize().unwrap_or(0).max(1);
        Self::new(T::zero(), tau, steps)
    }

    #[inline]
    pub fn t_start(&self) -> T {
        self.t_start
    }

    #[inline]
    pub fn t_end(&self) -> T {
        self.t_end
    }

    #[inline]
    pub fn steps(&self) -> usize {
        self.steps
    }

    #[inline]
    pub fn dt(&self) -> T {
        (self.t_end - self.t_start) / T::from_usize(self.steps).unwrap()
    }

    /// Time at step index `k` (k = 0..=steps).
    #[inline]
    pub fn time_at(&self, k: usize) -> T {
        self.t_start + self.dt() * T::from_usize(k).unwrap()
    }

    /// Same span, twice the steps; for convergence checks.
    pub fn refined(&self) -> Self {
        Self {
            t_start: self.t_start,
            t_end: self.t_end,
            steps: self.steps * 2,
        }
    }
}
