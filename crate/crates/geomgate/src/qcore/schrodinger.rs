//! Time-ordered propagation of the Schrödinger equation (ħ = 1).

use std::marker::PhantomData;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qcore::grid::TimeGrid;
use crate::qcore::matrix::ComplexMatrix;
use crate::real::{real, Real};

/// Source of the (Hermitian) Hamiltonian at a given time, in rad/ns.
///
/// Model structs implement `eval_into` writing entries in place so the
/// integrators never allocate in their inner loop.
pub trait Hamiltonian<T: Real> {
    fn dim(&self) -> usize;
    fn eval_into(&self, t: T, out: &mut ComplexMatrix<T>);
}

/// Adapter turning a plain closure `t → ComplexMatrix` into a [`Hamiltonian`].
pub struct MatrixFn<T, F> {
    dim: usize,
    f: F,
    _marker: PhantomData<T>,
}

impl<T: Real, F: Fn(T) -> ComplexMatrix<T>> MatrixFn<T, F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self {
            dim,
            f,
            _marker: PhantomData,
        }
    }
}

impl<T: Real, F: Fn(T) -> ComplexMatrix<T>> Hamiltonian<T> for MatrixFn<T, F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval_into(&self, t: T, out: &mut ComplexMatrix<T>) {
        let m = (self.f)(t);
        assert_eq!(m.dim(), self.dim, "hamiltonian changed dimension mid-run");
        out.copy_from(&m);
    }
}

/// Convenience constructor for [`MatrixFn`].
pub fn hamiltonian_fn<T: Real, F: Fn(T) -> ComplexMatrix<T>>(dim: usize, f: F) -> MatrixFn<T, F> {
    MatrixFn::new(dim, f)
}

/// Closed-system propagator U(t_end, t_start); unitary within 1e-8 when
/// produced by [`propagate_schrodinger`].
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator<T> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> Propagator<T> {
    pub fn from_matrix(matrix: ComplexMatrix<T>) -> Self {
        Self { matrix }
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn apply(&self, psi: &[Complex<T>]) -> Vec<Complex<T>> {
        self.matrix.apply(psi)
    }

    /// Composition: `self` first, `later` after.
    pub fn then(&self, later: &Propagator<T>) -> Propagator<T> {
        Propagator {
            matrix: later.matrix.mul(&self.matrix),
        }
    }

    pub fn unitarity_defect(&self) -> T {
        self.matrix.unitarity_defect()
    }
}

pub(crate) struct HermitianCheck<T> {
    tol: T,
}

impl<T: Real> HermitianCheck<T> {
    pub fn standard() -> Self {
        Self { tol: real(1e-10) }
    }

    pub fn check(&self, h: &ComplexMatrix<T>, t: T) -> Result<()> {
        if !h.is_finite() {
            return Err(Error::NonFinite {
                context: format!("hamiltonian at t = {} ns", t.to_f64().unwrap_or(f64::NAN)),
            });
        }
        let defect = h.hermiticity_defect();
        if defect > self.tol {
            return Err(Error::NonHermitian {
                asymmetry: defect.to_f64().unwrap_or(f64::NAN),
                t_ns: t.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }
}

/// Integrates U̇ = −i H(t) U with fixed-step fourth-order Runge–Kutta and
/// returns the time-ordered propagator over the grid span.
///
/// The Hamiltonian is validated (finite, Hermitian within 1e-10) at every
/// evaluation point.
pub fn propagate_schrodinger<T: Real>(
    hamiltonian: &impl Hamiltonian<T>,
    grid: &TimeGrid<T>,
) -> Result<Propagator<T>> {
    let dim = hamiltonian.dim();
    let check = HermitianCheck::standard();

    let mut u = ComplexMatrix::<T>::identity(dim);
    let mut h = ComplexMatrix::zeros(dim);
    let mut k1 = ComplexMatrix::zeros(dim);
    let mut k2 = ComplexMatrix::zeros(dim);
    let mut k3 = ComplexMatrix::zeros(dim);
    let mut k4 = ComplexMatrix::zeros(dim);
    let mut stage = ComplexMatrix::zeros(dim);

    let dt = grid.dt();
    let half = real::<T>(0.5);
    let two = real::<T>(2.0);
    let sixth = T::one() / real(6.0);

    for step in 0..grid.steps() {
        let t = grid.time_at(step);
        let tm = t + dt * half;
        let tp = t + dt;

        hamiltonian.eval_into(t, &mut h);
        check.check(&h, t)?;
        minus_i_h_mul(&h, &u, &mut k1);

        stage.copy_from(&u);
        stage.axpy(Complex::new(dt * half, T::zero()), &k1);
        hamiltonian.eval_into(tm, &mut h);
        check.check(&h, tm)?;
        minus_i_h_mul(&h, &stage, &mut k2);

        stage.copy_from(&u);
        stage.axpy(Complex::new(dt * half, T::zero()), &k2);
        minus_i_h_mul(&h, &stage, &mut k3);

        stage.copy_from(&u);
        stage.axpy(Complex::new(dt, T::zero()), &k3);
        hamiltonian.eval_into(tp, &mut h);
        check.check(&h, tp)?;
        minus_i_h_mul(&h, &stage, &mut k4);

        let w = Complex::new(dt * sixth, T::zero());
        for i in 0..u.data().len() {
            let incr = (k1.data()[i] + (k2.data()[i] + k3.data()[i]).scale(two) + k4.data()[i]) * w;
            u.data_mut()[i] = u.data()[i] + incr;
        }
    }

    u.ensure_finite("propagator")?;
    Ok(Propagator { matrix: u })
}

/// out = −i · h · u
fn minus_i_h_mul<T: Real>(h: &ComplexMatrix<T>, u: &ComplexMatrix<T>, out: &mut ComplexMatrix<T>) {
    h.mul_into(u, out);
    let minus_i = Complex::new(T::zero(), -T::one());
    for z in out.data_mut() {
        *z *= minus_i;
    }
}
