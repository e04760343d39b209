//! Density operators, collapse channels and state fidelity.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::qcore::eig::hermitian_eigenvalues;
use crate::qcore::matrix::ComplexMatrix;
use crate::real::{real, Real};

/// Validated density operator: Hermitian (1e-12), unit trace (1e-10),
/// eigenvalues ≥ −1e-8.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<T> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> DensityOperator<T> {
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        matrix.ensure_finite("density operator")?;
        let herm = matrix.hermiticity_defect();
        if herm > real(1e-12) {
            return Err(Error::InvalidDensity {
                reason: format!(
                    "hermiticity defect {:.3e}",
                    herm.to_f64().unwrap_or(f64::NAN)
                ),
            });
        }
        let tr = matrix.trace();
        let tr_dev = (tr - Complex::new(T::one(), T::zero())).norm();
        if tr_dev > real(1e-10) {
            return Err(Error::InvalidDensity {
                reason: format!(
                    "trace deviates from 1 by {:.3e}",
                    tr_dev.to_f64().unwrap_or(f64::NAN)
                ),
            });
        }
        let lambda_min = hermitian_eigenvalues(&matrix)[0];
        if lambda_min < -real::<T>(1e-8) {
            return Err(Error::InvalidDensity {
                reason: format!(
                    "negative eigenvalue {:.3e}",
                    lambda_min.to_f64().unwrap_or(f64::NAN)
                ),
            });
        }
        Ok(Self { matrix })
    }

    /// |ψ⟩⟨ψ| from a normalized state vector.
    pub fn pure(psi: &[Complex<T>]) -> Result<Self> {
        check_normalized(psi)?;
        let n = psi.len();
        let matrix = ComplexMatrix::from_fn(n, |i, j| psi[i] * psi[j].conj());
        Ok(Self { matrix })
    }

    /// |k⟩⟨k| on a `dim`-dimensional space.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut matrix = ComplexMatrix::zeros(dim);
        matrix[(k, k)] = Complex::new(T::one(), T::zero());
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let p = Complex::new(T::one() / T::from_usize(dim).unwrap(), T::zero());
        let matrix = ComplexMatrix::identity(dim).scale(p);
        Self { matrix }
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Population ⟨k|ρ|k⟩.
    pub fn population(&self, k: usize) -> T {
        self.matrix[(k, k)].re
    }
}

/// Jump operator together with its rate (rad/ns).
#[derive(Debug, Clone)]
pub struct CollapseChannel<T> {
    pub operator: ComplexMatrix<T>,
    pub rate: T,
}

impl<T: Real> CollapseChannel<T> {
    pub fn new(operator: ComplexMatrix<T>, rate: T) -> Result<Self> {
        if rate < T::zero() {
            return Err(Error::invalid_param(
                "rate",
                format!("must be nonnegative, got {:?}", rate.to_f64()),
            ));
        }
        operator.ensure_finite("collapse operator")?;
        Ok(Self { operator, rate })
    }
}

pub(crate) fn check_normalized<T: Real>(psi: &[Complex<T>]) -> Result<()> {
    let norm: T = psi.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    let dev = (norm - T::one()).abs();
    if dev > real(1e-8) {
        return Err(Error::UnnormalizedState {
            deviation: dev.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Zero-pads `psi` up to `dim` entries so subspace states can be compared
/// against larger systems.
pub fn embed_state<T: Real>(psi: &[Complex<T>], dim: usize) -> Vec<Complex<T>> {
    assert!(
        psi.len() <= dim,
        "state lives in a larger space than the operator"
    );
    let mut v = psi.to_vec();
    v.resize(dim, Complex::zero());
    v
}

/// ⟨ψ|ρ|ψ⟩ for a normalized pure state; `psi` may live in a subspace and is
/// embedded with zeros. Clamped to [0, 1].
pub fn state_fidelity<T: Real>(rho: &DensityOperator<T>, psi: &[Complex<T>]) -> Result<T> {
    check_normalized(psi)?;
    if psi.len() > rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: psi.len(),
        });
    }
    let v = embed_state(psi, rho.dim());
    let val = rho.matrix().sandwich(&v, &v);
    if val.im.abs() > real(1e-10) {
        return Err(Error::InvalidDensity {
            reason: format!(
                "fidelity has imaginary part {:.3e}",
                val.im.to_f64().unwrap_or(f64::NAN)
            ),
        });
    }
    Ok(val.re.max(T::zero()).min(T::one()))
}
