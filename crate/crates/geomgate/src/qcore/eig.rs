//! Hermitian eigenvalues via the cyclic Jacobi method.
//!
//! Plenty for the dim ≤ 9 matrices handled here; used to check numerical
//! positivity of density operators.

use num_complex::Complex;

use crate::qcore::matrix::ComplexMatrix;
use crate::real::{real, Real};

/// Eigenvalues of a Hermitian matrix, ascending. The input is symmetrized
/// first, so tiny numerical asymmetry is tolerated.
pub fn hermitian_eigenvalues<T: Real>(m: &ComplexMatrix<T>) -> Vec<T> {
    let n = m.dim();
    // Work on (M + M†)/2 to drop floating-point asymmetry.
    let half = Complex::new(real::<T>(0.5), T::zero());
    let mut a = m.add(&m.adjoint()).scale(half);

    let scale = a.max_abs().max(T::one());
    let tol = scale * real(1e-14);

    for _sweep in 0..60 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, p, q);
            }
        }
    }

    let mut vals: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    vals
}

/// One complex Jacobi rotation zeroing the (p, q) element.
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let g = a[(p, q)];
    let gn = g.norm();
    if gn <= T::epsilon() * real(1e2) {
        return;
    }
    let phase = g / Complex::new(gn, T::zero());
    let alpha = a[(p, p)].re;
    let beta = a[(q, q)].re;
    let tau = (beta - alpha) / (gn + gn);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    let n = a.dim();
    let cc = Complex::new(c, T::zero());
    let sp = phase.scale(s); // s·e^{iφ}
                             // Columns: col_p ← c·col_p − s e^{−iφ}·col_q ; col_q ← s e^{iφ}·col_p + c·col_q
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * cc - akq * sp.conj();
        a[(k, q)] = akp * sp + akq * cc;
    }
    // Rows: row_p ← c·row_p − s e^{iφ}·row_q ; row_q ← s e^{−iφ}·row_p + c·row_q
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * cc - aqk * sp;
        a[(q, k)] = apk * sp.conj() + aqk * cc;
    }
}
