//! Fixed-step RK4 integrator for the Lindblad master equation
//!
//!   ρ̇ = i[ρ, H(t)] + Σ_k Γ_k ( A_k ρ A_k† − ½{A_k†A_k, ρ} ).
//!
//! Collapse operators are prepared once per run: the jump term uses the
//! nonzero entries of A only, and {A†A, ρ} takes an elementwise path when
//! A†A is diagonal (true for transmon decay and dephasing operators).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qcore::density::{CollapseChannel, DensityOperator};
use crate::qcore::grid::TimeGrid;
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::schrodinger::{Hamiltonian, HermitianCheck};
use crate::real::{real, Real};

/// Sampled open-system trajectory; endpoints always included.
#[derive(Debug, Clone)]
pub struct LindbladTrajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<DensityOperator<T>>,
}

impl<T: Real> LindbladTrajectory<T> {
    pub fn final_state(&self) -> &DensityOperator<T> {
        self.states
            .last()
            .expect("trajectory holds at least the endpoints")
    }
}

enum Anticommutator<T> {
    /// A†A is diagonal with these (real) entries.
    Diagonal(Vec<T>),
    Dense(ComplexMatrix<T>),
}

struct PreparedChannel<T> {
    rate: T,
    /// Nonzero entries (row, col, value) of A.
    jumps: Vec<(usize, usize, Complex<T>)>,
    aa: Anticommutator<T>,
}

fn prepare_channels<T: Real>(
    channels: &[CollapseChannel<T>],
    dim: usize,
) -> Result<Vec<PreparedChannel<T>>> {
    let mut prepared = Vec::new();
    for ch in channels {
        if ch.operator.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: ch.operator.dim(),
            });
        }
        if ch.rate < T::zero() {
            return Err(Error::invalid_param("rate", "must be nonnegative"));
        }
        if ch.rate.is_zero() {
            continue;
        }
        let mut jumps = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                let v = ch.operator[(i, j)];
                if !(v.re.is_zero() && v.im.is_zero()) {
                    jumps.push((i, j, v));
                }
            }
        }
        let b = ch.operator.adjoint().mul(&ch.operator);
        let mut off_diag = T::zero();
        for i in 0..dim {
            for j in 0..dim {
                if i != j {
                    off_diag = off_diag.max(b[(i, j)].norm());
                }
            }
        }
        let aa = if off_diag.is_zero() {
            Anticommutator::Diagonal((0..dim).map(|i| b[(i, i)].re).collect())
        } else {
            Anticommutator::Dense(b)
        };
        prepared.push(PreparedChannel {
            rate: ch.rate,
            jumps,
            aa,
        });
    }
    Ok(prepared)
}

struct Workspace<T> {
    h: ComplexMatrix<T>,
    k: [ComplexMatrix<T>; 4],
    stage: ComplexMatrix<T>,
    tmp: ComplexMatrix<T>,
    tmp2: ComplexMatrix<T>,
}

impl<T: Real> Workspace<T> {
    fn new(dim: usize) -> Self {
        let z = || ComplexMatrix::zeros(dim);
        Self {
            h: z(),
            k: [z(), z(), z(), z()],
            stage: z(),
            tmp: z(),
            tmp2: z(),
        }
    }
}

/// out = i[ρ, H] + dissipators(ρ)
fn lindblad_rhs<T: Real>(
    h: &ComplexMatrix<T>,
    rho: &ComplexMatrix<T>,
    channels: &[PreparedChannel<T>],
    out: &mut ComplexMatrix<T>,
    tmp: &mut ComplexMatrix<T>,
    tmp2: &mut ComplexMatrix<T>,
) {
    let n = rho.dim();
    rho.mul_into(h, tmp); // tmp = ρH
    h.mul_into(rho, out); // out = Hρ
    let eye = Complex::new(T::zero(), T::one());
    for (o, t) in out.data_mut().iter_mut().zip(tmp.data()) {
        *o = eye * (*t - *o);
    }

    let half = real::<T>(0.5);
    for ch in channels {
        let g = ch.rate;
        // Jump term: Γ A ρ A†, accumulated from the nonzeros of A.
        for &(r1, c1, a1) in &ch.jumps {
            for &(r2, c2, a2) in &ch.jumps {
                let w = a1 * a2.conj() * rho[(c1, c2)];
                out[(r1, r2)] += w.scale(g);
            }
        }
        // Anticommutator: −Γ/2 {A†A, ρ}.
        match &ch.aa {
            Anticommutator::Diagonal(d) => {
                let gh = g * half;
                for i in 0..n {
                    for j in 0..n {
                        let w = gh * (d[i] + d[j]);
                        out[(i, j)] -= rho[(i, j)].scale(w);
                    }
                }
            }
            Anticommutator::Dense(b) => {
                b.mul_into(rho, tmp2);
                let gh = g * half;
                for (o, t) in out.data_mut().iter_mut().zip(tmp2.data()) {
                    *o -= t.scale(gh);
                }
                rho.mul_into(b, tmp2);
                for (o, t) in out.data_mut().iter_mut().zip(tmp2.data()) {
                    *o -= t.scale(gh);
                }
            }
        }
    }
}

fn run<T: Real>(
    hamiltonian: &impl Hamiltonian<T>,
    channels: &[CollapseChannel<T>],
    rho0: &DensityOperator<T>,
    grid: &TimeGrid<T>,
    sample_stride: usize,
    keep_samples: bool,
) -> Result<LindbladTrajectory<T>> {
    let dim = rho0.dim();
    if hamiltonian.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: hamiltonian.dim(),
        });
    }
    let prepared = prepare_channels(channels, dim)?;
    let check = HermitianCheck::standard();

    let mut ws = Workspace::new(dim);
    let mut rho = rho0.matrix().clone();

    let stride = sample_stride.max(1);
    let mut times = Vec::new();
    let mut states = Vec::new();
    if keep_samples {
        times.push(grid.t_start());
        states.push(rho0.clone());
    }

    let dt = grid.dt();
    let half = real::<T>(0.5);
    let two = real::<T>(2.0);
    let sixth = T::one() / real(6.0);
    let drift_limit = real::<T>(1e-6);

    for step in 0..grid.steps() {
        let t = grid.time_at(step);
        let tm = t + dt * half;
        let tp = t + dt;

        hamiltonian.eval_into(t, &mut ws.h);
        check.check(&ws.h, t)?;
        lindblad_rhs(
            &ws.h,
            &rho,
            &prepared,
            &mut ws.k[0],
            &mut ws.tmp,
            &mut ws.tmp2,
        );

        ws.stage.copy_from(&rho);
        ws.stage.axpy(Complex::new(dt * half, T::zero()), &ws.k[0]);
        hamiltonian.eval_into(tm, &mut ws.h);
        check.check(&ws.h, tm)?;
        lindblad_rhs(
            &ws.h,
            &ws.stage,
            &prepared,
            &mut ws.k[1],
            &mut ws.tmp,
            &mut ws.tmp2,
        );

        ws.stage.copy_from(&rho);
        ws.stage.axpy(Complex::new(dt * half, T::zero()), &ws.k[1]);
        lindblad_rhs(
            &ws.h,
            &ws.stage,
            &prepared,
            &mut ws.k[2],
            &mut ws.tmp,
            &mut ws.tmp2,
        );

        ws.stage.copy_from(&rho);
        ws.stage.axpy(Complex::new(dt, T::zero()), &ws.k[2]);
        hamiltonian.eval_into(tp, &mut ws.h);
        check.check(&ws.h, tp)?;
        lindblad_rhs(
            &ws.h,
            &ws.stage,
            &prepared,
            &mut ws.k[3],
            &mut ws.tmp,
            &mut ws.tmp2,
        );

        let w = Complex::new(dt * sixth, T::zero());
        for i in 0..rho.data().len() {
            let incr = (ws.k[0].data()[i]
                + (ws.k[1].data()[i] + ws.k[2].data()[i]).scale(two)
                + ws.k[3].data()[i])
                * w;
            rho.data_mut()[i] = rho.data()[i] + incr;
        }

        let drift = (rho.trace() - Complex::new(T::one(), T::zero())).norm();
        if drift > drift_limit {
            return Err(Error::TraceDrift {
                drift: drift.to_f64().unwrap_or(f64::NAN),
                t_ns: tp.to_f64().unwrap_or(f64::NAN),
            });
        }
        // RK4 preserves the trace of this equation identically, so a blown-up
        // state can keep tr = 1; catch it by magnitude.
        let magnitude = rho.max_abs();
        if magnitude > real(1e2) {
            return Err(Error::StepSizeFailure {
                magnitude: magnitude.to_f64().unwrap_or(f64::NAN),
                t_ns: tp.to_f64().unwrap_or(f64::NAN),
            });
        }

        let is_last = step + 1 == grid.steps();
        if (keep_samples && (step + 1) % stride == 0 && !is_last) || is_last {
            times.push(tp);
            states.push(DensityOperator::new(rho.clone())?);
        }
    }

    Ok(LindbladTrajectory { times, states })
}

/// Integrates the master equation and returns a sampled trajectory including
/// both endpoints. The sampling stride is chosen so at most ~2000 interior
/// points are kept; use [`propagate_lindblad_strided`] to control it.
pub fn propagate_lindblad<T: Real>(
    hamiltonian: &impl Hamiltonian<T>,
    channels: &[CollapseChannel<T>],
    rho0: &DensityOperator<T>,
    grid: &TimeGrid<T>,
) -> Result<LindbladTrajectory<T>> {
    let stride = grid.steps().div_ceil(2000);
    run(hamiltonian, channels, rho0, grid, stride, true)
}

/// As [`propagate_lindblad`] with an explicit sampling stride (in steps).
pub fn propagate_lindblad_strided<T: Real>(
    hamiltonian: &impl Hamiltonian<T>,
    channels: &[CollapseChannel<T>],
    rho0: &DensityOperator<T>,
    grid: &TimeGrid<T>,
    stride: usize,
) -> Result<LindbladTrajectory<T>> {
    run(hamiltonian, channels, rho0, grid, stride, true)
}

/// Integrates and returns only the final density operator.
pub fn lindblad_final<T: Real>(
    hamiltonian: &impl Hamiltonian<T>,
    channels: &[CollapseChannel<T>],
    rho0: &DensityOperator<T>,
    grid: &TimeGrid<T>,
) -> Result<DensityOperator<T>> {
    let traj = run(hamiltonian, channels, rho0, grid, grid.steps(), false)?;
    Ok(traj
        .states
        .into_iter()
        .next_back()
        .expect("final state recorded"))
}
