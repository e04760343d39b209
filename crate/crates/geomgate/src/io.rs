//! Plot-ready CSV and JSON emission for schedules, trajectories, sweeps and
//! modulation drives.
//!
//! All numeric columns are written with a fixed 12-digit scientific format so
//! repeated runs produce byte-identical files.

use std::fmt::Write as _;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::geompath::synthesis::PulseSchedule;
use crate::octrobust::SweepResult;
use crate::qcore::density::embed_state;
use crate::qcore::lindblad::LindbladTrajectory;
use crate::real::Real;
use crate::twoq::model::{index_of, ModulationDrive};
use crate::twoq::CphaseDrive;

fn num(x: impl Real) -> String {
    format!("{:.12e}", x.to_f64().unwrap_or(f64::NAN))
}

/// `t_ns,omega_rad_per_ns,phi_rad`
pub fn schedule_to_csv<T: Real>(schedule: &PulseSchedule<T>) -> String {
    let mut out = String::from("t_ns,omega_rad_per_ns,phi_rad\n");
    for k in 0..schedule.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            num(schedule.times()[k]),
            num(schedule.omega()[k]),
            num(schedule.phi()[k])
        );
    }
    out
}

/// Metadata envelope accompanying a schedule CSV.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScheduleEnvelope {
    pub tau_ns: f64,
    pub omega_max_rad_per_ns: f64,
    pub samples: usize,
    pub path: crate::geompath::PathDescriptor,
}

pub fn schedule_envelope<T: Real>(schedule: &PulseSchedule<T>) -> ScheduleEnvelope {
    ScheduleEnvelope {
        tau_ns: schedule.tau().to_f64().unwrap_or(f64::NAN),
        omega_max_rad_per_ns: schedule.omega_max().to_f64().unwrap_or(f64::NAN),
        samples: schedule.len(),
        path: schedule.descriptor().clone(),
    }
}

/// Sample indices thinned to at most ~2000 plot rows, endpoints kept.
fn plot_indices(n: usize) -> impl Iterator<Item = usize> {
    let stride = if n > 1 { (n - 1).div_ceil(1999) } else { 1 };
    (0..n).filter(move |&k| k % stride == 0 || k == n - 1)
}

/// `t_ns,p0,p1,p2,fidelity` — populations of the qutrit levels plus fidelity
/// against the supplied ideal final state (embedded with zeros); rows are
/// thinned to at most ~2000 for plotting.
pub fn trajectory_to_csv<T: Real>(
    traj: &LindbladTrajectory<T>,
    ideal_final: &[Complex<T>],
) -> String {
    let mut out = String::from("t_ns,p0,p1,p2,fidelity\n");
    for k in plot_indices(traj.times.len()) {
        let (t, rho) = (traj.times[k], &traj.states[k]);
        let phi = embed_state(ideal_final, rho.dim());
        let f = rho.matrix().sandwich(&phi, &phi).re;
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(t),
            num(rho.population(0)),
            num(rho.population(1)),
            num(rho.population(2)),
            num(f)
        );
    }
    out
}

/// Sweep matrix: first row the Γ values, first column the ε values, body the
/// fidelities.
pub fn sweep_to_csv<T: Real>(result: &SweepResult<T>) -> String {
    let mut out = String::from("epsilon_vs_gamma_rad_per_ns");
    for g in &result.gamma_values {
        let _ = write!(out, ",{}", num(*g));
    }
    out.push('\n');
    for (i, e) in result.epsilon_values.iter().enumerate() {
        let _ = write!(out, "{}", num(*e));
        for j in 0..result.gamma_values.len() {
            let _ = write!(out, ",{}", num(result.fidelity[i][j]));
        }
        out.push('\n');
    }
    out
}

/// `t_ns,lambda,phi2_rad,g_eff_rad_per_ns`
pub fn drive_to_csv<T: Real>(built: &CphaseDrive<T>) -> String {
    let mut out = String::from("t_ns,lambda,phi2_rad,g_eff_rad_per_ns\n");
    let drive: &ModulationDrive<T> = &built.drive;
    for k in 0..drive.times().len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            num(drive.times()[k]),
            num(drive.lambda()[k]),
            num(drive.phi2()[k]),
            num(built.schedule.omega()[k])
        );
    }
    out
}

/// Two-qubit dynamics: computational populations, the |20⟩/|02⟩ leakage
/// levels, and fidelity against the supplied ideal final state.
pub fn trajectory2q_to_csv<T: Real>(
    traj: &LindbladTrajectory<T>,
    ideal_final: &[Complex<T>],
) -> String {
    let mut out = String::from("t_ns,p00,p01,p10,p11,p02,p20,fidelity\n");
    for k in plot_indices(traj.times.len()) {
        let (t, rho) = (traj.times[k], &traj.states[k]);
        let phi = embed_state(ideal_final, rho.dim());
        let f = rho.matrix().sandwich(&phi, &phi).re;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            num(t),
            num(rho.population(index_of(0, 0))),
            num(rho.population(index_of(0, 1))),
            num(rho.population(index_of(1, 0))),
            num(rho.population(index_of(1, 1))),
            num(rho.population(index_of(0, 2))),
            num(rho.population(index_of(2, 0))),
            num(f)
        );
    }
    out
}
