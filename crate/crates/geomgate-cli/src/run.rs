//! Scenario execution: everything is computed in memory first; files are
//! written only after the whole scenario succeeded.

use num_complex::Complex64 as C64;

use geomgate::geompath::{
    build_x_rotation_path, build_z_rotation_path, constraint_residuals, phase_decomposition,
    synthesize_pulse, target_gate, EvolutionPath, PulseSchedule,
};
use geomgate::io;
use geomgate::octrobust::{
    apply_error, robustness_sweep, RobustnessSpec, SweepGrid, SystematicError,
};
use geomgate::qcore::{DensityOperator, QuantumChannel};
use geomgate::transmon1q::{gate_channel, gate_fidelity_1q, simulate_gate_with_dt};
use geomgate::twoq::{
    build_cphase_drive, cphase_channel, cphase_propagator, gate_fidelity_2q, index_of,
    simulate_cphase_trajectory,
};
use geomgate::units::to_two_pi_mhz;

use crate::config::{Family, Kind, Scenario};
use crate::report::{FidelityReport, SolverMeta};

/// A fully computed scenario, ready to be persisted.
pub struct Outputs {
    pub files: Vec<(String, String)>,
    pub report: FidelityReport,
    pub summary: Vec<String>,
}

pub fn execute(scenario: &Scenario) -> Result<Outputs, geomgate::Error> {
    match scenario.kind {
        Kind::PulseSynthesis => run_pulse_synthesis(scenario),
        Kind::SingleQubitGate => run_single_qubit(scenario),
        Kind::RobustnessSweep => run_sweep(scenario),
        Kind::TwoQubitCphase => run_cphase(scenario),
    }
}

fn scenario_echo(scenario: &Scenario) -> serde_json::Value {
    serde_json::to_value(scenario).expect("scenario serializes")
}

pub fn build_path(scenario: &Scenario) -> Result<EvolutionPath<f64>, geomgate::Error> {
    let gate = scenario.gate.as_ref().expect("validated");
    match gate.family {
        Family::XRotation => build_x_rotation_path(gate.gamma_rad),
        Family::ZRotation => build_z_rotation_path(gate.gamma_rad, gate.eta.unwrap_or(0.2)),
    }
}

fn synthesize(
    scenario: &Scenario,
) -> Result<(EvolutionPath<f64>, PulseSchedule<f64>), geomgate::Error> {
    let path = build_path(scenario)?;
    let params = scenario.device_params().expect("validated");
    let schedule = synthesize_pulse(&path, params.omega_max, scenario.samples())?;
    Ok((path, schedule))
}

fn run_pulse_synthesis(scenario: &Scenario) -> Result<Outputs, geomgate::Error> {
    let (path, schedule) = synthesize(scenario)?;
    let phases = phase_decomposition(&path, &schedule)?;
    let residual = constraint_residuals(&schedule, &path)?.max_abs();

    let mut report = FidelityReport::new(scenario_echo(scenario));
    report.tau_ns = schedule.tau();
    report.peak_amplitude_rad_per_ns = schedule.peak_omega();
    report.phase_total_rad = Some(phases.total);
    report.phase_dynamical_rad = Some(phases.dynamical);
    report.phase_geometric_rad = Some(phases.geometric);
    report.solver = SolverMeta {
        dt_ns: 0.01,
        steps: 0,
        samples: schedule.len(),
        theta_samples: None,
    };
    report
        .extras
        .insert("constraint_residual_max".into(), residual.into());
    if path.gamma().abs() < 1e-12 {
        report
            .warnings
            .push("gamma = 0: the synthesized loop realizes the identity".into());
    }

    let summary = vec![
        format!("tau = {:.4} ns", schedule.tau()),
        format!(
            "phases: total = {:+.6} rad, dynamical = {:+.2e} rad, geometric = {:+.6} rad",
            phases.total, phases.dynamical, phases.geometric
        ),
    ];
    Ok(Outputs {
        files: vec![
            ("pulse.csv".into(), io::schedule_to_csv(&schedule)),
            (
                "pulse.json".into(),
                serde_json::to_string_pretty(&io::schedule_envelope(&schedule)).unwrap(),
            ),
        ],
        report,
        summary,
    })
}

fn run_single_qubit(scenario: &Scenario) -> Result<Outputs, geomgate::Error> {
    let (path, schedule) = synthesize(scenario)?;
    let params = scenario.device_params().expect("validated");
    let drag = scenario.drag_config();
    let dt = scenario.dt_ns(geomgate::DEFAULT_DT_1Q);
    let phases = phase_decomposition(&path, &schedule)?;

    let simulated = match &scenario.error {
        Some(e) => apply_error(&schedule, SystematicError::new(e.epsilon)?),
        None => schedule.clone(),
    };

    // Canonical initial state: |0⟩ for x-rotations, |+⟩ for z-rotations.
    let gate = scenario.gate.as_ref().expect("validated");
    let input2: [C64; 2] = match gate.family {
        Family::XRotation => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        Family::ZRotation => [
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ],
    };
    let target = target_gate(path.chi0(), path.beta0(), path.gamma());
    let ideal_final = target.apply(&input2);

    let rho0 = DensityOperator::pure(&[input2[0], input2[1], C64::new(0.0, 0.0)])?;
    let traj = simulate_gate_with_dt(&simulated, &params, drag, &rho0, dt)?;
    let ideal3 = [ideal_final[0], ideal_final[1], C64::new(0.0, 0.0)];
    let state_fidelity = geomgate::qcore::state_fidelity(traj.final_state(), &ideal3)?;

    let channel = gate_channel(&simulated, &params, drag, dt)?;
    let gate_fidelity = gate_fidelity_1q(&channel, &target, scenario.theta_samples())?;

    let steps = (schedule.tau() / dt).ceil() as usize;
    let mut report = FidelityReport::new(scenario_echo(scenario));
    report.tau_ns = schedule.tau();
    report.peak_amplitude_rad_per_ns = simulated.peak_omega();
    report.state_fidelity = Some(state_fidelity);
    report.gate_fidelity = Some(gate_fidelity);
    report.phase_total_rad = Some(phases.total);
    report.phase_dynamical_rad = Some(phases.dynamical);
    report.phase_geometric_rad = Some(phases.geometric);
    report.solver = SolverMeta {
        dt_ns: dt,
        steps,
        samples: schedule.len(),
        theta_samples: Some(scenario.theta_samples()),
    };
    report.extras.insert(
        "final_leakage_population".into(),
        traj.final_state().population(2).into(),
    );

    let summary = vec![
        format!(
            "tau = {:.4} ns, peak Omega = 2pi x {:.4} MHz",
            schedule.tau(),
            to_two_pi_mhz(simulated.peak_omega())
        ),
        format!("state fidelity = {:.6}", state_fidelity),
        format!("gate fidelity  = {:.6}", gate_fidelity),
    ];
    Ok(Outputs {
        files: vec![
            ("pulse.csv".into(), io::schedule_to_csv(&schedule)),
            (
                "pulse.json".into(),
                serde_json::to_string_pretty(&io::schedule_envelope(&schedule)).unwrap(),
            ),
            (
                "trajectory.csv".into(),
                io::trajectory_to_csv(&traj, &ideal_final),
            ),
        ],
        report,
        summary,
    })
}

fn run_sweep(scenario: &Scenario) -> Result<Outputs, geomgate::Error> {
    let path = build_path(scenario)?;
    let params = scenario.device_params().expect("validated");
    let sweep_cfg = scenario.sweep.as_ref().expect("validated");

    let mut spec =
        RobustnessSpec::new(path, params.omega_max, params.alpha, scenario.drag_config());
    spec.dt = scenario.dt_ns(geomgate::DEFAULT_DT_1Q);
    spec.samples = scenario.samples();
    spec.theta_samples = scenario.theta_samples();

    let grid = SweepGrid::uniform(
        sweep_cfg.epsilon_max,
        sweep_cfg.epsilon_points,
        sweep_cfg.gamma_max.rad_per_ns(),
        sweep_cfg.gamma_points,
    )?;
    let result = robustness_sweep(&spec, &grid, sweep_cfg.decoherence)?;

    let flat: Vec<f64> = result.fidelity.iter().flatten().copied().collect();
    let min = flat.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = flat.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let mut report = FidelityReport::new(scenario_echo(scenario));
    report.tau_ns = synthesize_pulse(&spec.path, spec.omega_max, spec.samples)?.tau();
    report.peak_amplitude_rad_per_ns = spec.omega_max;
    report.solver = SolverMeta {
        dt_ns: spec.dt,
        steps: 0,
        samples: spec.samples,
        theta_samples: Some(spec.theta_samples),
    };
    report
        .extras
        .insert("sweep_min_fidelity".into(), min.into());
    report
        .extras
        .insert("sweep_max_fidelity".into(), max.into());
    report.extras.insert(
        "grid".into(),
        serde_json::json!({
            "epsilon_points": grid.epsilon_values.len(),
            "gamma_points": grid.gamma_values.len(),
        }),
    );

    let provenance = serde_json::json!({
        "scenario": scenario_echo(scenario),
        "epsilon_values": result.epsilon_values,
        "gamma_values_rad_per_ns": result.gamma_values,
        "dt_ns": spec.dt,
        "samples": spec.samples,
        "theta_samples": spec.theta_samples,
        "deterministic": true,
    });

    let summary = vec![format!(
        "sweep {} x {} points, fidelity range [{:.6}, {:.6}]",
        result.epsilon_values.len(),
        result.gamma_values.len(),
        min,
        max
    )];
    Ok(Outputs {
        files: vec![
            ("sweep.csv".into(), io::sweep_to_csv(&result)),
            (
                "sweep.json".into(),
                serde_json::to_string_pretty(&provenance).unwrap(),
            ),
        ],
        report,
        summary,
    })
}

fn run_cphase(scenario: &Scenario) -> Result<Outputs, geomgate::Error> {
    let params = scenario.device2_params().expect("validated");
    let cfg = scenario.cphase.as_ref().expect("validated");
    let dt = scenario.dt_ns(geomgate::DEFAULT_DT_2Q);
    let samples = cfg.fidelity_samples.unwrap_or(10_001);

    let built = build_cphase_drive(cfg.gamma_prime_rad, cfg.tau_prime_ns, &params)?;

    // |++⟩ dynamics against the ideal control-phase output.
    let half = 0.5;
    let mut input = vec![C64::new(0.0, 0.0); 9];
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        input[index_of(a, b)] = C64::new(half, 0.0);
    }
    let mut ideal = input.clone();
    ideal[index_of(1, 1)] *= C64::from_polar(1.0, cfg.gamma_prime_rad);
    let rho0 = DensityOperator::pure(&input)?;
    let traj = simulate_cphase_trajectory(&params, &built.drive, &rho0, dt)?;

    let channel = cphase_channel(&params, &built.drive, dt)?;
    let gate_fidelity = gate_fidelity_2q(&channel, cfg.gamma_prime_rad, samples)?;
    let state_fidelity = traj.final_state().matrix().sandwich(&ideal, &ideal).re;

    // Closed-system diagnostics: conditional phase and residual dispersive
    // phases on |01⟩/|10⟩, reported rather than corrected.
    let u = cphase_propagator(&params, &built.drive, dt)?;
    let um = u.matrix();
    let ref00 = um[(index_of(0, 0), index_of(0, 0))].arg();
    let phase01 = um[(index_of(0, 1), index_of(0, 1))].arg() - ref00;
    let phase10 = um[(index_of(1, 0), index_of(1, 0))].arg() - ref00;
    let phase11 = um[(index_of(1, 1), index_of(1, 1))].arg() - ref00;
    let return_pop = um[(index_of(1, 1), index_of(1, 1))].norm_sqr();
    let coherent_channel = QuantumChannel::from_propagator(&u);
    let coherent_fidelity = gate_fidelity_2q(&coherent_channel, cfg.gamma_prime_rad, samples)?;

    let steps = (cfg.tau_prime_ns / dt).ceil() as usize;
    let mut report = FidelityReport::new(scenario_echo(scenario));
    report.tau_ns = cfg.tau_prime_ns;
    report.peak_amplitude_rad_per_ns = built.peak_g_eff;
    report.state_fidelity = Some(state_fidelity);
    report.gate_fidelity = Some(gate_fidelity);
    report.solver = SolverMeta {
        dt_ns: dt,
        steps,
        samples: built.drive.times().len(),
        theta_samples: None,
    };
    if let Some(w) = params.rwa_warning() {
        report.warnings.push(w);
    }
    for (key, value) in [
        ("conditional_phase_rad", phase11),
        ("dispersive_phase_01_rad", phase01),
        ("dispersive_phase_10_rad", phase10),
        ("population_return_11", return_pop),
        ("coherent_gate_fidelity", coherent_fidelity),
        ("peak_g_eff_two_pi_mhz", to_two_pi_mhz(built.peak_g_eff)),
    ] {
        report.extras.insert(key.into(), value.into());
    }

    let summary = vec![
        format!(
            "peak g' = 2pi x {:.4} MHz, tau' = {} ns",
            to_two_pi_mhz(built.peak_g_eff),
            cfg.tau_prime_ns
        ),
        format!(
            "two-qubit gate fidelity = {:.6} (coherent part {:.6})",
            gate_fidelity, coherent_fidelity
        ),
        format!(
            "conditional phase = {:+.5} rad, dispersive phases = ({:+.5}, {:+.5}) rad",
            phase11, phase01, phase10
        ),
    ];
    Ok(Outputs {
        files: vec![
            ("drive.csv".into(), io::drive_to_csv(&built)),
            (
                "trajectory2q.csv".into(),
                io::trajectory2q_to_csv(&traj, &ideal),
            ),
        ],
        report,
        summary,
    })
}
