//! `geomgate` — pulse synthesis and gate simulation for nonadiabatic
//! geometric gates on transmons.
//!
//! Exit codes: 0 success, 2 configuration/validation error, 3 numerical
//! failure.

mod config;
mod figures;
mod report;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{Kind, Scenario};
use geomgate::geompath::{phase_decomposition, synthesize_pulse};
use geomgate::io;
use geomgate::units::two_pi_mhz;

#[derive(Parser)]
#[command(
    name = "geomgate",
    version,
    about = "Geometric-gate pulse synthesis and simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario config end-to-end and write its data files.
    Run {
        /// Path to a TOML scenario file.
        config: PathBuf,
    },
    /// Execute a robustness-sweep scenario (alias of `run` with a kind check).
    Sweep {
        /// Path to a TOML scenario file with kind = "robustness-sweep".
        config: PathBuf,
    },
    /// Regenerate the reference data sets with hard-coded device constants.
    Reproduce {
        /// Which data set: fig2, fig3a, fig3bc or fig4.
        figure: String,
        /// Output directory (default: `reproduce-<figure>`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize a single pulse and print its duration and phases.
    Synth {
        /// Gate family.
        #[arg(long, value_enum)]
        gate: GateArg,
        /// Rotation angle γ in rad, in (-pi, pi].
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        /// Path-gauge strength η (z gates only; default 1/5).
        #[arg(long)]
        eta: Option<f64>,
        /// Amplitude cap as 2π×MHz.
        #[arg(long, default_value_t = 16.0)]
        omega_max_two_pi_mhz: f64,
        /// Synthesis sample count.
        #[arg(long, default_value_t = geomgate::DEFAULT_SYNTH_SAMPLES)]
        samples: usize,
        /// Write the pulse CSV here (prints summary only when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GateArg {
    X,
    Z,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(3)
        }
    }
}

enum Failure {
    Config(String),
    Numerical(geomgate::Error),
}

impl From<geomgate::Error> for Failure {
    fn from(err: geomgate::Error) -> Self {
        // Parameter rejections are configuration problems; the rest are
        // numerical/runtime failures.
        match err {
            geomgate::Error::InvalidParam { .. } | geomgate::Error::TooFewSamples { .. } => {
                Failure::Config(err.to_string())
            }
            other => Failure::Numerical(other),
        }
    }
}

fn configure_threads() {
    if let Ok(value) = std::env::var("GEOMGATE_THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { config } => run_scenario(&config, None),
        Command::Sweep { config } => run_scenario(&config, Some(Kind::RobustnessSweep)),
        Command::Reproduce { figure, out } => {
            let outputs = figures::reproduce(&figure)?;
            let dir = out.unwrap_or_else(|| PathBuf::from(format!("reproduce-{figure}")));
            persist(&dir, &outputs, true)?;
            Ok(())
        }
        Command::Synth {
            gate,
            gamma,
            eta,
            omega_max_two_pi_mhz,
            samples,
            out,
        } => synth(gate, gamma, eta, omega_max_two_pi_mhz, samples, out),
    }
}

fn run_scenario(path: &Path, expect_kind: Option<Kind>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let scenario = Scenario::parse(&text).map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(kind) = expect_kind {
        if scenario.kind != kind {
            return Err(Failure::Config(format!(
                "invalid config field `kind`: expected robustness-sweep, got {:?}",
                scenario.kind
            )));
        }
    }
    let outputs = run::execute(&scenario)?;
    persist(Path::new(&scenario.output), &outputs, false)?;
    Ok(())
}

/// Writes all produced files at once; nothing touches the disk on failure.
fn persist(dir: &Path, outputs: &run::Outputs, wrote_summary_json: bool) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))?;
    for (name, contents) in &outputs.files {
        std::fs::write(dir.join(name), contents)
            .map_err(|e| Failure::Config(format!("cannot write {name}: {e}")))?;
    }
    if !wrote_summary_json {
        std::fs::write(dir.join("report.json"), outputs.report.to_json())
            .map_err(|e| Failure::Config(format!("cannot write report.json: {e}")))?;
    }
    for line in &outputs.summary {
        println!("{line}");
    }
    println!(
        "wrote {} file(s) to {}",
        outputs.files.len() + usize::from(!wrote_summary_json),
        dir.display()
    );
    Ok(())
}

fn synth(
    gate: GateArg,
    gamma: f64,
    eta: Option<f64>,
    omega_max_two_pi_mhz: f64,
    samples: usize,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    if matches!(gate, GateArg::X) && eta.is_some() {
        return Err(Failure::Config(
            "invalid flag combination: --eta only applies to --gate z".to_string(),
        ));
    }
    if !(omega_max_two_pi_mhz > 0.0) {
        return Err(Failure::Config(
            "--omega-max-two-pi-mhz must be positive".to_string(),
        ));
    }
    let omega_max = two_pi_mhz(omega_max_two_pi_mhz);
    let path = match gate {
        GateArg::X => geomgate::geompath::build_x_rotation_path(gamma)?,
        GateArg::Z => geomgate::geompath::build_z_rotation_path(gamma, eta.unwrap_or(0.2))?,
    };
    let schedule = synthesize_pulse(&path, omega_max, samples)?;
    let phases = phase_decomposition(&path, &schedule)?;

    println!("tau = {:.4} ns", schedule.tau());
    println!(
        "phases: total = {:+.6} rad, dynamical = {:+.3e} rad, geometric = {:+.6} rad",
        phases.total, phases.dynamical, phases.geometric
    );
    if gamma.abs() < 1e-12 {
        println!("warning: gamma = 0, the synthesized loop realizes the identity");
    }
    if let Some(file) = out {
        std::fs::write(&file, io::schedule_to_csv(&schedule))
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", file.display())))?;
        println!("wrote {}", file.display());
    }
    Ok(())
}
