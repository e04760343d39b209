//! Declarative scenario files (TOML) with explicit unit tags.

use serde::{Deserialize, Serialize};

use geomgate::transmon1q::{DragConfig, TransmonParams};
use geomgate::twoq::TwoTransmonParams;
use geomgate::units::two_pi_mhz;

/// Validation failure naming the offending field; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn bad(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.to_string(),
        message: message.into(),
    }
}

/// A physical quantity with an explicit unit tag.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    /// 2π × value MHz.
    TwoPiMhz,
    RadPerNs,
}

impl Quantity {
    pub fn rad_per_ns(&self) -> f64 {
        match self.unit {
            Unit::TwoPiMhz => two_pi_mhz(self.value),
            Unit::RadPerNs => self.value,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: Kind,
    /// Output directory; created on success only.
    pub output: String,
    #[serde(default)]
    pub gate: Option<GateSection>,
    #[serde(default)]
    pub device: Option<DeviceSection>,
    #[serde(default)]
    pub drag: Option<DragSection>,
    #[serde(default)]
    pub solver: Option<SolverSection>,
    #[serde(default)]
    pub error: Option<ErrorSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub device2: Option<Device2Section>,
    #[serde(default)]
    pub cphase: Option<CphaseSection>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    SingleQubitGate,
    RobustnessSweep,
    TwoQubitCphase,
    PulseSynthesis,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GateSection {
    pub family: Family,
    pub gamma_rad: f64,
    #[serde(default)]
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    XRotation,
    ZRotation,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DeviceSection {
    pub alpha: Quantity,
    pub gamma1: Quantity,
    pub gamma2: Quantity,
    pub omega_max: Quantity,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DragSection {
    #[serde(default)]
    pub mode: geomgate::transmon1q::DragMode,
    #[serde(default)]
    pub leakage: geomgate::transmon1q::LeakagePrefactor,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default)]
    pub dt_ns: Option<f64>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub theta_samples: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ErrorSection {
    pub epsilon: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub epsilon_max: f64,
    pub epsilon_points: usize,
    pub gamma_max: Quantity,
    pub gamma_points: usize,
    #[serde(default = "default_true")]
    pub decoherence: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Device2Section {
    pub delta: Quantity,
    pub alpha_a: Quantity,
    pub alpha_b: Quantity,
    pub g: Quantity,
    pub nu: Quantity,
    pub gamma1: Quantity,
    pub gamma2: Quantity,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CphaseSection {
    pub gamma_prime_rad: f64,
    pub tau_prime_ns: f64,
    #[serde(default)]
    pub fidelity_samples: Option<usize>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| bad("<toml>", e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    /// Full validation before any computation starts.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.output.trim().is_empty() {
            return Err(bad("output", "must be a non-empty directory path"));
        }
        if let Some(solver) = &self.solver {
            if let Some(dt) = solver.dt_ns {
                if !(dt > 0.0) || !dt.is_finite() {
                    return Err(bad("solver.dt_ns", "must be positive"));
                }
            }
            if let Some(samples) = solver.samples {
                if samples < 1000 {
                    return Err(bad("solver.samples", "must be at least 1000"));
                }
            }
            if let Some(n) = solver.theta_samples {
                if n < 2 {
                    return Err(bad("solver.theta_samples", "must be at least 2"));
                }
            }
        }
        if let Some(err) = &self.error {
            if !err.epsilon.is_finite() || err.epsilon.abs() > 0.5 {
                return Err(bad("error.epsilon", "|epsilon| must not exceed 0.5"));
            }
        }

        match self.kind {
            Kind::SingleQubitGate | Kind::PulseSynthesis => {
                self.gate_section()?;
                self.device_params()?;
            }
            Kind::RobustnessSweep => {
                self.gate_section()?;
                self.device_params()?;
                let sweep = self
                    .sweep
                    .as_ref()
                    .ok_or_else(|| bad("sweep", "section required"))?;
                if sweep.epsilon_points == 0 || sweep.gamma_points == 0 {
                    return Err(bad("sweep", "axes need at least one point"));
                }
                if !(sweep.epsilon_max > 0.0) || sweep.epsilon_max > 0.5 {
                    return Err(bad("sweep.epsilon_max", "must lie in (0, 0.5]"));
                }
                if sweep.gamma_max.rad_per_ns() < 0.0 {
                    return Err(bad("sweep.gamma_max", "must be nonnegative"));
                }
                if !sweep.decoherence && sweep.gamma_max.rad_per_ns() != 0.0 {
                    return Err(bad(
                        "sweep.decoherence",
                        "decoherence = false requires gamma_max = 0",
                    ));
                }
            }
            Kind::TwoQubitCphase => {
                self.device2_params()?;
                let cphase = self
                    .cphase
                    .as_ref()
                    .ok_or_else(|| bad("cphase", "section required"))?;
                if !(cphase.tau_prime_ns > 0.0) {
                    return Err(bad("cphase.tau_prime_ns", "must be positive"));
                }
                if cphase.gamma_prime_rad <= -std::f64::consts::PI
                    || cphase.gamma_prime_rad > std::f64::consts::PI
                {
                    return Err(bad("cphase.gamma_prime_rad", "must lie in (-pi, pi]"));
                }
                if let Some(n) = cphase.fidelity_samples {
                    if n < 4 {
                        return Err(bad("cphase.fidelity_samples", "must be at least 4"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn gate_section(&self) -> Result<&GateSection, ConfigError> {
        let gate = self
            .gate
            .as_ref()
            .ok_or_else(|| bad("gate", "section required"))?;
        if !gate.gamma_rad.is_finite()
            || gate.gamma_rad <= -std::f64::consts::PI - 1e-12
            || gate.gamma_rad > std::f64::consts::PI + 1e-12
        {
            return Err(bad("gate.gamma_rad", "must lie in (-pi, pi]"));
        }
        match gate.family {
            Family::ZRotation => {
                if let Some(eta) = gate.eta {
                    if !(eta >= 0.0) {
                        return Err(bad("gate.eta", "must be nonnegative"));
                    }
                }
            }
            Family::XRotation => {
                if gate.eta.is_some() {
                    return Err(bad("gate.eta", "only meaningful for z-rotation gates"));
                }
            }
        }
        Ok(gate)
    }

    pub fn device_params(&self) -> Result<TransmonParams<f64>, ConfigError> {
        let d = self
            .device
            .as_ref()
            .ok_or_else(|| bad("device", "section required"))?;
        for (name, q, positive) in [
            ("device.alpha", d.alpha, true),
            ("device.gamma1", d.gamma1, false),
            ("device.gamma2", d.gamma2, false),
            ("device.omega_max", d.omega_max, true),
        ] {
            let v = q.rad_per_ns();
            if !v.is_finite() {
                return Err(bad(name, "must be finite"));
            }
            if positive && v <= 0.0 {
                return Err(bad(name, "must be positive"));
            }
            if !positive && v < 0.0 {
                return Err(bad(name, "must be nonnegative"));
            }
        }
        TransmonParams::new(
            d.alpha.rad_per_ns(),
            d.gamma1.rad_per_ns(),
            d.gamma2.rad_per_ns(),
            d.omega_max.rad_per_ns(),
        )
        .map_err(|e| bad("device", e.to_string()))
    }

    pub fn device2_params(&self) -> Result<TwoTransmonParams<f64>, ConfigError> {
        let d = self
            .device2
            .as_ref()
            .ok_or_else(|| bad("device2", "section required"))?;
        for (name, q) in [("device2.gamma1", d.gamma1), ("device2.gamma2", d.gamma2)] {
            if q.rad_per_ns() < 0.0 {
                return Err(bad(name, "must be nonnegative"));
            }
        }
        TwoTransmonParams::new(
            d.delta.rad_per_ns(),
            d.alpha_a.rad_per_ns(),
            d.alpha_b.rad_per_ns(),
            d.g.rad_per_ns(),
            d.nu.rad_per_ns(),
            d.gamma1.rad_per_ns(),
            d.gamma2.rad_per_ns(),
        )
        .map_err(|e| bad("device2", e.to_string()))
    }

    pub fn drag_config(&self) -> DragConfig {
        self.drag
            .as_ref()
            .map(|d| DragConfig {
                mode: d.mode,
                leakage: d.leakage,
            })
            .unwrap_or_default()
    }

    pub fn dt_ns(&self, default: f64) -> f64 {
        self.solver
            .as_ref()
            .and_then(|s| s.dt_ns)
            .unwrap_or(default)
    }

    pub fn samples(&self) -> usize {
        self.solver
            .as_ref()
            .and_then(|s| s.samples)
            .unwrap_or(geomgate::DEFAULT_SYNTH_SAMPLES)
    }

    pub fn theta_samples(&self) -> usize {
        self.solver
            .as_ref()
            .and_then(|s| s.theta_samples)
            .unwrap_or(1001)
    }
}
