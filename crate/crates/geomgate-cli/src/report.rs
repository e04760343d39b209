//! Result reports emitted next to the data files.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
pub struct SolverMeta {
    pub dt_ns: f64,
    pub steps: usize,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_samples: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FidelityReport {
    /// Echo of the scenario that produced this report.
    pub scenario: serde_json::Value,
    pub tau_ns: f64,
    pub peak_amplitude_rad_per_ns: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state_fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate_fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_total_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_dynamical_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_geometric_rad: Option<f64>,
    pub solver: SolverMeta,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Auxiliary measured quantities (diagnostics, comparisons).
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub extras: serde_json::Map<String, serde_json::Value>,
}

impl FidelityReport {
    pub fn new(scenario: serde_json::Value) -> Self {
        Self {
            scenario,
            tau_ns: f64::NAN,
            peak_amplitude_rad_per_ns: f64::NAN,
            state_fidelity: None,
            gate_fidelity: None,
            phase_total_rad: None,
            phase_dynamical_rad: None,
            phase_geometric_rad: None,
            solver: SolverMeta::default(),
            warnings: Vec::new(),
            extras: serde_json::Map::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
