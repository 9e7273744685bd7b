//! Run configuration, read from TOML or JSON. Every option has a default,
//! and the resolved configuration is embedded in each report.

use std::path::Path;

use levy_transience::criteria::CriteriaOptions;
use levy_transience::discretize::{default_tests, DEFAULT_H_RADIUS};
use levy_transience::measures::LawSpec;
use levy_transience::simulate::Horizon;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law: Option<LawSpec>,
    /// Assert that the Lévy measure is unimodal (enables criterion (1.2)).
    pub unimodal: bool,
    pub seed: u64,
    pub criteria: CriteriaOptions,
    pub flow: FlowOptions,
    pub resistance: ResistanceOptions,
    pub discretize: DiscretizeOptions,
    pub simulate: SimulateOptions,
    pub demo: DemoOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowOptions {
    /// Window exponent of the exact flow verification.
    pub verify_i_max: u32,
    /// Blocks summed in the flow energy.
    pub energy_i_max: u32,
    /// Lags summed in the closed-form energy bound.
    pub bound_w_max: u64,
    /// Radii at which the resistance must stay below the flow energy.
    pub radii: Vec<u64>,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            verify_i_max: 12,
            energy_i_max: 14,
            bound_w_max: 1_000_000,
            radii: vec![8, 16, 32, 64, 128],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResistanceOptions {
    pub radii: Vec<u64>,
    /// Relative gap below which the profile counts as flat.
    pub flat_tol: f64,
}

impl Default for ResistanceOptions {
    fn default() -> Self {
        Self {
            radii: vec![8, 16, 32, 64, 128, 256, 512],
            flat_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscretizeOptions {
    pub deltas: Vec<f64>,
    /// Test function ids such as `bump-1` or `damped-cos-2`.
    pub tests: Vec<String>,
    pub h_radius: f64,
    /// Terms of the discrete side of the Jensen comparison.
    pub jensen_terms: u64,
}

impl Default for DiscretizeOptions {
    fn default() -> Self {
        Self {
            deltas: vec![1.0, 0.5, 0.25, 0.125],
            tests: default_tests().into_iter().map(|t| t.id).collect(),
            h_radius: DEFAULT_H_RADIUS,
            jensen_terms: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateOptions {
    /// Half-width `a` of the window `(−a, a)`.
    pub window: f64,
    pub horizon: Horizon,
    pub replicas: u64,
    /// Keep per-replica records in the report.
    pub records: bool,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        Self {
            window: 5.0,
            horizon: Horizon::Steps { steps: 20_000 },
            replicas: 1000,
            records: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemoOptions {
    pub stable_alphas: Vec<f64>,
    /// `(α, β)` pairs for the multi-index demo.
    pub multi_index: Vec<(f64, f64)>,
    /// Even-chain samples per pair for the empirical lower bound.
    pub even_chain_samples: u64,
    /// Sites `2i`, `1 ≤ i ≤ even_chain_sites`, checked against the bound.
    pub even_chain_sites: i64,
}

impl Default for DemoOptions {
    fn default() -> Self {
        Self {
            stable_alphas: vec![0.25, 0.5, 0.75, 0.9, 1.0, 1.1, 1.5, 1.75],
            multi_index: vec![(0.5, 1.5), (0.5, 0.5)],
            even_chain_samples: 100_000,
            even_chain_sites: 10,
        }
    }
}

impl RunConfig {
    /// Reads a TOML file, or JSON when the extension is `.json`. A JSON
    /// report is accepted too; its embedded `config` is used.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| CliError::Usage(format!("invalid config: {e}")))?;
        let value = match value {
            serde_json::Value::Object(mut m)
                if m.contains_key("config") && m.contains_key("command") =>
            {
                m.remove("config").unwrap_or_default()
            }
            v => v,
        };
        serde_json::from_value(value).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize to TOML")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize to JSON")
    }

    pub fn require_law(&self) -> Result<&LawSpec, CliError> {
        self.law.as_ref().ok_or_else(|| {
            CliError::Usage(
                "this command needs a law (set `law` in the config or pass --law)".into(),
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunConfig {
        RunConfig {
            law: Some(LawSpec::MultiIndex {
                alpha: 0.5,
                beta: 1.5,
                normalize: true,
            }),
            seed: 17,
            simulate: SimulateOptions {
                horizon: Horizon::Time {
                    time: 1e3,
                    rate: 0.3,
                },
                ..SimulateOptions::default()
            },
            ..RunConfig::default()
        }
    }

    #[test]
    fn toml_round_trip() {
        let c = sample();
        let back = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_toml(), c.to_toml());
    }

    #[test]
    fn json_round_trip() {
        let c = sample();
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
        let d = RunConfig::default();
        assert_eq!(RunConfig::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn partial_configs_take_defaults() {
        let c =
            RunConfig::from_toml("seed = 3\n[law]\nfamily = \"stable\"\nalpha = 0.5\n").unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(
            c.law,
            Some(LawSpec::Stable {
                alpha: 0.5,
                gamma: 1.0
            })
        );
        assert_eq!(c.flow, FlowOptions::default());
    }

    #[test]
    fn unknown_fields_and_families_are_rejected() {
        assert!(RunConfig::from_toml("sede = 3\n").is_err());
        assert!(RunConfig::from_toml("[law]\nfamily = \"stabel\"\nalpha = 0.5\n").is_err());
    }

    #[test]
    fn reports_are_accepted_as_configs() {
        let c = sample();
        let report = serde_json::json!({ "command": "analyze", "config": c });
        assert_eq!(RunConfig::from_json(&report.to_string()).unwrap(), c);
    }
}
