//! Experiment configuration: a flat TOML table.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use billiards_core::{BodyKind, BodyModel, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Body descriptor as it appears in configs, reports and export headers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    pub kind: BodyKind,
    pub d: usize,
    pub semi_axes: Vec<f64>,
    #[serde(default)]
    pub bump_delta: f64,
    #[serde(default)]
    pub bump_coeffs: Vec<f64>,
}

impl BodySpec {
    pub fn build(&self) -> Result<BodyModel, CliError> {
        if self.semi_axes.len() != self.d {
            return Err(CliError::Config(format!(
                "field `semi_axes`: {} entries for d = {}",
                self.semi_axes.len(),
                self.d
            )));
        }
        let coeffs = match (self.kind, self.bump_coeffs.is_empty()) {
            (BodyKind::Ellipsoid, true) => vec![0.0; self.d],
            (BodyKind::BumpedEllipsoid, true) => {
                return Err(CliError::Config(
                    "field `bump_coeffs`: required for a bumped ellipsoid".into(),
                ))
            }
            _ => self.bump_coeffs.clone(),
        };
        BodyModel::new(self.kind, &self.semi_axes, self.bump_delta, &coeffs)
            .map_err(|e| CliError::Config(format!("body: {e}")))
    }

    pub fn of(body: &BodyModel) -> Self {
        BodySpec {
            kind: body.kind(),
            d: body.dimension(),
            semi_axes: body.semi_axes().to_vec(),
            bump_delta: body.bump_amplitude(),
            bump_coeffs: body.bump_coeffs().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub body: BodySpec,
    pub p: usize,
    #[serde(flatten)]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub export_path: Option<PathBuf>,
}

const OPTIONAL_KEYS: [&str; 4] = ["bump_delta", "bump_coeffs", "report_path", "export_path"];

impl ExperimentConfig {
    pub fn new(body: BodySpec, p: usize, solver: SolverConfig) -> Self {
        ExperimentConfig {
            body,
            p,
            solver,
            report_path: None,
            export_path: None,
        }
    }

    /// Parses and validates. Unknown keys are rejected so that typos do not
    /// silently fall back to defaults.
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let table: toml::Table = text.parse().map_err(|e| CliError::Config(format!("{e}")))?;
        let cfg: ExperimentConfig = table
            .clone()
            .try_into()
            .map_err(|e| CliError::Config(format!("{e}")))?;
        let known: BTreeSet<String> = toml::Table::try_from(&cfg)
            .map_err(|e| CliError::Config(format!("{e}")))?
            .keys()
            .cloned()
            .chain(OPTIONAL_KEYS.iter().map(|k| k.to_string()))
            .collect();
        if let Some(key) = table.keys().find(|k| !known.contains(*k)) {
            return Err(CliError::Config(format!("unknown field `{key}`")));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.p < 2 {
            return Err(CliError::Config(format!("field `p`: {} < 2", self.p)));
        }
        self.solver
            .validate()
            .map_err(|e| CliError::Config(format!("solver: {e}")))?;
        self.body.build().map(|_| ())
    }
}
