//! Scenario runner behind the `wavegeom` binary.

mod output;
mod run;
mod scenario;

use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

pub use output::{Classification, Endpoint, GaugeSummary, Phases, Summary, Validation, TRAJECTORY_HEADER};
pub use run::{run_batch, run_scenario, RunOptions, RunOutcome};
pub use scenario::{parse_scenario, parse_scenarios, Analysis, InitialSpec, ProfileSpec, RaySpec, Scenario};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{source_name}: {message} at line {line}, column {column}")]
    Parse {
        source_name: String,
        message: String,
        line: usize,
        column: usize,
    },

    #[error("{0}")]
    Invalid(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("scenario `{scenario}`: {source}")]
    Physics {
        scenario: String,
        #[source]
        source: crate::Error,
    },
}

impl CliError {
    pub(crate) fn parse(source: &str, e: &serde_json::Error) -> Self {
        let full = e.to_string();
        // serde_json appends " at line L column C"; keep the bare message
        let message = match full.rfind(" at line ") {
            Some(i) => full[..i].to_string(),
            None => full,
        };
        CliError::Parse { source_name: source.to_string(), message, line: e.line(), column: e.column() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Invalid(_) => "invalid_scenario",
            CliError::UnknownPreset(_) => "unknown_preset",
            CliError::Io { .. } => "io",
            CliError::Physics { source, .. } => source.kind(),
        }
    }

    /// Machine-readable error record.
    pub fn record(&self) -> ErrorRecord {
        let (line, column) = match self {
            CliError::Parse { line, column, .. } => (Some(*line), Some(*column)),
            _ => (None, None),
        };
        let scenario = match self {
            CliError::Physics { scenario, .. } => Some(scenario.clone()),
            _ => None,
        };
        ErrorRecord {
            error: ErrorBody { kind: self.kind(), message: self.to_string(), scenario, line, column },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub error: ErrorBody,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

const PRESETS: &[(&str, &str)] = &[
    ("free", include_str!("../../presets/free.json")),
    ("fig1", include_str!("../../presets/fig1.json")),
    ("fig2", include_str!("../../presets/fig2.json")),
    ("fig3", include_str!("../../presets/fig3.json")),
    ("fig4", include_str!("../../presets/fig4.json")),
    ("fig5", include_str!("../../presets/fig5.json")),
    ("cyclic-demo", include_str!("../../presets/cyclic-demo.json")),
    ("cyclic-triangle", include_str!("../../presets/cyclic-triangle.json")),
    ("gauge-step", include_str!("../../presets/gauge-step.json")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn preset_text(name: &str) -> Result<&'static str, CliError> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| CliError::UnknownPreset(name.to_string()))
}

pub fn preset(name: &str) -> Result<Vec<Scenario>, CliError> {
    parse_scenarios(preset_text(name)?, &format!("preset {name}"))
}
