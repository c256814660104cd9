//! The experiment description every subcommand reduces to, its schema check
//! and its reproducibility hash.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Failure;

pub const SCHEMA: &str = include_str!("../schema/experiment_config.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandId {
    RateScan,
    Cantor,
    Porosity,
    Verify,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cantor: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<String>,
}

impl Inputs {
    fn paths(&self) -> impl Iterator<Item = &str> {
        [&self.measure, &self.cantor, &self.intervals].into_iter().flatten().map(String::as_str)
    }
}

/// Geometric grid from `max` down to `min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub max: f64,
    pub min: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaKind {
    Constant,
    Harmonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Alpha {
    pub kind: AlphaKind,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: CommandId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Inputs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Alpha>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_range: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub only: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inject_fault: Option<String>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

fn check_schema(value: &serde_json::Value) -> Result<(), Failure> {
    let schema: serde_json::Value = serde_json::from_str(SCHEMA).expect("bundled schema is JSON");
    let validator = jsonschema::validator_for(&schema).expect("bundled schema compiles");
    let problems: Vec<String> = validator
        .iter_errors(value)
        .map(|e| {
            let at = e.instance_path().to_string();
            format!("{}: {e}", if at.is_empty() { "/" } else { &at })
        })
        .collect();
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Input(format!("config does not match the schema:\n  {}", problems.join("\n  "))))
    }
}

impl ExperimentConfig {
    /// Schema check of the serialized form.
    pub fn validate(&self) -> Result<(), Failure> {
        check_schema(&serde_json::to_value(self).expect("config serializes"))
    }

    /// Reads and validates a stored config; the schema runs before typing so
    /// its messages reach the user.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = porous_ot::io::read_file(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        check_schema(&value)?;
        serde_json::from_value(value).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }

    /// SHA-256 over the canonical config (output path excluded) followed by
    /// the bytes of every input file, first 16 hex digits.
    pub fn hash(&self) -> Result<String, Failure> {
        let mut hasher = Sha256::new();
        let canonical = Self { out: None, ..self.clone() };
        hasher.update(serde_json::to_vec(&canonical).expect("config serializes"));
        for path in self.inputs.iter().flat_map(Inputs::paths) {
            hasher.update(porous_ot::io::read_file(Path::new(path))?.as_bytes());
        }
        Ok(hex::encode(hasher.finalize())[..16].to_string())
    }
}
