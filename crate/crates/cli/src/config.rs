//! TOML configuration file. Each command reads its own section plus the
//! shared `[run]` section; command-line flags take precedence.
//!
//! ```toml
//! [run]
//! seed = 7
//! trials = 200
//!
//! [attack]
//! n = 4
//! xi = 0.1
//! adversary = "majority_vote"
//! coalition = [0, 1]
//!
//! [lowerbound]
//! n = [1000]
//! d = [64, 256, 1024]
//! delta = [1e-6]
//! p = ["1", "2", "inf"]
//! mechanisms = ["exact_erm", "gaussian_mean"]
//! ```

use crate::error::{CliError, CliResult};
use serde::Deserialize;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub gen: GenSection,
    #[serde(default)]
    pub trace: TraceSection,
    #[serde(default)]
    pub audit_bias: AuditSection,
    #[serde(default)]
    pub attack: AttackSection,
    #[serde(default)]
    pub lowerbound: LowerboundSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSection {
    pub n: Option<usize>,
    pub xi: Option<f64>,
    pub d: Option<usize>,
    pub k: Option<usize>,
    pub rows: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSection {
    pub codebook: Option<PathBuf>,
    pub secret: Option<PathBuf>,
    pub word: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSection {
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub xi: Option<f64>,
    pub alpha: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackSection {
    pub n: Option<usize>,
    pub xi: Option<f64>,
    pub d: Option<usize>,
    pub beta: Option<f64>,
    pub adversary: Option<String>,
    pub coalition: Option<Vec<usize>>,
    pub mechanism: Option<String>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
}

/// `p` may be written as a number or as the string `"inf"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PValue {
    Number(f64),
    Text(String),
}

impl PValue {
    pub fn label(&self) -> String {
        match self {
            PValue::Number(v) => v.to_string(),
            PValue::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowerboundSection {
    pub n: Option<Vec<usize>>,
    pub d: Option<Vec<usize>>,
    pub epsilon: Option<Vec<f64>>,
    pub delta: Option<Vec<f64>>,
    pub p: Option<Vec<PValue>>,
    pub k: Option<usize>,
    pub xi: Option<f64>,
    pub mechanisms: Option<Vec<String>>,
    pub c0: Option<f64>,
}

impl FileConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::usage(format!("config: {e}")))
    }

    /// Reads `path`, or returns an empty config when no file was given.
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| CliError::io(&format!("reading {}", p.display()), e))?;
                FileConfig::parse(&text)
            }
        }
    }
}

/// Flag value if given, else file value, else `default`.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Flag list if nonempty, else file list, else `default`.
pub fn pick_list<T>(flag: Vec<T>, file: Option<Vec<T>>, default: Vec<T>) -> Vec<T> {
    if flag.is_empty() {
        file.unwrap_or(default)
    } else {
        flag
    }
}
