use super::print_json;
use crate::config::{pick, FileConfig};
use crate::error::{CliError, CliResult};
use crate::TraceArgs;
use dperm_core::bits::parse_word;
use dperm_core::fpcode::io::{read_codebook, read_secret};
use dperm_core::fpcode::trace;
use dperm_core::SeedKey;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Clone)]
pub struct TraceConfig {
    pub seed: u64,
    pub codebook: PathBuf,
    pub secret: PathBuf,
    pub word: PathBuf,
}

#[derive(Debug, Serialize)]
pub struct TraceOutput {
    /// 0-based user index, or null when nobody is accused.
    pub accused: Option<usize>,
    pub accused_set: Vec<usize>,
    pub threshold: f64,
    pub max_score: f64,
    pub scores: Vec<f64>,
}

pub fn resolve(args: &TraceArgs, file: &FileConfig) -> CliResult<TraceConfig> {
    let need = |flag: &Option<PathBuf>, fallback: &Option<PathBuf>, name: &str| {
        flag.clone()
            .or_else(|| fallback.clone())
            .ok_or_else(|| CliError::usage(format!("trace needs --{name}")))
    };
    Ok(TraceConfig {
        seed: pick(args.common.seed, file.run.seed, 0),
        codebook: need(&args.codebook, &file.trace.codebook, "codebook")?,
        secret: need(&args.secret, &file.trace.secret, "secret")?,
        word: need(&args.word, &file.trace.word, "word")?,
    })
}

pub fn run(cfg: &TraceConfig, out: &mut dyn Write) -> CliResult<()> {
    let book = read_codebook(&cfg.codebook)?;
    let secret = read_secret(&cfg.secret)?;
    let text = fs::read_to_string(&cfg.word).map_err(|e| CliError::io(&format!("reading {}", cfg.word.display()), e))?;
    let word = parse_word(text.trim())?;
    let acc = trace(&book, &secret, &word, &mut SeedKey::new(cfg.seed).child("trace").rng())?;
    let output = TraceOutput {
        accused: acc.accused,
        accused_set: acc.accused_set,
        threshold: secret.params.threshold(),
        max_score: acc.scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        scores: acc.scores,
    };
    print_json(out, &output)
}
