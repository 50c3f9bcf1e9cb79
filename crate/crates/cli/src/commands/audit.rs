use super::{emit, print_json, write_file};
use crate::config::{pick, FileConfig};
use crate::error::{CliError, CliResult};
use crate::AuditArgs;
use dperm_core::exec;
use dperm_core::fpcode::{derive_params, derive_params_with_d_core, gen_core};
use dperm_core::marking::biased_mean_fraction;
use dperm_core::stats::{mean, quantile};
use dperm_core::SeedKey;
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Clone, Serialize)]
pub struct AuditConfig {
    pub seed: u64,
    /// Number of seeds, `seed, seed + 1, …`.
    pub trials: usize,
    pub n: usize,
    pub d: Option<usize>,
    pub xi: f64,
    pub alpha: f64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditSummary {
    pub seeds: usize,
    pub d_core: usize,
    pub mean: f64,
    pub q50: f64,
    pub q95: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditResult {
    /// `(seed, fraction)` per run.
    pub rows: Vec<(u64, f64)>,
    pub summary: AuditSummary,
}

pub fn resolve(args: &AuditArgs, file: &FileConfig) -> CliResult<AuditConfig> {
    let sec = &file.audit_bias;
    let cfg = AuditConfig {
        seed: pick(args.common.seed, file.run.seed, 0),
        trials: pick(args.common.trials, file.run.trials, 20),
        n: args.n.or(sec.n).ok_or_else(|| CliError::usage("audit-bias needs --n"))?,
        d: args.d.or(sec.d),
        xi: pick(args.xi, sec.xi, 0.1),
        alpha: pick(args.alpha, sec.alpha, 0.001),
        out: args.common.out.clone().or_else(|| file.run.out.clone()),
    };
    if cfg.trials == 0 {
        return Err(CliError::usage("audit-bias needs at least one seed"));
    }
    if !(0.0..=0.5).contains(&cfg.alpha) {
        return Err(CliError::usage(format!("alpha must lie in [0, 1/2], got {}", cfg.alpha)));
    }
    Ok(cfg)
}

pub fn audit(cfg: &AuditConfig) -> CliResult<AuditResult> {
    let params = match cfg.d {
        Some(d) => derive_params_with_d_core(cfg.n, cfg.xi, d)?,
        None => derive_params(cfg.n, cfg.xi)?,
    };
    let rows = exec::try_map_indexed(cfg.trials, |i| {
        let seed = cfg.seed.wrapping_add(i as u64);
        let core = gen_core(&params, SeedKey::new(seed));
        biased_mean_fraction(&core.bits, cfg.alpha).map(|f| (seed, f))
    })?;
    let fractions: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let summary = AuditSummary {
        seeds: rows.len(),
        d_core: params.d_core,
        mean: mean(&fractions)?,
        q50: quantile(&fractions, 0.5)?,
        q95: quantile(&fractions, 0.95)?,
        max: quantile(&fractions, 1.0)?,
    };
    Ok(AuditResult { rows, summary })
}

pub fn to_csv(cfg: &AuditConfig, result: &AuditResult) -> CliResult<String> {
    let mut text = format!("# dperm audit-bias config={}\n", serde_json::to_string(cfg)?);
    text.push_str("index,seed,fraction\n");
    for (i, (seed, f)) in result.rows.iter().enumerate() {
        let _ = writeln!(text, "{i},{seed},{f}");
    }
    let s = &result.summary;
    let _ = writeln!(text, "# summary mean={} q50={} q95={} max={}", s.mean, s.q50, s.q95, s.max);
    Ok(text)
}

pub fn run(cfg: &AuditConfig, out: &mut dyn Write) -> CliResult<()> {
    let result = audit(cfg)?;
    let csv = to_csv(cfg, &result)?;
    match &cfg.out {
        Some(path) => {
            write_file(path, csv.as_bytes())?;
            print_json(out, &result.summary)
        }
        None => emit(out, &csv),
    }
}
