use super::{create_dir, print_json, write_file};
use crate::config::{pick, FileConfig};
use crate::error::{CliError, CliResult};
use crate::AttackArgs;
use dperm_core::fpcode::{derive_params, derive_params_with_d_core};
use dperm_core::marking::{run_security_experiment, AdversaryKind, SecurityStats, SecuritySummary};
use dperm_core::mech::{MechanismHandle, PrivacyBudget};
use dperm_core::SeedKey;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;

/// Absolute slack added to ξ when judging Monte Carlo rates.
pub const RATE_SLACK: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct AttackConfig {
    pub seed: u64,
    pub trials: usize,
    pub n: usize,
    pub xi: f64,
    pub d: Option<usize>,
    pub beta: f64,
    pub adversary: String,
    pub coalition: Vec<usize>,
    pub mechanism: Option<String>,
    pub epsilon: f64,
    pub delta: f64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct AttackReport {
    pub config: AttackConfig,
    pub stats: SecuritySummary,
    pub completeness_failure_rate: f64,
    pub false_accusation_rate: f64,
    pub rate_bound: f64,
    pub pass: bool,
}

pub fn resolve(args: &AttackArgs, file: &FileConfig) -> CliResult<AttackConfig> {
    let sec = &file.attack;
    let n = args.n.or(sec.n).ok_or_else(|| CliError::usage("attack needs --n"))?;
    let coalition = if args.coalition.is_empty() {
        sec.coalition.clone().unwrap_or_else(|| (0..n).collect())
    } else {
        args.coalition.clone()
    };
    let adversary = pick(args.adversary.clone(), sec.adversary.clone(), "majority_vote".into());
    let mechanism = args.mechanism.clone().or_else(|| sec.mechanism.clone());
    let mechanism = match (adversary.as_str(), mechanism) {
        ("mechanism_round", m) => Some(m.unwrap_or_else(|| "gaussian_mean".into())),
        (_, Some(_)) => return Err(CliError::usage("--mechanism only applies to the mechanism_round adversary")),
        (_, None) => None,
    };
    Ok(AttackConfig {
        seed: pick(args.common.seed, file.run.seed, 0),
        trials: pick(args.common.trials, file.run.trials, 200),
        n,
        xi: pick(args.xi, sec.xi, 0.1),
        d: args.d.or(sec.d),
        beta: pick(args.beta, sec.beta, 1.0 / 75.0),
        adversary,
        coalition,
        mechanism,
        epsilon: pick(args.epsilon, sec.epsilon, 1.0),
        delta: pick(args.delta, sec.delta, 1e-6),
        out: args.common.out.clone().or_else(|| file.run.out.clone()),
    })
}

pub fn adversary(cfg: &AttackConfig) -> CliResult<AdversaryKind> {
    Ok(match cfg.adversary.as_str() {
        "majority_vote" => AdversaryKind::MajorityVote,
        "copy_first_row" => AdversaryKind::CopyFirstRow,
        "random_consistent" => AdversaryKind::RandomConsistent,
        "mechanism_round" => {
            let budget = PrivacyBudget::new(cfg.epsilon, cfg.delta)?;
            let name = cfg.mechanism.as_deref().unwrap_or("gaussian_mean");
            AdversaryKind::MechanismRound(MechanismHandle::from_name(name, budget)?)
        }
        other => return Err(CliError::usage(format!("unknown adversary {other:?}"))),
    })
}

pub fn attack(cfg: &AttackConfig) -> CliResult<(SecurityStats, AttackReport)> {
    let params = match cfg.d {
        Some(d) => derive_params_with_d_core(cfg.n, cfg.xi, d)?,
        None => derive_params(cfg.n, cfg.xi)?,
    };
    let adv = adversary(cfg)?;
    let stats = run_security_experiment(&params, &adv, &cfg.coalition, cfg.beta, cfg.trials, SeedKey::new(cfg.seed))?;
    let bound = cfg.xi + RATE_SLACK;
    let report = AttackReport {
        config: cfg.clone(),
        stats: stats.summary(),
        completeness_failure_rate: stats.completeness_failure_rate(),
        false_accusation_rate: stats.false_accusation_rate(),
        rate_bound: bound,
        pass: stats.completeness_failure_rate() <= bound && stats.false_accusation_rate() <= bound,
    };
    Ok((stats, report))
}

pub fn run(cfg: &AttackConfig, out: &mut dyn Write) -> CliResult<()> {
    let (stats, report) = attack(cfg)?;
    if let Some(dir) = &cfg.out {
        create_dir(dir)?;
        write_file(&dir.join("stats.json"), (serde_json::to_string_pretty(&report.stats)? + "\n").as_bytes())?;
        write_file(&dir.join("trials.csv"), stats.trial_log_csv().as_bytes())?;
    }
    print_json(out, &report)
}
