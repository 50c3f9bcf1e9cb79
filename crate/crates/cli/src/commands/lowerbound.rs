//! Sweep of private mechanisms over fingerprinting hard instances.
//!
//! Every cell `(n, d, ε, δ, p, mechanism)` runs the mechanism `trials` times
//! on the instance for `(n, d, k)` and records the excess ℓ1 loss. Here `d`
//! is the core code length; the dataset has `5d` coordinates once dummy
//! columns are included. Rows are sorted by cell key before writing, so the
//! files do not depend on scheduling.

use super::{create_dir, print_json, write_file};
use crate::config::{pick, pick_list, FileConfig, PValue};
use crate::error::{CliError, CliResult};
use crate::LowerboundArgs;
use dperm_core::erm::{
    distance, excess_loss, lower_bound_curve, lp_constants, pure_lower_bound_curve, Dataset, Geometry, LossFamily,
    DEFAULT_C0,
};
use dperm_core::exec;
use dperm_core::fpcode::derive_params_with_d_core;
use dperm_core::hardgen::{fp_hard_instance, InstanceColumns};
use dperm_core::mech::{delta_warning, MechanismHandle, MechanismLogRow, PrivacyBudget};
use dperm_core::stats::{mean, quantile};
use dperm_core::SeedKey;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const CSV_FILE: &str = "lowerbound.csv";
pub const REPORT_FILE: &str = "report.json";
pub const REPORT_FORMAT: &str = "dperm-lowerbound v1";

pub const KNOWN_MECHANISMS: [&str; 4] = ["exact_erm", "laplace_mean", "gaussian_mean", "noisy_subgradient"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerboundConfig {
    pub seed: u64,
    pub trials: usize,
    pub n: Vec<usize>,
    pub d: Vec<usize>,
    pub epsilon: Vec<f64>,
    pub delta: Vec<f64>,
    pub p: Vec<String>,
    pub k: Option<usize>,
    pub xi: f64,
    pub mechanisms: Vec<String>,
    pub c0: f64,
    #[serde(skip)]
    pub out: PathBuf,
}

impl Default for LowerboundConfig {
    fn default() -> Self {
        LowerboundConfig {
            seed: 0,
            trials: 20,
            n: vec![1000],
            d: vec![64, 256, 1024],
            epsilon: vec![1.0],
            delta: vec![1e-6],
            p: vec!["1".into(), "2".into(), "inf".into()],
            k: None,
            xi: 0.1,
            mechanisms: vec!["exact_erm".into(), "gaussian_mean".into()],
            c0: DEFAULT_C0,
            out: PathBuf::from("lowerbound-out"),
        }
    }
}

/// One CSV row. Statistics are empty for skipped cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRow {
    pub n: usize,
    pub d: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub p: String,
    pub mechanism: String,
    pub status: CellStatus,
    pub reason: String,
    pub k: usize,
    pub n_k: usize,
    pub data_dim: usize,
    pub trials: usize,
    pub mean_excess: Option<f64>,
    pub normalized_excess: Option<f64>,
    pub q50_excess: Option<f64>,
    pub q95_excess: Option<f64>,
    pub mean_l2_error: Option<f64>,
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub curve: Option<f64>,
    pub c0: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Approx,
    Pure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub summary: CellRow,
    pub trials: Vec<MechanismLogRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub format: String,
    pub config: LowerboundConfig,
    pub cells: Vec<CellReport>,
}

impl SweepReport {
    pub fn rows(&self) -> impl Iterator<Item = &CellRow> {
        self.cells.iter().map(|c| &c.summary)
    }
}

pub fn resolve(args: &LowerboundArgs, file: &FileConfig) -> CliResult<LowerboundConfig> {
    let sec = &file.lowerbound;
    let def = LowerboundConfig::default();
    let file_p = sec.p.as_ref().map(|ps| ps.iter().map(PValue::label).collect());
    let cfg = LowerboundConfig {
        seed: pick(args.common.seed, file.run.seed, def.seed),
        trials: pick(args.common.trials, file.run.trials, def.trials),
        n: pick_list(args.n.clone(), sec.n.clone(), def.n),
        d: pick_list(args.d.clone(), sec.d.clone(), def.d),
        epsilon: pick_list(args.epsilon.clone(), sec.epsilon.clone(), def.epsilon),
        delta: pick_list(args.delta.clone(), sec.delta.clone(), def.delta),
        p: pick_list(args.p.clone(), file_p, def.p),
        k: args.k.or(sec.k),
        xi: pick(args.xi, sec.xi, def.xi),
        mechanisms: pick_list(args.mechanisms.clone(), sec.mechanisms.clone(), def.mechanisms),
        c0: pick(args.c0, sec.c0, def.c0),
        out: pick(args.common.out.clone(), file.run.out.clone(), def.out),
    };
    validate(&cfg)?;
    Ok(cfg)
}

pub fn validate(cfg: &LowerboundConfig) -> CliResult<()> {
    let axes = [
        ("n", cfg.n.len()),
        ("d", cfg.d.len()),
        ("epsilon", cfg.epsilon.len()),
        ("delta", cfg.delta.len()),
        ("p", cfg.p.len()),
        ("mechanisms", cfg.mechanisms.len()),
    ];
    if let Some((name, _)) = axes.iter().find(|(_, len)| *len == 0) {
        return Err(CliError::usage(format!("sweep axis {name} is empty")));
    }
    if cfg.trials == 0 {
        return Err(CliError::usage("lowerbound needs at least one trial"));
    }
    if cfg.k == Some(0) {
        return Err(CliError::usage("k must be at least 1"));
    }
    if !(cfg.c0 > 0.0) || !(cfg.xi > 0.0 && cfg.xi <= 1.0) {
        return Err(CliError::usage("c0 must be positive and xi must lie in (0, 1]"));
    }
    if cfg.n.iter().any(|&n| n < 2) || cfg.d.contains(&0) {
        return Err(CliError::usage("n must be at least 2 and d at least 1"));
    }
    for &e in &cfg.epsilon {
        for &dl in &cfg.delta {
            PrivacyBudget::new(e, dl)?;
        }
    }
    for p in &cfg.p {
        Geometry::parse(p)?;
    }
    if let Some(m) = cfg.mechanisms.iter().find(|m| !KNOWN_MECHANISMS.contains(&m.as_str())) {
        return Err(CliError::usage(format!("unknown mechanism {m:?}")));
    }
    Ok(())
}

/// Replication factor: the configured `k`, else `⌈ln(1/δ)⌉` (1 for pure DP).
pub fn replication(cfg: &LowerboundConfig, delta: f64) -> usize {
    cfg.k.unwrap_or_else(|| {
        if delta == 0.0 {
            1
        } else {
            ((1.0 / delta).ln().ceil() as usize).max(1)
        }
    })
}

#[derive(Debug, Clone)]
struct Cell {
    n: usize,
    d: usize,
    epsilon: f64,
    delta: f64,
    p: String,
    geometry: Geometry,
    mechanism: String,
    k: usize,
}

impl Cell {
    fn geometry_rank(&self) -> f64 {
        match self.geometry {
            Geometry::Lp(p) => p,
            Geometry::Infinity => f64::INFINITY,
        }
    }

    fn cmp_key(&self, other: &Cell) -> Ordering {
        self.n
            .cmp(&other.n)
            .then(self.d.cmp(&other.d))
            .then(self.epsilon.total_cmp(&other.epsilon))
            .then(self.delta.total_cmp(&other.delta))
            .then(self.geometry_rank().total_cmp(&other.geometry_rank()))
            .then(self.mechanism.cmp(&other.mechanism))
    }

    /// Noise stream shared by every geometry of the same cell: `p` only
    /// changes the reported constants.
    fn key(&self, root: SeedKey) -> SeedKey {
        root.child("cell")
            .child(&format!("{}/{}/{:e}/{:e}/{}", self.n, self.d, self.epsilon, self.delta, self.mechanism))
    }
}

struct Instance {
    data: Dataset,
    n_k: usize,
    mean: Vec<f64>,
}

fn cells(cfg: &LowerboundConfig) -> CliResult<Vec<Cell>> {
    let mut cells = Vec::new();
    for &n in &cfg.n {
        for &d in &cfg.d {
            for &epsilon in &cfg.epsilon {
                for &delta in &cfg.delta {
                    for p in &cfg.p {
                        for mechanism in &cfg.mechanisms {
                            cells.push(Cell {
                                n,
                                d,
                                epsilon,
                                delta,
                                p: p.clone(),
                                geometry: Geometry::parse(p)?,
                                mechanism: mechanism.clone(),
                                k: replication(cfg, delta),
                            });
                        }
                    }
                }
            }
        }
    }
    cells.sort_by(Cell::cmp_key);
    cells.dedup_by(|a, b| a.cmp_key(b) == Ordering::Equal);
    Ok(cells)
}

fn build_instance(cfg: &LowerboundConfig, n: usize, d: usize, k: usize) -> Result<Instance, String> {
    let n_k = n / k;
    if n_k < 2 {
        return Err(format!("n/k = {n}/{k} leaves fewer than 2 users per copy"));
    }
    let params = derive_params_with_d_core(n_k, cfg.xi, d).map_err(|e| e.to_string())?;
    let key = SeedKey::new(cfg.seed).child("instance").child(&format!("{n}/{d}/{k}"));
    let inst = fp_hard_instance(n, k, &params, key, InstanceColumns::Augmented).map_err(|e| e.to_string())?;
    let mean = inst.dataset.mean().map_err(|e| e.to_string())?;
    Ok(Instance {
        data: inst.dataset,
        n_k,
        mean,
    })
}

fn skipped(cell: &Cell, cfg: &LowerboundConfig, n_k: usize, data_dim: usize, reason: String) -> CellReport {
    let (g, c) = lp_constants(data_dim.max(1), cell.geometry).unwrap_or((f64::NAN, f64::NAN));
    CellReport {
        summary: CellRow {
            n: cell.n,
            d: cell.d,
            epsilon: cell.epsilon,
            delta: cell.delta,
            p: cell.p.clone(),
            mechanism: cell.mechanism.clone(),
            status: CellStatus::Skipped,
            reason,
            k: cell.k,
            n_k,
            data_dim,
            trials: 0,
            mean_excess: None,
            normalized_excess: None,
            q50_excess: None,
            q95_excess: None,
            mean_l2_error: None,
            g,
            c,
            curve: None,
            c0: cfg.c0,
            regime: regime(cell.delta),
        },
        trials: Vec::new(),
    }
}

fn regime(delta: f64) -> Regime {
    if delta == 0.0 {
        Regime::Pure
    } else {
        Regime::Approx
    }
}

struct Aggregates {
    mean_excess: f64,
    q50_excess: f64,
    q95_excess: f64,
    mean_l2_error: f64,
}

fn aggregate(trials: &[MechanismLogRow]) -> CliResult<Aggregates> {
    let excess: Vec<f64> = trials.iter().map(|r| r.excess_loss).collect();
    let l2: Vec<f64> = trials.iter().map(|r| r.l2_error_vs_mean).collect();
    Ok(Aggregates {
        mean_excess: mean(&excess)?,
        q50_excess: quantile(&excess, 0.5)?,
        q95_excess: quantile(&excess, 0.95)?,
        mean_l2_error: mean(&l2)?,
    })
}

fn run_cell(cfg: &LowerboundConfig, cell: &Cell, inst: &Instance) -> CliResult<CellReport> {
    let data_dim = inst.data.dim();
    if let Some(warning) = delta_warning(cell.delta, cell.n) {
        return Ok(skipped(cell, cfg, inst.n_k, data_dim, warning));
    }
    let handle = match PrivacyBudget::new(cell.epsilon, cell.delta)
        .and_then(|b| MechanismHandle::from_name(&cell.mechanism, b))
    {
        Ok(h) => h,
        Err(e) => return Ok(skipped(cell, cfg, inst.n_k, data_dim, e.to_string())),
    };
    let (g, c) = lp_constants(data_dim, cell.geometry)?;
    let loss = LossFamily::l1(data_dim, cell.geometry)?;
    let curve = match regime(cell.delta) {
        Regime::Approx => lower_bound_curve(cell.n, data_dim, cell.epsilon, cell.delta, cfg.c0)?,
        Regime::Pure => pure_lower_bound_curve(cell.n, data_dim, cell.epsilon, cfg.c0, g * c)?,
    };
    let key = cell.key(SeedKey::new(cfg.seed));
    let trials = exec::try_map_indexed(cfg.trials, |t| {
        let trial_key = key.index(t as u64);
        let theta = handle.run(&inst.data, &mut trial_key.rng())?;
        let report = excess_loss(&loss, &theta, &inst.data)?;
        Ok::<_, dperm_core::Error>(MechanismLogRow {
            mechanism: handle.name(),
            epsilon: handle.budget.epsilon,
            delta: handle.budget.delta,
            seed: trial_key.0,
            excess_loss: report.excess,
            l2_error_vs_mean: distance(&theta, &inst.mean),
        })
    })?;
    let agg = aggregate(&trials)?;
    Ok(CellReport {
        summary: CellRow {
            n: cell.n,
            d: cell.d,
            epsilon: cell.epsilon,
            delta: cell.delta,
            p: cell.p.clone(),
            mechanism: cell.mechanism.clone(),
            status: CellStatus::Ok,
            reason: String::new(),
            k: cell.k,
            n_k: inst.n_k,
            data_dim,
            trials: trials.len(),
            mean_excess: Some(agg.mean_excess),
            normalized_excess: Some(agg.mean_excess / (g * c)),
            q50_excess: Some(agg.q50_excess),
            q95_excess: Some(agg.q95_excess),
            mean_l2_error: Some(agg.mean_l2_error),
            g,
            c,
            curve: Some(curve),
            c0: cfg.c0,
            regime: regime(cell.delta),
        },
        trials,
    })
}

/// Runs the whole sweep in memory.
pub fn run_sweep(cfg: &LowerboundConfig) -> CliResult<SweepReport> {
    validate(cfg)?;
    let cells = cells(cfg)?;
    let mut keys: Vec<(usize, usize, usize)> = cells.iter().map(|c| (c.n, c.d, c.k)).collect();
    keys.sort_unstable();
    keys.dedup();
    let built = exec::map_indexed(keys.len(), |i| {
        let (n, d, k) = keys[i];
        build_instance(cfg, n, d, k)
    });
    let instances: BTreeMap<_, _> = keys.into_iter().zip(built).collect();
    let reports = exec::try_map_indexed(cells.len(), |i| {
        let cell = &cells[i];
        match &instances[&(cell.n, cell.d, cell.k)] {
            Ok(inst) => run_cell(cfg, cell, inst),
            Err(reason) => Ok(skipped(cell, cfg, cell.n / cell.k, 0, reason.clone())),
        }
    })?;
    Ok(SweepReport {
        format: REPORT_FORMAT.into(),
        config: cfg.clone(),
        cells: reports,
    })
}

pub fn to_csv(report: &SweepReport) -> CliResult<String> {
    let mut buf = format!("# dperm lowerbound config={}\n", serde_json::to_string(&report.config)?).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for row in report.rows() {
            w.serialize(row).map_err(|e| CliError::usage(format!("csv: {e}")))?;
        }
        w.flush().map_err(|e| CliError::io("csv", e))?;
    }
    String::from_utf8(buf).map_err(|e| CliError::usage(format!("csv: {e}")))
}

/// Reads a report and checks that every aggregate matches its trial rows.
pub fn load_report(path: &Path) -> CliResult<SweepReport> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
    let report: SweepReport =
        serde_json::from_str(&text).map_err(|e| CliError::Integrity(format!("{}: {e}", path.display())))?;
    verify_report(&report)?;
    Ok(report)
}

pub fn verify_report(report: &SweepReport) -> CliResult<()> {
    for cell in &report.cells {
        let row = &cell.summary;
        let bad = |what: &str| {
            CliError::Integrity(format!(
                "cell n={} d={} epsilon={} delta={} p={} {}: {what} does not match its trials",
                row.n, row.d, row.epsilon, row.delta, row.p, row.mechanism
            ))
        };
        if row.trials != cell.trials.len() {
            return Err(bad("trial count"));
        }
        if row.status == CellStatus::Skipped {
            continue;
        }
        let agg = aggregate(&cell.trials).map_err(|_| bad("trial list"))?;
        let checks = [
            ("mean_excess", row.mean_excess, agg.mean_excess),
            ("q50_excess", row.q50_excess, agg.q50_excess),
            ("q95_excess", row.q95_excess, agg.q95_excess),
            ("mean_l2_error", row.mean_l2_error, agg.mean_l2_error),
            ("normalized_excess", row.normalized_excess, agg.mean_excess / (row.g * row.c)),
        ];
        for (name, stored, recomputed) in checks {
            if stored != Some(recomputed) {
                return Err(bad(name));
            }
        }
    }
    Ok(())
}

pub fn run(cfg: &LowerboundConfig, out: &mut dyn Write) -> CliResult<()> {
    let report = run_sweep(cfg)?;
    create_dir(&cfg.out)?;
    write_file(&cfg.out.join(CSV_FILE), to_csv(&report)?.as_bytes())?;
    write_file(
        &cfg.out.join(REPORT_FILE),
        (serde_json::to_string_pretty(&report)? + "\n").as_bytes(),
    )?;
    #[derive(Serialize)]
    struct Summary {
        cells: usize,
        ok: usize,
        skipped: usize,
    }
    let ok = report.rows().filter(|r| r.status == CellStatus::Ok).count();
    print_json(
        out,
        &Summary {
            cells: report.cells.len(),
            ok,
            skipped: report.cells.len() - ok,
        },
    )
}
