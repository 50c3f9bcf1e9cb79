use super::{create_dir, print_json, write_file};
use crate::config::{pick, FileConfig};
use crate::error::{CliError, CliResult};
use crate::GenArgs;
use dperm_core::fpcode::io::{codebook_to_string, secret_to_string};
use dperm_core::fpcode::{derive_params, derive_params_with_d_core, gen, CodeParams};
use dperm_core::hardgen::{
    fp_hard_instance, InstanceColumns, InstanceFiles, InstanceManifest, PaddingRegime, MANIFEST_FORMAT,
};
use dperm_core::SeedKey;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;

pub const CODEBOOK_FILE: &str = "codebook.txt";
pub const SECRET_FILE: &str = "secret.json";
pub const DATASET_FILE: &str = "dataset.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct GenConfig {
    pub seed: u64,
    pub n: usize,
    pub xi: f64,
    pub d: Option<usize>,
    pub k: Option<usize>,
    pub rows: Option<usize>,
    #[serde(skip)]
    pub out: PathBuf,
}

pub fn resolve(args: &GenArgs, file: &FileConfig) -> CliResult<GenConfig> {
    let cfg = GenConfig {
        seed: pick(args.common.seed, file.run.seed, 0),
        n: args.n.or(file.gen.n).ok_or_else(|| CliError::usage("gen needs --n"))?,
        xi: pick(args.xi, file.gen.xi, 0.1),
        d: args.d.or(file.gen.d),
        k: args.k.or(file.gen.k),
        rows: args.rows.or(file.gen.rows),
        out: pick(args.common.out.clone(), file.run.out.clone(), PathBuf::from("fpcode-out")),
    };
    if cfg.rows.is_some() && cfg.k.is_none() {
        return Err(CliError::usage("--rows needs --k"));
    }
    Ok(cfg)
}

pub fn params(cfg: &GenConfig) -> CliResult<CodeParams> {
    Ok(match cfg.d {
        Some(d) => derive_params_with_d_core(cfg.n, cfg.xi, d)?,
        None => derive_params(cfg.n, cfg.xi)?,
    })
}

pub fn run(cfg: &GenConfig, out: &mut dyn Write) -> CliResult<()> {
    let params = params(cfg)?;
    let key = SeedKey::new(cfg.seed);
    create_dir(&cfg.out)?;
    let mut files = InstanceFiles {
        codebook: CODEBOOK_FILE.into(),
        secret: SECRET_FILE.into(),
        dataset: None,
    };
    let mut manifest_rows = None;
    let (book, secret) = match cfg.k {
        Some(k) => {
            let rows = cfg.rows.unwrap_or(k * cfg.n);
            if k == 0 || rows / k != cfg.n {
                return Err(CliError::usage(format!("{rows} rows with k = {k} do not give {} users", cfg.n)));
            }
            let inst = fp_hard_instance(rows, k, &params, key, InstanceColumns::Augmented)?;
            write_file(&cfg.out.join(DATASET_FILE), inst.dataset.to_csv_string().as_bytes())?;
            files.dataset = Some(DATASET_FILE.into());
            manifest_rows = Some(rows);
            (inst.codebook, inst.secret)
        }
        None => gen(&params, key),
    };
    write_file(&cfg.out.join(CODEBOOK_FILE), codebook_to_string(&book).as_bytes())?;
    write_file(&cfg.out.join(SECRET_FILE), secret_to_string(&secret)?.as_bytes())?;
    let manifest = InstanceManifest {
        format: MANIFEST_FORMAT.into(),
        seed: cfg.seed,
        params: params.clone(),
        n_rows: manifest_rows,
        k: cfg.k,
        columns: cfg.k.map(|_| InstanceColumns::Augmented),
        padding: cfg.k.map(|_| PaddingRegime::Zeros),
        files,
    };
    manifest.write(&cfg.out.join(MANIFEST_FILE))?;
    print_json(out, &params)
}
