pub mod attack;
pub mod audit;
pub mod gen;
pub mod lowerbound;
pub mod trace;

use crate::error::{CliError, CliResult};
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::Path;

pub(crate) fn write_file(path: &Path, contents: &[u8]) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(&format!("writing {}", path.display()), e))
}

pub(crate) fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(&format!("creating {}", path.display()), e))
}

pub(crate) fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(out, "{text}").map_err(|e| CliError::io("writing output", e))
}

pub(crate) fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::io("writing output", e))
}
