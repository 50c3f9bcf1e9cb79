//! Text and JSON formats for codebooks and secrets.
//!
//! Codebook: a header `fpcode v1 n=<n> d_core=<d> xi=<ξ>` followed by one
//! line of `0`/`1` characters per user. Secret: JSON with `p`, `perm`,
//! `dummy_marks` and `params`.

use super::generate::{CodeSecret, Codebook};
use super::params::derive_params_with_d_core;
use crate::bits::{format_word, parse_word, BitMatrix};
use crate::error::{Error, Result};
use std::fs;
use std::path::Path;

pub fn codebook_to_string(book: &Codebook) -> String {
    let p = &book.params;
    let mut out = format!("fpcode v1 n={} d_core={} xi={}\n", p.n, p.d_core, p.xi);
    for i in 0..book.bits.rows() {
        out.push_str(&format_word(book.bits.row(i)));
        out.push('\n');
    }
    out
}

fn header_field<'a>(tokens: &[&'a str], key: &str) -> Result<&'a str> {
    tokens
        .iter()
        .find_map(|tok| tok.strip_prefix(key).and_then(|rest| rest.strip_prefix('=')))
        .ok_or_else(|| Error::Parse(format!("codebook header lacks {key}=")))
}

pub fn parse_codebook(text: &str) -> Result<Codebook> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty codebook file".into()))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() < 2 || tokens[0] != "fpcode" || tokens[1] != "v1" {
        return Err(Error::Parse(format!("bad codebook header {header:?}")));
    }
    let num = |key: &str| -> Result<usize> {
        header_field(&tokens, key)?
            .parse()
            .map_err(|e| Error::Parse(format!("{key}: {e}")))
    };
    let n = num("n")?;
    let d_core = num("d_core")?;
    let xi: f64 = header_field(&tokens, "xi")?
        .parse()
        .map_err(|e| Error::Parse(format!("xi: {e}")))?;
    let params = derive_params_with_d_core(n, xi, d_core)?;

    let rows = lines
        .filter(|l| !l.trim().is_empty())
        .map(parse_word)
        .collect::<Result<Vec<_>>>()?;
    if rows.len() != n {
        return Err(Error::Parse(format!("expected {n} codeword rows, found {}", rows.len())));
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != params.d_total) {
        return Err(Error::Parse(format!(
            "codeword of length {} where {} was expected",
            bad.len(),
            params.d_total
        )));
    }
    Ok(Codebook {
        bits: BitMatrix::from_rows(&rows)?,
        params,
    })
}

pub fn write_codebook(book: &Codebook, path: &Path) -> Result<()> {
    fs::write(path, codebook_to_string(book))?;
    Ok(())
}

pub fn read_codebook(path: &Path) -> Result<Codebook> {
    parse_codebook(&fs::read_to_string(path)?)
}

pub fn secret_to_string(secret: &CodeSecret) -> Result<String> {
    Ok(serde_json::to_string(secret)? + "\n")
}

pub fn write_secret(secret: &CodeSecret, path: &Path) -> Result<()> {
    fs::write(path, secret_to_string(secret)?)?;
    Ok(())
}

pub fn read_secret(path: &Path) -> Result<CodeSecret> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
