use crate::bits::BitMatrix;
use crate::error::{check_len, invalid, Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

/// Which domain the rows of a dataset are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainTag {
    /// `{0,1}^d`
    Binary,
    /// `{0,1}^d ∪ {1/2}^d`, entries in `{0, 1/2, 1}`
    BinaryHalf,
    /// `{±1/√d}^d ∪ {0}^d`
    Packing,
    Real,
}

impl DomainTag {
    pub fn as_str(self) -> &'static str {
        match self {
            DomainTag::Binary => "binary",
            DomainTag::BinaryHalf => "binary_half",
            DomainTag::Packing => "packing",
            DomainTag::Real => "real",
        }
    }
}

impl fmt::Display for DomainTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DomainTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(DomainTag::Binary),
            "binary_half" => Ok(DomainTag::BinaryHalf),
            "packing" => Ok(DomainTag::Packing),
            "real" => Ok(DomainTag::Real),
            other => Err(Error::Parse(format!("unknown domain tag {other:?}"))),
        }
    }
}

/// `n × d` real matrix of data points, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    n: usize,
    d: usize,
    points: Vec<f64>,
    tag: DomainTag,
}

const PACKING_TOL: f64 = 1e-12;

fn row_fits(tag: DomainTag, row: &[f64]) -> bool {
    match tag {
        DomainTag::Binary => row.iter().all(|&v| v == 0.0 || v == 1.0),
        DomainTag::BinaryHalf => row.iter().all(|&v| v == 0.0 || v == 0.5 || v == 1.0),
        DomainTag::Packing => {
            let s = 1.0 / (row.len() as f64).sqrt();
            row.iter().all(|&v| v == 0.0) || row.iter().all(|&v| (v.abs() - s).abs() <= PACKING_TOL)
        }
        DomainTag::Real => row.iter().all(|v| v.is_finite()),
    }
}

impl Dataset {
    /// Builds a dataset from row-major values, validating the domain tag.
    pub fn new(d: usize, points: Vec<f64>, tag: DomainTag) -> Result<Self> {
        if d == 0 {
            return Err(invalid("dataset dimension must be positive"));
        }
        if !points.len().is_multiple_of(d) {
            return Err(invalid(format!("{} values do not form rows of length {d}", points.len())));
        }
        let n = points.len() / d;
        if let Some(i) = (0..n).find(|&i| !row_fits(tag, &points[i * d..(i + 1) * d])) {
            return Err(invalid(format!("row {i} lies outside the {tag} domain")));
        }
        Ok(Dataset { n, d, points, tag })
    }

    pub fn from_rows(rows: &[Vec<f64>], tag: DomainTag) -> Result<Self> {
        let d = rows.first().map(Vec::len).ok_or(Error::EmptyDataset)?;
        let mut points = Vec::with_capacity(rows.len() * d);
        for row in rows {
            check_len(d, row.len())?;
            points.extend_from_slice(row);
        }
        Dataset::new(d, points, tag)
    }

    pub fn from_bits(bits: &BitMatrix) -> Self {
        let points = (0..bits.rows())
            .flat_map(|i| bits.row(i).iter().map(|&b| f64::from(b)))
            .collect();
        Dataset {
            n: bits.rows(),
            d: bits.cols(),
            points,
            tag: DomainTag::Binary,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn tag(&self) -> DomainTag {
        self.tag
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.d)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    /// Column means `q(D)`.
    pub fn mean(&self) -> Result<Vec<f64>> {
        if self.n == 0 {
            return Err(Error::EmptyDataset);
        }
        let mut sum = vec![0.0; self.d];
        for row in self.rows() {
            for (s, v) in sum.iter_mut().zip(row) {
                *s += v;
            }
        }
        let n = self.n as f64;
        Ok(sum.into_iter().map(|s| s / n).collect())
    }

    /// Sub-dataset of the listed rows.
    pub fn select_rows(&self, ids: &[usize]) -> Dataset {
        let mut points = Vec::with_capacity(ids.len() * self.d);
        for &i in ids {
            points.extend_from_slice(self.row(i));
        }
        Dataset {
            n: ids.len(),
            d: self.d,
            points,
            tag: self.tag,
        }
    }

    /// Appends rows, widening the tag if they fall outside the current domain.
    pub fn push_row(&mut self, row: &[f64]) -> Result<()> {
        check_len(self.d, row.len())?;
        if !row_fits(self.tag, row) {
            let widened = [DomainTag::BinaryHalf, DomainTag::Real]
                .into_iter()
                .find(|&t| row_fits(t, row) && self.rows().all(|r| row_fits(t, r)))
                .ok_or_else(|| invalid("row is not finite"))?;
            self.tag = widened;
        }
        self.points.extend_from_slice(row);
        self.n += 1;
        Ok(())
    }

    /// Largest ℓ1 distance between two points of the tagged domain.
    pub fn l1_domain_diameter(&self) -> f64 {
        let d = self.d as f64;
        match self.tag {
            DomainTag::Binary | DomainTag::BinaryHalf => d,
            DomainTag::Packing => 2.0 * d.sqrt(),
            DomainTag::Real => 2.0 * d,
        }
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = format!("d={} tag={}\n", self.d, self.tag);
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty dataset file".into()))?;
        let mut d = None;
        let mut tag = None;
        for tok in header.split_whitespace() {
            if let Some(v) = tok.strip_prefix("d=") {
                d = Some(v.parse::<usize>().map_err(|e| Error::Parse(format!("d: {e}")))?);
            } else if let Some(v) = tok.strip_prefix("tag=") {
                tag = Some(v.parse::<DomainTag>()?);
            }
        }
        let (d, tag) = match (d, tag) {
            (Some(d), Some(tag)) => (d, tag),
            _ => return Err(Error::Parse(format!("bad dataset header {header:?}"))),
        };
        let mut points = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let row = line
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{v:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            check_len(d, row.len())?;
            points.extend(row);
        }
        Dataset::new(d, points, tag)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Dataset::parse_csv(&fs::read_to_string(path)?)
    }
}
