//! Dense binary matrices and words stored one byte per bit.

use crate::error::{check_len, invalid, Result};
use serde::{Deserialize, Serialize};

/// A binary word; every entry is 0 or 1.
pub type BitWord = Vec<u8>;

/// Row-major `rows × cols` matrix over {0, 1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[BitWord]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            check_len(cols, row.len())?;
            if row.iter().any(|&b| b > 1) {
                return Err(invalid("bit matrix entries must be 0 or 1"));
            }
            data.extend_from_slice(row);
        }
        Ok(BitMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix from column vectors of equal length `rows`.
    pub fn from_columns(rows: usize, columns: &[BitWord]) -> Self {
        let cols = columns.len();
        let mut data = vec![0u8; rows * cols];
        for (j, col) in columns.iter().enumerate() {
            debug_assert_eq!(col.len(), rows);
            for (i, &b) in col.iter().enumerate() {
                data[i * cols + j] = b;
            }
        }
        BitMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, bit: u8) {
        self.data[i * self.cols + j] = bit & 1;
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> BitWord {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Number of ones in column `j`.
    pub fn column_popcount(&self, j: usize) -> usize {
        (0..self.rows).filter(|&i| self.get(i, j) == 1).count()
    }

    pub fn column_popcounts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.cols];
        for i in 0..self.rows {
            for (c, &b) in counts.iter_mut().zip(self.row(i)) {
                *c += b as usize;
            }
        }
        counts
    }

    /// Sub-matrix made of the listed rows, in the listed order.
    pub fn select_rows(&self, ids: &[usize]) -> BitMatrix {
        let mut data = Vec::with_capacity(ids.len() * self.cols);
        for &i in ids {
            data.extend_from_slice(self.row(i));
        }
        BitMatrix {
            rows: ids.len(),
            cols: self.cols,
            data,
        }
    }

    /// Sub-matrix made of the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(cols.iter().map(|&j| row[j]));
        }
        BitMatrix {
            rows: self.rows,
            cols: cols.len(),
            data,
        }
    }

    pub fn to_rows(&self) -> Vec<BitWord> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

/// Parses a word written as `0`/`1` characters, ignoring surrounding whitespace.
pub fn parse_word(text: &str) -> Result<BitWord> {
    text.trim()
        .chars()
        .map(|ch| match ch {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(crate::Error::Parse(format!("unexpected character {other:?} in binary word"))),
        })
        .collect()
}

pub fn format_word(word: &[u8]) -> String {
    word.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}
