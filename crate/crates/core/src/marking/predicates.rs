use crate::bits::{BitMatrix, BitWord};
use crate::error::{check_len, invalid, Error, Result};
use crate::fpcode::Codebook;

/// The rows of a coalition `S`, which is all an adversary gets to see.
#[derive(Clone, Debug, PartialEq)]
pub struct CoalitionView {
    rows: BitMatrix,
    member_ids: Vec<usize>,
}

impl CoalitionView {
    pub fn new(rows: BitMatrix, member_ids: Vec<usize>) -> Result<Self> {
        check_len(member_ids.len(), rows.rows())?;
        let mut sorted = member_ids.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("coalition members must be distinct"));
        }
        Ok(CoalitionView { rows, member_ids })
    }

    /// The coalition's rows of the published codebook.
    pub fn from_codebook(book: &Codebook, members: &[usize]) -> Result<Self> {
        if let Some(&bad) = members.iter().find(|&&i| i >= book.bits.rows()) {
            return Err(invalid(format!("coalition member {bad} out of range for n = {}", book.bits.rows())));
        }
        CoalitionView::new(book.bits.select_rows(members), members.to_vec())
    }

    pub fn rows(&self) -> &BitMatrix {
        &self.rows
    }

    pub fn member_ids(&self) -> &[usize] {
        &self.member_ids
    }

    pub fn len(&self) -> usize {
        self.member_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.member_ids.is_empty()
    }

    pub fn width(&self) -> usize {
        self.rows.cols()
    }

    /// The coalition's common value on column `j`, if all members agree.
    pub fn constant_value(&self, j: usize) -> Option<u8> {
        let first = self.rows.get(0, j);
        (1..self.rows.rows()).all(|i| self.rows.get(i, j) == first).then_some(first)
    }
}

/// Fraction of columns where the coalition is constant and `c` differs from
/// that constant. Columns on which members disagree never count.
pub fn marking_violation_fraction(view: &CoalitionView, c: &[u8]) -> Result<f64> {
    check_len(view.width(), c.len())?;
    if view.is_empty() || view.width() == 0 {
        return Err(invalid("marking condition needs a nonempty coalition and word"));
    }
    let violations = (0..view.width())
        .filter(|&j| view.constant_value(j).is_some_and(|v| v != c[j]))
        .count();
    Ok(violations as f64 / view.width() as f64)
}

/// Membership in `F_β(C_S)`: at most a `β` fraction of marking violations.
pub fn in_f_beta(view: &CoalitionView, c: &[u8], beta: f64) -> Result<bool> {
    if !(0.0..1.0).contains(&beta) {
        return Err(invalid(format!("beta must lie in [0, 1), got {beta}")));
    }
    Ok(marking_violation_fraction(view, c)? <= beta)
}

/// Fraction of columns whose mean lies within `α` of 1/2.
pub fn biased_mean_fraction(matrix: &BitMatrix, alpha: f64) -> Result<f64> {
    if matrix.rows() == 0 || matrix.cols() == 0 {
        return Err(Error::EmptyDataset);
    }
    if !(0.0..=0.5).contains(&alpha) {
        return Err(invalid(format!("alpha must lie in [0, 1/2], got {alpha}")));
    }
    let n = matrix.rows() as f64;
    let near = matrix
        .column_popcounts()
        .into_iter()
        .filter(|&c| (c as f64 / n - 0.5).abs() <= alpha)
        .count();
    Ok(near as f64 / matrix.cols() as f64)
}

/// Coordinate-wise rounding: 1 where `θ_j ≥ 1/2`, else 0.
pub fn round_to_binary(theta: &[f64]) -> BitWord {
    theta.iter().map(|&v| u8::from(v >= 0.5)).collect()
}
