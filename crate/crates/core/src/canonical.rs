//! Recovering the circulant block diagonal form of a permuted 2-regular
//! matrix.
//!
//! The row/column incidence graph of a 2-regular matrix is a disjoint union
//! of even cycles. Walking a cycle with `s` rows from row `r_0` through
//! column `c_0` and then alternately to the other column of the current row
//! and the other row of the current column lists the rows and columns in the
//! order of `D_{s, s-2}`: row `i` meets columns `i` and `i + 1 mod s`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{build_block_diagonal, is_k_regular, permute, BlockSpec, Matrix01};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalForm {
    /// Block sizes, descending.
    pub sizes: Vec<usize>,
    /// `permute(m, &row_perm, &col_perm)` is the canonical matrix.
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
}

impl CanonicalForm {
    pub fn spec(&self) -> Result<BlockSpec> {
        BlockSpec::common(2, &self.sizes)
    }
}

struct Cycle {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

fn other(pair: [usize; 2], x: usize) -> usize {
    if pair[0] == x {
        pair[1]
    } else {
        pair[0]
    }
}

fn walk(start: usize, row_cols: &[[usize; 2]], col_rows: &[[usize; 2]]) -> Result<Cycle> {
    let mut rows = vec![start];
    let mut cols = vec![row_cols[start][0]];
    let mut row = start;
    let mut col = row_cols[start][0];
    loop {
        col = other(row_cols[row], col);
        if col == cols[0] {
            break;
        }
        cols.push(col);
        row = other(col_rows[col], row);
        if row == start || rows.len() > row_cols.len() {
            return Err(Error::InvalidParameters(format!(
                "cycle through row {start} does not close on its first column"
            )));
        }
        rows.push(row);
    }
    if rows.len() != cols.len() {
        return Err(Error::InvalidParameters(format!(
            "cycle through row {start} has {} rows and {} columns",
            rows.len(),
            cols.len()
        )));
    }
    Ok(Cycle { rows, cols })
}

/// Splits a 2-regular matrix into its cycles and orders them into
/// `(2; n_1, ..., n_m)` form with `n_1 >= ... >= n_m`.
pub fn canonicalize_2regular(m: &Matrix01) -> Result<CanonicalForm> {
    if is_k_regular(m)? != Some(2) {
        return Err(Error::InvalidParameters(
            "matrix is not 2-regular: some row or column does not have exactly two ones".into(),
        ));
    }
    let n = m.n_rows();
    let row_cols: Vec<[usize; 2]> = (0..n)
        .map(|i| {
            let s = m.row_support(i);
            [s[0], s[1]]
        })
        .collect();
    let mut col_rows = vec![[usize::MAX; 2]; n];
    for (i, pair) in row_cols.iter().enumerate() {
        for &c in pair {
            let slot = if col_rows[c][0] == usize::MAX { 0 } else { 1 };
            col_rows[c][slot] = i;
        }
    }

    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let cycle = walk(start, &row_cols, &col_rows)?;
        for &r in &cycle.rows {
            seen[r] = true;
        }
        cycles.push(cycle);
    }
    // stable sort keeps ties in order of smallest row
    cycles.sort_by(|a, b| b.rows.len().cmp(&a.rows.len()));

    let form = CanonicalForm {
        sizes: cycles.iter().map(|c| c.rows.len()).collect(),
        row_perm: cycles.iter().flat_map(|c| c.rows.iter().copied()).collect(),
        col_perm: cycles.iter().flat_map(|c| c.cols.iter().copied()).collect(),
    };
    if permute(m, &form.row_perm, &form.col_perm)? != build_block_diagonal(&form.spec()?) {
        return Err(Error::InvalidParameters(
            "cycle walk did not reproduce the block diagonal form".into(),
        ));
    }
    Ok(form)
}
