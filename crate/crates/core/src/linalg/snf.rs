//! Smith normal form of modest dense integer matrices.
//!
//! Entries are held as `i128` and every operation is overflow-checked.
//! Coefficient growth is contained by always pivoting on the entry of
//! smallest absolute value in the active block, so each reduction step
//! strictly shrinks the pivot until it divides its row and column.

use num_integer::Integer;
use thiserror::Error;

use super::sparse::SparseIntMatrix;

/// Dense inputs with more entries than this are rejected.
pub const SNF_MAX_ENTRIES: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SnfError {
    #[error("{rows}x{cols} matrix exceeds the dense Smith form limit of {SNF_MAX_ENTRIES} entries")]
    TooLarge { rows: usize, cols: usize },
    #[error("coefficient overflow during Smith reduction")]
    Overflow,
}

fn ck(v: Option<i128>) -> Result<i128, SnfError> {
    v.ok_or(SnfError::Overflow)
}

/// Nonzero invariant factors `d_1 | d_2 | ... | d_r`, with `r` the rank.
pub fn smith_normal_form(m: &SparseIntMatrix) -> Result<Vec<u64>, SnfError> {
    let (rows, cols) = (m.rows(), m.cols());
    if rows.saturating_mul(cols) > SNF_MAX_ENTRIES {
        return Err(SnfError::TooLarge { rows, cols });
    }
    // drop empty rows and columns up front
    let mut used_rows: Vec<usize> = m.triplets().map(|(r, _, _)| r).collect();
    used_rows.sort_unstable();
    used_rows.dedup();
    let used_cols: Vec<usize> = (0..cols).filter(|&c| m.column_len(c) > 0).collect();
    let sub = m.select(&used_rows, &used_cols);
    let mut a: Vec<Vec<i128>> = sub
        .to_dense()
        .into_iter()
        .map(|r| r.into_iter().map(i128::from).collect())
        .collect();
    let (nr, nc) = (a.len(), used_cols.len());
    let mut diag: Vec<i128> = Vec::new();
    for t in 0..nr.min(nc) {
        loop {
            let mut best: Option<(i128, usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, &x) in row.iter().enumerate().skip(t) {
                    if x != 0 && best.is_none_or(|(b, _, _)| x.abs() < b) {
                        best = Some((x.abs(), i, j));
                        if x.abs() == 1 {
                            break;
                        }
                    }
                }
                if best.is_some_and(|(b, _, _)| b == 1) {
                    break;
                }
            }
            let Some((_, pi, pj)) = best else {
                return finish(diag);
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let pivot = a[t][t];
            let mut clean = true;
            for i in t + 1..nr {
                let q = a[i][t].div_euclid(pivot);
                if q != 0 {
                    for j in t..nc {
                        let sub = ck(q.checked_mul(a[t][j]))?;
                        a[i][j] = ck(a[i][j].checked_sub(sub))?;
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..nc {
                let q = a[t][j].div_euclid(pivot);
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        let sub = ck(q.checked_mul(row[t]))?;
                        row[j] = ck(row[j].checked_sub(sub))?;
                    }
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // pivot must divide the rest of the block; otherwise fold a row in
            let bad = (t + 1..nr).find(|&i| a[i][t + 1..].iter().any(|&x| x % pivot != 0));
            match bad {
                Some(i) => {
                    for j in t..nc {
                        a[t][j] = ck(a[t][j].checked_add(a[i][j]))?;
                    }
                }
                None => {
                    diag.push(pivot.abs());
                    break;
                }
            }
        }
    }
    finish(diag)
}

fn finish(mut diag: Vec<i128>) -> Result<Vec<u64>, SnfError> {
    // enforce the divisibility chain by gcd/lcm exchange
    let n = diag.len();
    for i in 0..n {
        for j in i + 1..n {
            let g = diag[i].gcd(&diag[j]);
            let l = ck((diag[i] / g).checked_mul(diag[j]))?;
            diag[i] = g;
            diag[j] = l;
        }
    }
    diag.into_iter()
        .map(|d| u64::try_from(d).map_err(|_| SnfError::Overflow))
        .collect()
}
