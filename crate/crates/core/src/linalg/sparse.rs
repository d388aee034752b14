//! Column-compressed integer matrices.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("entry ({row}, {col}) out of range for {rows}x{cols} matrix")]
    OutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("integer overflow while combining entries")]
    Overflow,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("malformed matrix dump: {0}")]
    Parse(String),
}

/// Sparse integer matrix stored by columns.
///
/// Entries within a column are sorted by row, deduplicated and nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    vals: Vec<i64>,
}

impl SparseIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            col_ptr: vec![0; cols + 1],
            row_idx: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// zeros dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<Self, MatrixError> {
        let mut t: Vec<(usize, usize, i64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(MatrixError::OutOfRange { row: r, col: c, rows, cols });
            }
            t.push((c, r, v));
        }
        t.sort_unstable_by_key(|&(c, r, _)| (c, r));
        let mut col_ptr = vec![0usize; cols + 1];
        let mut row_idx = Vec::with_capacity(t.len());
        let mut vals: Vec<i64> = Vec::with_capacity(t.len());
        let mut i = 0;
        while i < t.len() {
            let (c, r, mut v) = t[i];
            let mut j = i + 1;
            while j < t.len() && t[j].0 == c && t[j].1 == r {
                v = v.checked_add(t[j].2).ok_or(MatrixError::Overflow)?;
                j += 1;
            }
            if v != 0 {
                row_idx.push(r as u32);
                vals.push(v);
                col_ptr[c + 1] += 1;
            }
            i = j;
        }
        for c in 0..cols {
            col_ptr[c + 1] += col_ptr[c];
        }
        Ok(Self { rows, cols, col_ptr, row_idx, vals })
    }

    /// Builds from per-column entry lists (rows need not be sorted).
    pub fn from_columns(rows: usize, columns: Vec<Vec<(u32, i64)>>) -> Result<Self, MatrixError> {
        let cols = columns.len();
        let trip = columns
            .into_iter()
            .enumerate()
            .flat_map(|(c, col)| col.into_iter().map(move |(r, v)| (r as usize, c, v)));
        Self::from_triplets(rows, cols, trip)
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let trip = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v)));
        Self::from_triplets(nrows, ncols, trip).expect("dense input is in range")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn column(&self, c: usize) -> impl Iterator<Item = (u32, i64)> + '_ {
        let (a, b) = (self.col_ptr[c], self.col_ptr[c + 1]);
        self.row_idx[a..b].iter().copied().zip(self.vals[a..b].iter().copied())
    }

    pub fn column_len(&self, c: usize) -> usize {
        self.col_ptr[c + 1] - self.col_ptr[c]
    }

    /// All entries in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        (0..self.cols).flat_map(move |c| self.column(c).map(move |(r, v)| (r as usize, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.column(c).find(|&(i, _)| i as usize == r).map_or(0, |(_, v)| v)
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn max_abs(&self) -> i64 {
        self.vals.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.triplets().map(|(r, c, v)| (c, r, v)))
            .expect("transpose stays in range")
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0i64; self.cols]; self.rows];
        for (r, c, v) in self.triplets() {
            d[r][c] = v;
        }
        d
    }

    /// Product `self * rhs` over the integers with overflow checks.
    pub fn mul(&self, rhs: &Self) -> Result<Self, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::Shape(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut acc = vec![0i128; self.rows];
        let mut touched: Vec<u32> = Vec::new();
        let mut columns = Vec::with_capacity(rhs.cols);
        for c in 0..rhs.cols {
            for (k, b) in rhs.column(c) {
                for (r, a) in self.column(k as usize) {
                    if acc[r as usize] == 0 {
                        touched.push(r);
                    }
                    acc[r as usize] += a as i128 * b as i128;
                }
            }
            let mut col = Vec::with_capacity(touched.len());
            for r in touched.drain(..) {
                let v = std::mem::take(&mut acc[r as usize]);
                if v != 0 {
                    col.push((r, i64::try_from(v).map_err(|_| MatrixError::Overflow)?));
                }
            }
            columns.push(col);
        }
        Self::from_columns(self.rows, columns)
    }

    /// Submatrix keeping the listed rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut row_map = vec![u32::MAX; self.rows];
        for (i, &r) in rows.iter().enumerate() {
            row_map[r] = i as u32;
        }
        let columns = cols
            .iter()
            .map(|&c| {
                self.column(c)
                    .filter(|&(r, _)| row_map[r as usize] != u32::MAX)
                    .map(|(r, v)| (row_map[r as usize], v))
                    .collect()
            })
            .collect();
        Self::from_columns(rows.len(), columns).expect("selection stays in range")
    }

    /// Side-by-side concatenation `[self | rhs]`.
    pub fn hconcat(&self, rhs: &Self) -> Result<Self, MatrixError> {
        if self.rows != rhs.rows {
            return Err(MatrixError::Shape("row counts differ".into()));
        }
        let shift = self.cols;
        let trip = self
            .triplets()
            .chain(rhs.triplets().map(|(r, c, v)| (r, c + shift, v)));
        Self::from_triplets(self.rows, self.cols + rhs.cols, trip)
    }

    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        let trip = self.triplets().map(|(r, c, v)| (row_perm[r], col_perm[c], v));
        Self::from_triplets(self.rows, self.cols, trip).expect("permutation stays in range")
    }

    /// Text dump: header `rows cols M`, then 1-indexed `i j v`, then `0 0 0`.
    pub fn to_sms(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {} M", self.rows, self.cols).unwrap();
        for (r, c, v) in self.triplets() {
            writeln!(out, "{} {} {}", r + 1, c + 1, v).unwrap();
        }
        out.push_str("0 0 0\n");
        out
    }

    pub fn from_sms(text: &str) -> Result<Self, MatrixError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| MatrixError::Parse("missing header".into()))?
            .split_whitespace()
            .collect();
        if header.len() != 3 {
            return Err(MatrixError::Parse("header must be `rows cols M`".into()));
        }
        let parse = |s: &str| {
            s.parse::<i64>()
                .map_err(|e| MatrixError::Parse(format!("{s:?}: {e}")))
        };
        let rows = parse(header[0])? as usize;
        let cols = parse(header[1])? as usize;
        let mut trip = Vec::new();
        let mut terminated = false;
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(MatrixError::Parse(format!("bad line {line:?}")));
            }
            let (i, j, v) = (parse(f[0])?, parse(f[1])?, parse(f[2])?);
            if i == 0 && j == 0 && v == 0 {
                terminated = true;
                break;
            }
            if i < 1 || j < 1 {
                return Err(MatrixError::Parse(format!("indices must be 1-based: {line:?}")));
            }
            trip.push((i as usize - 1, j as usize - 1, v));
        }
        if !terminated {
            return Err(MatrixError::Parse("missing `0 0 0` terminator".into()));
        }
        Self::from_triplets(rows, cols, trip)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_are_merged() {
        let m = SparseIntMatrix::from_triplets(2, 2, [(0, 0, 1), (0, 0, -1), (1, 1, 2), (1, 1, 3)])
            .unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 1), 5);
        assert!(SparseIntMatrix::from_triplets(1, 1, [(1, 0, 1)]).is_err());
    }

    #[test]
    fn product_and_transpose() {
        let a = SparseIntMatrix::from_dense(&[vec![1, 2], vec![0, 3]]);
        let b = SparseIntMatrix::from_dense(&[vec![4, 0], vec![1, -1]]);
        assert_eq!(a.mul(&b).unwrap().to_dense(), vec![vec![6, -2], vec![3, -3]]);
        assert_eq!(a.transpose().to_dense(), vec![vec![1, 0], vec![2, 3]]);
    }

    #[test]
    fn sms_round_trip() {
        let a = SparseIntMatrix::from_dense(&[vec![1, 0, -2], vec![0, 0, 7]]);
        let text = a.to_sms();
        assert!(text.starts_with("2 3 M\n"));
        assert!(text.ends_with("0 0 0\n"));
        assert_eq!(SparseIntMatrix::from_sms(&text).unwrap(), a);
        assert!(SparseIntMatrix::from_sms("2 2 M\n1 1 1\n").is_err());
    }
}
