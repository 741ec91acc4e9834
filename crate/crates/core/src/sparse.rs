//! Compressed sparse row storage for the assembled operators.

use std::io::{self, BufRead, Write};
use std::ops::Deref;

use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SparseError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not symmetric: |A_ij - A_ji| = {deviation} at ({row}, {col})")]
    NotSymmetric {
        row: usize,
        col: usize,
        deviation: f64,
    },
    #[error("matrix market parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Rows above this size are multiplied in parallel.
const PARALLEL_ROWS: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed in
    /// input order and exact zeros are kept.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, SparseError> {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in triplets {
            if r >= nrows || c >= ncols {
                return Err(SparseError::Dimension(format!(
                    "entry ({r}, {c}) outside {nrows}x{ncols}"
                )));
            }
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(r, c, v) in triplets {
            cols[fill[r]] = c;
            vals[fill[r]] = v;
            fill[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        for r in 0..nrows {
            let mut entries: Vec<(usize, f64)> = (counts[r]..counts[r + 1])
                .map(|i| (cols[i], vals[i]))
                .collect();
            // Stable sort keeps duplicate summation in input order.
            entries.sort_by_key(|e| e.0);
            for (c, v) in entries {
                if col_idx.len() > row_ptr[r] && *col_idx.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let triplets: Vec<_> = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(move |(j, v)| (i, j, *v))
            })
            .collect();
        Self::from_triplets(nrows, ncols, &triplets).expect("in-range entries")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[range.clone()].binary_search(&c) {
            Ok(i) => self.values[range.start + i],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    fn row_dot(&self, r: usize, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in self.row_ptr[r]..self.row_ptr[r + 1] {
            acc += self.values[i] * x[self.col_idx[i]];
        }
        acc
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols, "vector length");
        assert_eq!(y.len(), self.nrows, "output length");
        if self.nrows >= PARALLEL_ROWS {
            y.par_iter_mut()
                .enumerate()
                .for_each(|(r, out)| *out = self.row_dot(r, x));
        } else {
            for (r, out) in y.iter_mut().enumerate() {
                *out = self.row_dot(r, x);
            }
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for i in 0..self.ncols {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        // Rows visited in increasing order keep each transposed row sorted.
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                col_idx[fill[c]] = r;
                values[fill[c]] = v;
                fill[c] += 1;
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr: counts,
            col_idx,
            values,
        }
    }

    /// Sparse product `self · other` by row accumulation.
    pub fn matmul(&self, other: &CsrMatrix) -> Result<Self, SparseError> {
        if self.ncols != other.nrows {
            return Err(SparseError::Dimension(format!(
                "{}x{} times {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut acc = vec![0.0; other.ncols];
        let mut seen = vec![usize::MAX; other.ncols];
        let mut touched = Vec::new();
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for r in 0..self.nrows {
            touched.clear();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if seen[c] != r {
                        seen[c] = r;
                        acc[c] = 0.0;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                col_idx.push(c);
                values.push(acc[c]);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            nrows: self.nrows,
            ncols: other.ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// `self + scale · other`.
    pub fn add_scaled(&self, other: &CsrMatrix, scale: f64) -> Result<Self, SparseError> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(SparseError::Dimension("add: shapes differ".into()));
        }
        let triplets: Vec<_> = self
            .triplets()
            .chain(other.triplets().map(|(r, c, v)| (r, c, scale * v)))
            .collect();
        Self::from_triplets(self.nrows, self.ncols, &triplets)
    }

    /// Largest `|A_ij − A_ji|` over stored entries and their mirrors.
    pub fn symmetry_defect(&self) -> f64 {
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r)).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|A_ij + A_ji|`.
    pub fn skew_defect(&self) -> f64 {
        self.triplets()
            .map(|(r, c, v)| (v + self.get(c, r)).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }
}

/// A square CSR matrix with `|A_ij − A_ji| ≤ 1e−14 · max|A|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix(CsrMatrix);

impl SparseSymMatrix {
    pub fn new(m: CsrMatrix) -> Result<Self, SparseError> {
        if !m.is_square() {
            return Err(SparseError::Dimension(format!(
                "symmetric matrix must be square, got {}x{}",
                m.nrows, m.ncols
            )));
        }
        let limit = 1e-14 * m.max_abs();
        for (r, c, v) in m.triplets() {
            let deviation = (v - m.get(c, r)).abs();
            if deviation > limit {
                return Err(SparseError::NotSymmetric {
                    row: r,
                    col: c,
                    deviation,
                });
            }
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows
    }

    pub fn as_csr(&self) -> &CsrMatrix {
        &self.0
    }

    pub fn into_csr(self) -> CsrMatrix {
        self.0
    }

    /// `A + c I`.
    pub fn shifted(&self, c: f64) -> Self {
        let shift = CsrMatrix::from_diagonal(&vec![c; self.dim()]);
        Self(self.0.add_scaled(&shift, 1.0).expect("same shape"))
    }

    /// Writes the lower triangle in MatrixMarket coordinate format, 1-based.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> io::Result<()> {
        let lower: Vec<_> = self.0.triplets().filter(|(r, c, _)| c <= r).collect();
        writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(w, "{} {} {}", self.dim(), self.dim(), lower.len())?;
        for (r, c, v) in lower {
            writeln!(w, "{} {} {:e}", r + 1, c + 1, v)?;
        }
        Ok(())
    }

    pub fn read_matrix_market<R: BufRead>(r: R) -> Result<Self, SparseError> {
        let mut lines = r.lines().enumerate();
        let perr = |line: usize, msg: &str| SparseError::Parse {
            line: line + 1,
            msg: msg.to_string(),
        };
        let (_, header) = lines.next().ok_or_else(|| perr(0, "empty input"))?;
        let header = header?;
        if !header
            .to_ascii_lowercase()
            .starts_with("%%matrixmarket matrix coordinate real symmetric")
        {
            return Err(perr(0, "unsupported header"));
        }
        let mut size: Option<(usize, usize)> = None;
        let mut triplets = Vec::new();
        for (ln, line) in lines {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('%') {
                continue;
            }
            let fields: Vec<&str> = t.split_whitespace().collect();
            if size.is_none() {
                let [rows, cols, _] = fields[..] else {
                    return Err(perr(ln, "size line needs three fields"));
                };
                let rows: usize = rows.parse().map_err(|_| perr(ln, "bad row count"))?;
                let cols: usize = cols.parse().map_err(|_| perr(ln, "bad column count"))?;
                size = Some((rows, cols));
                continue;
            }
            let [r, c, v] = fields[..] else {
                return Err(perr(ln, "entry needs three fields"));
            };
            let r: usize = r.parse().map_err(|_| perr(ln, "bad row index"))?;
            let c: usize = c.parse().map_err(|_| perr(ln, "bad column index"))?;
            let v: f64 = v.parse().map_err(|_| perr(ln, "bad value"))?;
            if r == 0 || c == 0 {
                return Err(perr(ln, "indices are 1-based"));
            }
            triplets.push((r - 1, c - 1, v));
            if r != c {
                triplets.push((c - 1, r - 1, v));
            }
        }
        let (rows, cols) = size.ok_or_else(|| perr(0, "missing size line"))?;
        Self::new(CsrMatrix::from_triplets(rows, cols, &triplets)?)
    }
}

impl Deref for SparseSymMatrix {
    type Target = CsrMatrix;

    fn deref(&self) -> &CsrMatrix {
        &self.0
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
