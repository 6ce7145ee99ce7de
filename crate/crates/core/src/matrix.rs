//! Dense rectangular matrices with finite nonnegative entries.
//!
//! Nonnegativity is checked once at construction; everything downstream
//! relies on it without rechecking.

use crate::error::{Error, Result};

/// Row-major dense matrix, entries validated finite and ≥ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl PositiveMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        for (i, &v) in entries.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::BadEntry {
                    row: i / cols + 1,
                    col: i % cols + 1,
                    value: v,
                });
            }
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let cols = rows[0].len();
        for (j, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::RaggedRow {
                    row: j + 1,
                    expected: cols,
                    got: row.len(),
                });
            }
        }
        let entries: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(rows.len(), cols, entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(
            rows,
            cols,
            vec![0.0; rows.checked_mul(cols).ok_or(Error::EmptyMatrix)?],
        )
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for j in 0..n {
            m.entries[j * n + j] = 1.0;
        }
        Ok(m)
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        let mut m = Self::zeros(n, n)?;
        for (j, &v) in d.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::BadEntry {
                    row: j + 1,
                    col: j + 1,
                    value: v,
                });
            }
            m.entries[j * n + j] = v;
        }
        Ok(m)
    }

    /// Outer product u·vᵀ.
    pub fn rank_one(u: &[f64], v: &[f64]) -> Result<Self> {
        let entries: Vec<f64> = u
            .iter()
            .flat_map(|&a| v.iter().map(move |&b| a * b))
            .collect();
        Self::new(u.len(), v.len(), entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks_exact(self.cols)
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|j| self.get(j, col)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut entries = vec![0.0; self.entries.len()];
        for j in 0..self.rows {
            for k in 0..self.cols {
                entries[k * self.rows + j] = self.get(j, k);
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// y = A·x.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.apply_into(x, &mut y);
        y
    }

    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (yj, row) in y.iter_mut().zip(self.row_iter()) {
            *yj = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// g = Aᵀ·w without materializing the transpose.
    pub fn apply_transpose_into(&self, w: &[f64], g: &mut [f64]) {
        debug_assert_eq!(w.len(), self.rows);
        debug_assert_eq!(g.len(), self.cols);
        g.fill(0.0);
        for (&wj, row) in w.iter().zip(self.row_iter()) {
            if wj == 0.0 {
                continue;
            }
            for (gk, &a) in g.iter_mut().zip(row) {
                *gk += wj * a;
            }
        }
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        Self::new(
            self.rows,
            self.cols,
            self.entries.iter().map(|&v| c * v).collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, &v| m.max(v))
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        self.entries
            .iter()
            .enumerate()
            .all(|(i, &v)| v == 0.0 || i / self.cols == i % self.cols)
    }

    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols))
            .map(|j| self.get(j, j))
            .collect()
    }

    /// Detects A = u·vᵀ; per-entry relative tolerance 1e-12, so genuinely
    /// rank-one data is recognized while random matrices never are.
    /// Returns `None` for the zero matrix.
    pub fn rank_one_factors(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let (j0, k0) = self
            .entries
            .iter()
            .position(|&v| v != 0.0)
            .map(|i| (i / self.cols, i % self.cols))?;
        let pivot = self.get(j0, k0);
        let u: Vec<f64> = self.column(k0);
        let v: Vec<f64> = self.row(j0).iter().map(|&a| a / pivot).collect();
        for (uj, row) in u.iter().zip(self.row_iter()) {
            for (vk, &a) in v.iter().zip(row) {
                let prod = uj * vk;
                let scale = a.max(prod);
                if (a - prod).abs() > 1e-12 * scale {
                    return None;
                }
            }
        }
        Some((u, v))
    }
}

/// Standard basis vector e_j of length n (0-based index).
pub fn basis_vector(n: usize, j: usize) -> Result<Vec<f64>> {
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, len: n });
    }
    let mut e = vec![0.0; n];
    e[j] = 1.0;
    Ok(e)
}
