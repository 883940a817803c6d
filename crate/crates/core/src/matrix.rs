//! Dense row-major matrix, the problem datum for the feasibility systems.

use crate::error::SolverError;

/// Dense real matrix with row-major storage.
///
/// The `integer_source` flag records that every entry is an exact integer
/// value; the bit-length surrogate used by the main algorithms is only
/// defined for such matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
    integer_source: bool,
}

impl Matrix {
    /// Build a matrix from row-major entries. Fails on non-finite values
    /// or when the entry count does not match `rows * cols`.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self, SolverError> {
        if rows == 0 || cols == 0 {
            return Err(SolverError::InvalidConfig(
                "matrix dimensions must be at least 1x1".into(),
            ));
        }
        if entries.len() != rows * cols {
            return Err(SolverError::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(SolverError::NonFiniteInput);
        }
        let integer_source = entries.iter().all(|&x| x == x.round());
        Ok(Self {
            rows,
            cols,
            entries,
            integer_source,
        })
    }

    /// Convenience constructor from nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, SolverError> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n) {
            return Err(SolverError::DimensionMismatch {
                expected: n,
                got: rows.iter().map(|r| r.len()).find(|&l| l != n).unwrap_or(0),
            });
        }
        Self::new(m, n, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            entries,
            integer_source: true,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_integer_source(&self) -> bool {
        self.integer_source
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0.0)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>, SolverError> {
        if x.len() != self.cols {
            return Err(SolverError::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| crate::vecmath::dot(self.row(i), x))
            .collect())
    }

    /// y = A^T u
    pub fn transpose_mul_vec(&self, u: &[f64]) -> Result<Vec<f64>, SolverError> {
        if u.len() != self.rows {
            return Err(SolverError::DimensionMismatch {
                expected: self.rows,
                got: u.len(),
            });
        }
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            for j in 0..self.cols {
                out[j] += row[j] * u[i];
            }
        }
        Ok(out)
    }

    /// Multiply a set of columns in place. Clears the integer-source flag
    /// when scaling leaves the integer domain.
    pub fn scale_columns(&mut self, cols: &[usize], factor: f64) {
        for &j in cols {
            for i in 0..self.rows {
                self.entries[i * self.cols + j] *= factor;
            }
        }
        self.integer_source = self.entries.iter().all(|&x| x == x.round());
    }

    pub fn zero_columns(&mut self, cols: &[usize]) {
        for &j in cols {
            for i in 0..self.rows {
                self.entries[i * self.cols + j] = 0.0;
            }
        }
    }

    pub fn column_is_zero(&self, j: usize) -> bool {
        (0..self.rows).all(|i| self.get(i, j) == 0.0)
    }

    /// Keep only the listed columns, in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> Result<Self, SolverError> {
        if keep.is_empty() {
            return Err(SolverError::EmptyIndexSet);
        }
        for &j in keep {
            if j >= self.cols {
                return Err(SolverError::IndexOutOfRange {
                    index: j,
                    len: self.cols,
                });
            }
        }
        let mut entries = Vec::with_capacity(self.rows * keep.len());
        for i in 0..self.rows {
            for &j in keep {
                entries.push(self.get(i, j));
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: keep.len(),
            entries,
            integer_source: self.integer_source,
        })
    }

    /// Append `-b` as an extra column: the homogeneous embedding of
    /// `Ax = b, x >= 0`.
    pub fn augment_negated(&self, b: &[f64]) -> Result<Self, SolverError> {
        if b.len() != self.rows {
            return Err(SolverError::DimensionMismatch {
                expected: self.rows,
                got: b.len(),
            });
        }
        let mut entries = Vec::with_capacity(self.rows * (self.cols + 1));
        for i in 0..self.rows {
            entries.extend_from_slice(self.row(i));
            entries.push(-b[i]);
        }
        Self::new(self.rows, self.cols + 1, entries)
    }

    /// Encoding-length surrogate: sum over entries of `1 + ceil(log2(|a|+1))`
    /// plus `n + m`. Defined for integer-source matrices only.
    pub fn bit_length(&self) -> Result<u64, SolverError> {
        if !self.integer_source {
            return Err(SolverError::InvalidConfig(
                "bit length requires an integer-source matrix".into(),
            ));
        }
        let mut total = 0u64;
        for &x in &self.entries {
            let a = x.abs() as u64;
            // ceil(log2(a+1)) == number of bits of a
            let bits = 64 - a.leading_zeros() as u64;
            total += 1 + bits;
        }
        Ok(total + self.rows as u64 + self.cols as u64)
    }
}
