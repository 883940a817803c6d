//! Test-support oracle: exact projection materialization, exhaustive tiny
//! instance families, and golden-value records.
//!
//! Nothing in here shares linear-algebra code with the solver path; the
//! rational sub-module is the independent ground truth that derived test
//! values are frozen against.

pub mod rational;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::SolverError;
use crate::matrix::Matrix;

/// Explicit projection matrices `(P, Q)` onto the null space and row space
/// of `a`, computed by the exact rational path and rounded to f64 at the end.
///
/// Restricted to small instances; this exists for oracle comparison only and
/// is never called by the solvers.
pub fn materialize_projections(a: &Matrix) -> Result<(Matrix, Matrix), SolverError> {
    if a.cols() > 64 {
        return Err(SolverError::InstanceTooLarge {
            details: format!("materialization supports n <= 64, got {}", a.cols()),
        });
    }
    let (p, q) = rational::projection_pair(a)?;
    let to_matrix = |rows: &Vec<Vec<rational::Rat>>| {
        let n = a.cols();
        let entries: Vec<f64> = rows
            .iter()
            .flat_map(|r| r.iter().map(rational::rat_to_f64))
            .collect();
        Matrix::new(n, n, entries)
    };
    Ok((to_matrix(&p)?, to_matrix(&q)?))
}

/// All `m x n` matrices with entries drawn from `entry_set`, in a fixed
/// odometer order. Guarded against combinatorial blowup.
pub fn enumerate_tiny_family(
    m: usize,
    n: usize,
    entry_set: &[i64],
) -> Result<Vec<Matrix>, SolverError> {
    let cells = m * n;
    let count = (entry_set.len() as f64).powi(cells as i32);
    if count > 2_000_000.0 {
        return Err(SolverError::InstanceTooLarge {
            details: format!("{}^{} matrices requested", entry_set.len(), cells),
        });
    }
    let base = entry_set.len();
    let total = base.pow(cells as u32);
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let mut c = code;
        let mut entries = Vec::with_capacity(cells);
        for _ in 0..cells {
            entries.push(entry_set[c % base] as f64);
            c /= base;
        }
        out.push(Matrix::new(m, n, entries)?);
    }
    Ok(out)
}

/// Frozen expected value for one derived test example, produced by the
/// independent oracle before the solver output is trusted.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GoldenRecord {
    pub id: String,
    pub operation: String,
    pub input: String,
    pub input_digest: String,
    pub expected: serde_json::Value,
    pub provenance: String,
    pub oracle_version: String,
}

pub const ORACLE_VERSION: &str = "rational-oracle-1";

impl GoldenRecord {
    pub fn new(
        id: &str,
        operation: &str,
        input: &str,
        expected: serde_json::Value,
        provenance: &str,
    ) -> Self {
        Self {
            id: id.to_string(),
            operation: operation.to_string(),
            input: input.to_string(),
            input_digest: digest_hex(input),
            expected,
            provenance: provenance.to_string(),
            oracle_version: ORACLE_VERSION.to_string(),
        }
    }

    /// Digest consistency check for a record loaded from disk.
    pub fn digest_matches(&self) -> bool {
        self.input_digest == digest_hex(&self.input)
    }
}

pub fn digest_hex(input: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(input.as_bytes());
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}
