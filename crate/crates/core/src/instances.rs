//! Random integer instance generation and the plain-text problem format.
//!
//! Format: first line `m n`, then `m` lines of `n` whitespace-separated
//! integers, optionally followed by `b: v_1 ... v_m` for the general
//! system `Ax = b, x >= 0`. UTF-8, LF line endings, exact decimal
//! integers. The generator is keyed by a portable seeded stream cipher so
//! corpora are reproducible across platforms.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::SolverError;
use crate::matrix::Matrix;

/// Shape, entry range and seeding of a generated corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub m: usize,
    pub n: usize,
    pub lo: i64,
    pub hi: i64,
    pub seed: u64,
    pub count: usize,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.lo > self.hi {
            return Err(SolverError::InvalidConfig(format!(
                "invalid range: lo {} > hi {}",
                self.lo, self.hi
            )));
        }
        if self.m == 0 || self.n == 0 || self.m > self.n {
            return Err(SolverError::InvalidConfig(format!(
                "invalid shape {}x{}: need 1 <= m <= n",
                self.m, self.n
            )));
        }
        if self.count == 0 {
            return Err(SolverError::InvalidConfig("count must be >= 1".into()));
        }
        Ok(())
    }

    /// Seed of the `idx`-th instance; each instance gets its own stream.
    pub fn instance_seed(&self, idx: usize) -> u64 {
        self.seed.wrapping_add(idx as u64)
    }
}

/// Generate `count` integer matrices with entries uniform in `[lo, hi]`,
/// deterministically from the spec's seed.
pub fn generate(spec: &GeneratorSpec) -> Result<Vec<Matrix>, SolverError> {
    spec.validate()?;
    (0..spec.count)
        .map(|idx| generate_one(spec, idx))
        .collect()
}

pub fn generate_one(spec: &GeneratorSpec, idx: usize) -> Result<Matrix, SolverError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.instance_seed(idx));
    let entries: Vec<f64> = (0..spec.m * spec.n)
        .map(|_| rng.random_range(spec.lo..=spec.hi) as f64)
        .collect();
    Matrix::new(spec.m, spec.n, entries)
}

fn render_int(x: f64) -> Result<String, SolverError> {
    if x != x.round() || x.abs() >= 9.007_199_254_740_992e15 {
        return Err(SolverError::InvalidConfig(
            "text format requires integer entries below 2^53".into(),
        ));
    }
    Ok(format!("{}", x as i64))
}

/// Write a problem file; `b` adds the general-system right-hand side.
pub fn write_problem(
    path: impl AsRef<Path>,
    a: &Matrix,
    b: Option<&[f64]>,
) -> Result<(), SolverError> {
    let mut out = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        let row: Result<Vec<String>, _> = a.row(i).iter().map(|&x| render_int(x)).collect();
        out.push_str(&row?.join(" "));
        out.push('\n');
    }
    if let Some(b) = b {
        if b.len() != a.rows() {
            return Err(SolverError::DimensionMismatch {
                expected: a.rows(),
                got: b.len(),
            });
        }
        let vals: Result<Vec<String>, _> = b.iter().map(|&x| render_int(x)).collect();
        out.push_str("b: ");
        out.push_str(&vals?.join(" "));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read a problem file written by [`write_problem`] (or by hand).
pub fn read_problem(path: impl AsRef<Path>) -> Result<(Matrix, Option<Vec<f64>>), SolverError> {
    let text = fs::read_to_string(path)?;
    parse_problem(&text)
}

pub fn parse_problem(text: &str) -> Result<(Matrix, Option<Vec<f64>>), SolverError> {
    let mut lines = text.lines().enumerate();
    let (line_no, header) = lines
        .next()
        .ok_or(SolverError::ParseError {
            line: 1,
            msg: "empty file".into(),
        })?;
    let mut parts = header.split_whitespace();
    let m: usize = parse_token(parts.next(), line_no + 1, "row count")?;
    let n: usize = parse_token(parts.next(), line_no + 1, "column count")?;
    if parts.next().is_some() {
        return Err(SolverError::ParseError {
            line: line_no + 1,
            msg: "expected exactly 'm n' on the first line".into(),
        });
    }

    let mut entries = Vec::with_capacity(m * n);
    for _ in 0..m {
        let (idx, line) = lines.next().ok_or(SolverError::ParseError {
            line: m + 1,
            msg: "missing matrix row".into(),
        })?;
        let row: Result<Vec<i64>, SolverError> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<i64>().map_err(|_| SolverError::ParseError {
                    line: idx + 1,
                    msg: format!("invalid integer '{tok}'"),
                })
            })
            .collect();
        let row = row?;
        if row.len() != n {
            return Err(SolverError::ParseError {
                line: idx + 1,
                msg: format!("expected {n} entries, found {}", row.len()),
            });
        }
        entries.extend(row.into_iter().map(|v| v as f64));
    }

    let mut b = None;
    for (idx, line) in lines {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let Some(rest) = trimmed.strip_prefix("b:") else {
            return Err(SolverError::ParseError {
                line: idx + 1,
                msg: format!("unexpected trailing content '{trimmed}'"),
            });
        };
        if b.is_some() {
            return Err(SolverError::ParseError {
                line: idx + 1,
                msg: "duplicate right-hand side line".into(),
            });
        }
        let vals: Result<Vec<i64>, SolverError> = rest
            .split_whitespace()
            .map(|tok| {
                tok.parse::<i64>().map_err(|_| SolverError::ParseError {
                    line: idx + 1,
                    msg: format!("invalid integer '{tok}'"),
                })
            })
            .collect();
        let vals = vals?;
        if vals.len() != m {
            return Err(SolverError::ParseError {
                line: idx + 1,
                msg: format!("right-hand side needs {m} entries, found {}", vals.len()),
            });
        }
        b = Some(vals.into_iter().map(|v| v as f64).collect());
    }

    Ok((Matrix::new(m, n, entries)?, b))
}

fn parse_token<T: std::str::FromStr>(
    tok: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, SolverError> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| SolverError::ParseError {
            line,
            msg: format!("missing or invalid {what}"),
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_deterministic() {
        let spec = GeneratorSpec {
            m: 2,
            n: 4,
            lo: -1,
            hi: 1,
            seed: 7,
            count: 1,
        };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a[0], b[0]);
        assert!(a[0].is_integer_source());
        assert!(a[0].entries().iter().all(|&x| (-1.0..=1.0).contains(&x)));
    }

    #[test]
    fn degenerate_range_gives_zero_matrix() {
        let spec = GeneratorSpec {
            m: 2,
            n: 2,
            lo: 0,
            hi: 0,
            seed: 1,
            count: 1,
        };
        assert!(generate(&spec).unwrap()[0].is_zero());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let spec = GeneratorSpec {
            m: 2,
            n: 2,
            lo: 5,
            hi: 1,
            seed: 0,
            count: 1,
        };
        assert!(matches!(
            generate(&spec),
            Err(SolverError::InvalidConfig(_))
        ));
        let spec = GeneratorSpec {
            m: 3,
            n: 2,
            lo: 0,
            hi: 1,
            seed: 0,
            count: 1,
        };
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn identity_parses_from_literal() {
        let (a, b) = parse_problem("2 2\n1 0\n0 1\n").unwrap();
        assert_eq!(a, Matrix::identity(2));
        assert!(b.is_none());
    }

    #[test]
    fn round_trip_with_rhs() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.txt");
        let a = Matrix::from_rows(&[vec![2.0, -1.0, 0.0], vec![0.0, 7.0, -100.0]]).unwrap();
        write_problem(&path, &a, Some(&[3.0, -4.0])).unwrap();
        let (back, b) = read_problem(&path).unwrap();
        assert_eq!(back, a);
        assert_eq!(b, Some(vec![3.0, -4.0]));
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        let err = parse_problem("2 2\n1 0 3\n0 1\n").unwrap_err();
        match err {
            SolverError::ParseError { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse_problem("2 2\n1 0\n0 x\n").unwrap_err();
        match err {
            SolverError::ParseError { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
