//! Projection factorization: applies the null-space and row-space
//! projections of a matrix in `O(mn)` per vector without ever forming the
//! `n x n` projection matrices.
//!
//! The factorization stores an orthonormal basis of the row space (the
//! right singular vectors above the rank tolerance). Every row of the
//! projection matrix is a weighted combination of those basis vectors, so
//! subset-indicator projections reduce to summing basis rows and one
//! basis-times-coefficients product.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::SolverError;
use crate::matrix::Matrix;

/// Which projection of the factored matrix to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionSpace {
    RowSpace,
    NullSpace,
}

/// Cached factorization of a matrix `A` sufficient to apply the row-space
/// projection `Q = A^T (A A^T)^+ A` and the null-space projection
/// `P = I - Q`, plus multiplier recovery. Immutable after construction.
#[derive(Debug, Clone)]
pub struct ProjectionFactors {
    cols: usize,
    rows: usize,
    rank: usize,
    rank_tol: f64,
    /// Orthonormal row-space basis, one column per retained singular value.
    basis: DMatrix<f64>,
    /// Left singular vectors above tolerance, for multiplier recovery.
    left: DMatrix<f64>,
    sigma: Vec<f64>,
    zero_matrix: bool,
}

/// Default rank tolerance: `max(m, n) * eps * sigma_max`.
pub fn default_rank_tol(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

pub fn compute_projection_factors(
    a: &Matrix,
    rank_tol: f64,
) -> Result<ProjectionFactors, SolverError> {
    if !(rank_tol >= 0.0) {
        return Err(SolverError::InvalidConfig(
            "rank tolerance must be nonnegative".into(),
        ));
    }
    if a.entries().iter().any(|x| !x.is_finite()) {
        return Err(SolverError::NonFiniteInput);
    }
    let (m, n) = (a.rows(), a.cols());
    let dm = DMatrix::from_row_slice(m, n, a.entries());
    let zero_matrix = a.is_zero();

    if zero_matrix {
        return Ok(ProjectionFactors {
            cols: n,
            rows: m,
            rank: 0,
            rank_tol,
            basis: DMatrix::zeros(n, 0),
            left: DMatrix::zeros(m, 0),
            sigma: Vec::new(),
            zero_matrix,
        });
    }

    let svd = dm.svd(true, true);
    let u = svd.u.expect("svd with u requested");
    let v_t = svd.v_t.expect("svd with v_t requested");
    let sigma_max = svd
        .singular_values
        .iter()
        .fold(0.0f64, |acc, &s| acc.max(s));
    let tol = if rank_tol == 0.0 {
        default_rank_tol(m, n, sigma_max)
    } else {
        rank_tol
    };

    let kept: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol)
        .collect();
    let rank = kept.len();

    let mut basis = DMatrix::zeros(n, rank);
    let mut left = DMatrix::zeros(m, rank);
    let mut sigma = Vec::with_capacity(rank);
    for (col, &i) in kept.iter().enumerate() {
        for j in 0..n {
            basis[(j, col)] = v_t[(i, j)];
        }
        for j in 0..m {
            left[(j, col)] = u[(j, i)];
        }
        sigma.push(svd.singular_values[i]);
    }

    Ok(ProjectionFactors {
        cols: n,
        rows: m,
        rank,
        rank_tol: tol,
        basis,
        left,
        sigma,
        zero_matrix,
    })
}

impl ProjectionFactors {
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    /// Set when the factored matrix was identically zero; the row-space
    /// projection is then the zero map and cannot serve as a direction
    /// source.
    pub fn is_zero_matrix(&self) -> bool {
        self.zero_matrix
    }

    fn check_len(&self, y: &[f64]) -> Result<(), SolverError> {
        if y.len() != self.cols {
            return Err(SolverError::DimensionMismatch {
                expected: self.cols,
                got: y.len(),
            });
        }
        Ok(())
    }

    /// `Q y`: the component of `y` in the row space.
    pub fn apply_row_space(&self, y: &[f64]) -> Result<Vec<f64>, SolverError> {
        self.check_len(y)?;
        if self.rank == 0 {
            return Ok(vec![0.0; self.cols]);
        }
        let yv = DVector::from_column_slice(y);
        let coef = self.basis.tr_mul(&yv);
        let out = &self.basis * coef;
        Ok(out.as_slice().to_vec())
    }

    /// `P y = y - Q y`: the component of `y` in the null space.
    pub fn apply_null_space(&self, y: &[f64]) -> Result<Vec<f64>, SolverError> {
        let q = self.apply_row_space(y)?;
        Ok(y.iter().zip(&q).map(|(a, b)| a - b).collect())
    }

    pub fn apply(&self, space: ProjectionSpace, y: &[f64]) -> Result<Vec<f64>, SolverError> {
        match space {
            ProjectionSpace::RowSpace => self.apply_row_space(y),
            ProjectionSpace::NullSpace => self.apply_null_space(y),
        }
    }

    /// Projection of an indicator sum: `Q (sum_{k in K} e_k)` or the
    /// null-space counterpart, computed by summing basis rows rather than
    /// forming any projection column.
    pub fn project_indicator_sum(
        &self,
        indices: &[usize],
        space: ProjectionSpace,
    ) -> Result<Vec<f64>, SolverError> {
        if indices.is_empty() {
            return Err(SolverError::EmptyIndexSet);
        }
        let mut seen = vec![false; self.cols];
        for &k in indices {
            if k >= self.cols {
                return Err(SolverError::IndexOutOfRange {
                    index: k,
                    len: self.cols,
                });
            }
            seen[k] = true;
        }
        let mut coef = DVector::zeros(self.rank);
        for k in 0..self.cols {
            if seen[k] {
                for c in 0..self.rank {
                    coef[c] += self.basis[(k, c)];
                }
            }
        }
        let q = if self.rank == 0 {
            DVector::zeros(self.cols)
        } else {
            &self.basis * coef
        };
        match space {
            ProjectionSpace::RowSpace => Ok(q.as_slice().to_vec()),
            ProjectionSpace::NullSpace => Ok((0..self.cols)
                .map(|k| (if seen[k] { 1.0 } else { 0.0 }) - q[k])
                .collect()),
        }
    }

    /// Diagonal of the projection matrix without materializing it:
    /// squared row norms of the basis (row space), or their complement.
    pub fn projection_diagonal(&self, space: ProjectionSpace) -> Vec<f64> {
        let q_diag: Vec<f64> = (0..self.cols)
            .map(|j| (0..self.rank).map(|c| self.basis[(j, c)].powi(2)).sum())
            .collect();
        match space {
            ProjectionSpace::RowSpace => q_diag,
            ProjectionSpace::NullSpace => q_diag.iter().map(|d| 1.0 - d).collect(),
        }
    }

    /// Recover `u` with `A^T u = Q y` (exact in the full-rank case).
    pub fn recover_multiplier(&self, y: &[f64]) -> Result<Vec<f64>, SolverError> {
        self.check_len(y)?;
        if self.rank == 0 {
            return Ok(vec![0.0; self.rows]);
        }
        let yv = DVector::from_column_slice(y);
        let mut coef = self.basis.tr_mul(&yv);
        for (c, s) in self.sigma.iter().enumerate() {
            coef[c] /= s;
        }
        let u = &self.left * coef;
        Ok(u.as_slice().to_vec())
    }
}

/// Sampling lower estimate of the condition measure
/// `rho(Q) = max_{|x|=1} min_i <x, q_i/|q_i|>` over the columns of the
/// selected projection. Deterministic for a fixed seed; diagnostic only.
pub fn estimate_rho(
    f: &ProjectionFactors,
    space: ProjectionSpace,
    samples: usize,
    seed: u64,
) -> Result<f64, SolverError> {
    if samples == 0 {
        return Err(SolverError::InvalidConfig(
            "sample count must be at least 1".into(),
        ));
    }
    let n = f.cols();
    let diag = f.projection_diagonal(space);
    // columns with zero diagonal are zero columns of the projection
    let col_tol = 1e-14;
    let active: Vec<usize> = (0..n).filter(|&j| diag[j] > col_tol).collect();
    if active.is_empty() {
        return Err(SolverError::ZeroColumns);
    }
    let inv_norms: Vec<f64> = active.iter().map(|&j| 1.0 / diag[j].sqrt()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut best = f64::NEG_INFINITY;
    let mut x = vec![0.0f64; n];
    for _ in 0..samples {
        loop {
            for xi in x.iter_mut() {
                *xi = normal.sample(&mut rng);
            }
            let norm = crate::vecmath::norm(&x);
            if norm > 1e-12 {
                for xi in x.iter_mut() {
                    *xi /= norm;
                }
                break;
            }
        }
        // <x, q_j> = (Q x)_j since the projection is symmetric
        let w = f.apply(space, &x)?;
        let m = active
            .iter()
            .zip(&inv_norms)
            .map(|(&j, &inv)| w[j] * inv)
            .fold(f64::INFINITY, f64::min);
        best = best.max(m);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::materialize_projections;

    fn mat(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn factors(a: &Matrix) -> ProjectionFactors {
        compute_projection_factors(a, 0.0).unwrap()
    }

    #[test]
    fn rejects_non_finite_entries() {
        // Matrix::new already refuses NaN, so drive the check directly
        // through a finite matrix and a bad tolerance instead.
        let a = mat(&[&[1.0, 2.0]]);
        assert!(matches!(
            compute_projection_factors(&a, f64::NAN),
            Err(SolverError::InvalidConfig(_))
        ));
    }

    #[test]
    fn zero_matrix_is_flagged_with_identity_null_projection() {
        let a = mat(&[&[0.0, 0.0]]);
        let f = factors(&a);
        assert!(f.is_zero_matrix());
        assert_eq!(f.rank(), 0);
        let y = [0.3, -0.7];
        assert_eq!(f.apply_row_space(&y).unwrap(), vec![0.0, 0.0]);
        assert_eq!(f.apply_null_space(&y).unwrap(), y.to_vec());
    }

    #[test]
    fn difference_matrix_projections() {
        let f = factors(&mat(&[&[1.0, -1.0]]));
        let v = f.apply_row_space(&[0.5, 0.5]).unwrap();
        assert!(v.iter().all(|x| x.abs() < 1e-14));
        let z = f.apply_null_space(&[0.5, 0.5]).unwrap();
        assert!((z[0] - 0.5).abs() < 1e-14 && (z[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn identity_projections() {
        let f = factors(&Matrix::identity(2));
        let y = [0.2, -0.9];
        let v = f.apply_row_space(&y).unwrap();
        assert!((v[0] - y[0]).abs() < 1e-14 && (v[1] - y[1]).abs() < 1e-14);
        let z = f.apply_null_space(&y).unwrap();
        assert!(z.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn ones_null_space_projections() {
        let f = factors(&mat(&[&[1.0, 0.0, -1.0], &[0.0, 1.0, -1.0]]));
        let v = f.apply_row_space(&[1.0, 0.0, 0.0]).unwrap();
        let expect = [2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
        for (a, b) in v.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
        let z = f.apply_null_space(&[1.0, 0.0, 0.0]).unwrap();
        for x in &z {
            assert!((x - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn indicator_sums_match_materialized_columns() {
        let a = mat(&[&[1.0, -1.0]]);
        let f = factors(&a);
        let col = f
            .project_indicator_sum(&[0], ProjectionSpace::RowSpace)
            .unwrap();
        assert!((col[0] - 0.5).abs() < 1e-14 && (col[1] + 0.5).abs() < 1e-14);

        let f = factors(&Matrix::identity(2));
        let s = f
            .project_indicator_sum(&[0, 1], ProjectionSpace::RowSpace)
            .unwrap();
        assert!((s[0] - 1.0).abs() < 1e-14 && (s[1] - 1.0).abs() < 1e-14);

        let f = factors(&mat(&[&[1.0, 0.0, -1.0], &[0.0, 1.0, -1.0]]));
        let s = f
            .project_indicator_sum(&[0, 1, 2], ProjectionSpace::NullSpace)
            .unwrap();
        for x in &s {
            assert!((x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn indicator_errors() {
        let f = factors(&Matrix::identity(2));
        assert!(matches!(
            f.project_indicator_sum(&[], ProjectionSpace::RowSpace),
            Err(SolverError::EmptyIndexSet)
        ));
        assert!(matches!(
            f.project_indicator_sum(&[5], ProjectionSpace::RowSpace),
            Err(SolverError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            f.apply_row_space(&[1.0; 3]),
            Err(SolverError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn factors_agree_with_rational_oracle() {
        let instances = [
            mat(&[&[1.0, -1.0]]),
            mat(&[&[1.0, 0.0, -1.0], &[0.0, 1.0, -1.0]]),
            mat(&[&[2.0, 1.0, -3.0], &[1.0, 1.0, 1.0]]),
            mat(&[&[1.0, 2.0], &[2.0, 4.0]]), // rank deficient
        ];
        for a in &instances {
            let f = factors(a);
            let (p, q) = materialize_projections(a).unwrap();
            let n = a.cols();
            for j in 0..n {
                let col = f
                    .project_indicator_sum(&[j], ProjectionSpace::RowSpace)
                    .unwrap();
                for i in 0..n {
                    assert!(
                        (col[i] - q.get(i, j)).abs() < 1e-10,
                        "row-space column {j} of {a:?}"
                    );
                }
                let col = f
                    .project_indicator_sum(&[j], ProjectionSpace::NullSpace)
                    .unwrap();
                for i in 0..n {
                    assert!((col[i] - p.get(i, j)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn multiplier_recovery_solves_transpose_system() {
        let a = mat(&[&[2.0, 1.0, -3.0], &[1.0, 1.0, 1.0]]);
        let f = factors(&a);
        let y = [0.4, -0.2, 0.9];
        let u = f.recover_multiplier(&y).unwrap();
        let atu = a.transpose_mul_vec(&u).unwrap();
        let qy = f.apply_row_space(&y).unwrap();
        for (x, w) in atu.iter().zip(&qy) {
            assert!((x - w).abs() < 1e-12);
        }
    }

    #[test]
    fn rho_estimate_for_identity_is_below_exact_value() {
        let f = factors(&Matrix::identity(4));
        let est = estimate_rho(&f, ProjectionSpace::RowSpace, 2000, 11).unwrap();
        assert!(est <= 0.5 + 1e-12);
        assert!(est > 0.2, "estimate {est} should approach 0.5 from below");
    }

    #[test]
    fn rho_with_opposite_columns_is_nonpositive() {
        let f = factors(&mat(&[&[1.0, -1.0]]));
        let est = estimate_rho(&f, ProjectionSpace::RowSpace, 500, 3).unwrap();
        assert!(est <= 0.0);
    }

    #[test]
    fn rho_errors_on_zero_projection() {
        let f = factors(&Matrix::identity(2));
        assert!(matches!(
            estimate_rho(&f, ProjectionSpace::NullSpace, 10, 1),
            Err(SolverError::ZeroColumns)
        ));
    }
}
