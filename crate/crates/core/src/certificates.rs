//! Certificate types, verification, the exact maximum-support oracle, and
//! the reduction between the general and homogeneous systems.

use serde::Serialize;

use crate::error::SolverError;
use crate::matrix::Matrix;
use crate::vecmath::inf_norm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    PrimalFeasible,
    DualFeasible,
    /// Declared infeasible by the rescaling bound, no witness vector.
    Infeasible,
}

/// Which of the two systems a bound-based infeasibility declaration refers
/// to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InfeasibleSide {
    Primal,
    Dual,
}

/// Residual summary attached to certificates and verification reports.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Residuals {
    /// `max_i |(Ax)_i|` for primal certificates.
    pub max_abs_residual: Option<f64>,
    /// `min_i x_i` or `min_i (A^T u)_i`.
    pub min_coordinate: Option<f64>,
    pub max_coordinate: Option<f64>,
}

/// Solver output: a feasibility witness in original coordinates, or an
/// infeasibility declaration, plus run counters.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub declared_infeasible: Option<InfeasibleSide>,
    /// Indices with strictly positive solution value (primal certificates).
    pub support: Vec<usize>,
    pub residuals: Residuals,
    pub rescaling_rounds: usize,
    pub bp_iterations: usize,
}

impl Certificate {
    pub fn primal(x: Vec<f64>, a: &Matrix) -> Self {
        let support = (0..x.len()).filter(|&i| x[i] > 0.0).collect();
        let residual = a.mul_vec(&x).map(|r| inf_norm(&r)).unwrap_or(f64::NAN);
        let min = x.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Self {
            kind: CertificateKind::PrimalFeasible,
            x: Some(x),
            u: None,
            declared_infeasible: None,
            support,
            residuals: Residuals {
                max_abs_residual: Some(residual),
                min_coordinate: Some(min),
                max_coordinate: Some(max),
            },
            rescaling_rounds: 0,
            bp_iterations: 0,
        }
    }

    pub fn dual(u: Vec<f64>, a: &Matrix) -> Self {
        let w = a.transpose_mul_vec(&u).unwrap_or_default();
        let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Self {
            kind: CertificateKind::DualFeasible,
            x: None,
            u: Some(u),
            declared_infeasible: None,
            support: Vec::new(),
            residuals: Residuals {
                max_abs_residual: None,
                min_coordinate: Some(min),
                max_coordinate: Some(max),
            },
            rescaling_rounds: 0,
            bp_iterations: 0,
        }
    }

    pub fn infeasible(side: InfeasibleSide) -> Self {
        Self {
            kind: CertificateKind::Infeasible,
            x: None,
            u: None,
            declared_infeasible: Some(side),
            support: Vec::new(),
            residuals: Residuals::default(),
            rescaling_rounds: 0,
            bp_iterations: 0,
        }
    }
}

/// Verification result, serialized in CLI reports.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub kind: CertificateKind,
    pub pass: bool,
    pub residuals: Residuals,
    pub support: Vec<usize>,
}

/// Check `Ax = 0, x >= 0, x != 0` within a relative tolerance.
pub fn verify_primal(a: &Matrix, x: &[f64], tol: f64) -> Result<VerificationReport, SolverError> {
    if x.len() != a.cols() {
        return Err(SolverError::DimensionMismatch {
            expected: a.cols(),
            got: x.len(),
        });
    }
    let residual = inf_norm(&a.mul_vec(x)?);
    let xmax = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let xmin = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = a.max_abs_entry() * inf_norm(x);
    let pass = residual <= tol * scale && xmin >= -tol && xmax > tol;
    Ok(VerificationReport {
        kind: CertificateKind::PrimalFeasible,
        pass,
        residuals: Residuals {
            max_abs_residual: Some(residual),
            min_coordinate: Some(xmin),
            max_coordinate: Some(xmax),
        },
        support: (0..x.len()).filter(|&i| x[i] > tol).collect(),
    })
}

/// Check `A^T u > 0` with a relative strictness margin.
pub fn verify_dual(a: &Matrix, u: &[f64], tol: f64) -> Result<VerificationReport, SolverError> {
    if u.len() != a.rows() {
        return Err(SolverError::DimensionMismatch {
            expected: a.rows(),
            got: u.len(),
        });
    }
    let w = a.transpose_mul_vec(u)?;
    let wmin = w.iter().cloned().fold(f64::INFINITY, f64::min);
    let wmax = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = a.max_abs_entry() * inf_norm(u);
    let pass = wmin > tol * scale;
    Ok(VerificationReport {
        kind: CertificateKind::DualFeasible,
        pass,
        residuals: Residuals {
            max_abs_residual: None,
            min_coordinate: Some(wmin),
            max_coordinate: Some(wmax),
        },
        support: Vec::new(),
    })
}

/// Exact feasibility and maximum support of `{Ax = 0, x >= 0, x != 0}`
/// by rational support enumeration. Ground truth for tiny instances.
pub fn max_support_oracle(a: &Matrix) -> Result<(bool, Vec<usize>), SolverError> {
    if a.rows() > 4 || a.cols() > 8 {
        return Err(SolverError::InstanceTooLarge {
            details: format!("oracle supports m <= 4, n <= 8, got {}x{}", a.rows(), a.cols()),
        });
    }
    if !a.is_integer_source() || a.max_abs_entry() > 10.0 {
        return Err(SolverError::InstanceTooLarge {
            details: "oracle requires integer entries with |a_ij| <= 10".into(),
        });
    }
    Ok(crate::oracle::rational::max_support(a))
}

/// Homogeneous embedding of `Ax = b, x >= 0`: append `-b` as a column.
pub fn reduce_general(a: &Matrix, b: &[f64]) -> Result<Matrix, SolverError> {
    a.augment_negated(b)
}

/// Recover a solution of the general system from a maximum-support solution
/// of the embedded one: divide through by the homogenizing coordinate when
/// it is positive, otherwise the general system is infeasible.
pub fn recover_general(xbar: &[f64]) -> Option<Vec<f64>> {
    let (last, rest) = xbar.split_last()?;
    if *last > 0.0 {
        Some(rest.iter().map(|v| v / last).collect())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn primal_verification_examples() {
        let a = mat(&[&[1.0, -1.0]]);
        assert!(verify_primal(&a, &[1.0, 1.0], 1e-9).unwrap().pass);
        assert!(!verify_primal(&a, &[1.0, 2.0], 1e-9).unwrap().pass);
        let eye = Matrix::identity(2);
        assert!(!verify_primal(&eye, &[0.0, 0.0], 1e-9).unwrap().pass);
        assert!(matches!(
            verify_primal(&eye, &[1.0; 3], 1e-9),
            Err(SolverError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dual_verification_examples() {
        let eye = Matrix::identity(2);
        assert!(verify_dual(&eye, &[1.0, 1.0], 1e-10).unwrap().pass);
        let diff = mat(&[&[1.0, -1.0]]);
        for u in [[1.0], [-2.5], [0.0]] {
            assert!(!verify_dual(&diff, &u, 1e-10).unwrap().pass);
        }
        let ones = mat(&[&[1.0, 1.0]]);
        assert!(verify_dual(&ones, &[1.0], 1e-10).unwrap().pass);
    }

    #[test]
    fn oracle_examples() {
        let a = mat(&[&[1.0, -1.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert_eq!(max_support_oracle(&a).unwrap(), (true, vec![0, 1]));
        assert_eq!(
            max_support_oracle(&Matrix::identity(2)).unwrap(),
            (false, vec![])
        );
        assert_eq!(
            max_support_oracle(&mat(&[&[1.0, -1.0]])).unwrap(),
            (true, vec![0, 1])
        );
        let big = Matrix::new(5, 8, vec![0.0; 40]);
        assert!(big.is_err() || max_support_oracle(&big.unwrap()).is_err());
    }

    #[test]
    fn reduce_examples() {
        let a = mat(&[&[1.0, 0.0]]);
        assert_eq!(reduce_general(&a, &[1.0]).unwrap().row(0), &[1.0, 0.0, -1.0]);
        assert_eq!(reduce_general(&a, &[0.0]).unwrap().row(0), &[1.0, 0.0, 0.0]);
        let b = mat(&[&[2.0, -1.0]]);
        assert_eq!(reduce_general(&b, &[3.0]).unwrap().row(0), &[2.0, -1.0, -3.0]);
    }

    #[test]
    fn recover_examples() {
        assert_eq!(recover_general(&[2.0, 0.0, 2.0]), Some(vec![1.0, 0.0]));
        assert_eq!(recover_general(&[1.0, 1.0, 0.0]), None);
        assert_eq!(recover_general(&[3.0, 6.0, 3.0]), Some(vec![1.0, 2.0]));
    }
}
