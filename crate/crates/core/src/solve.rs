//! Shared state, parameter and reporting types for the basic procedures
//! and main algorithms.

use serde::Serialize;

use crate::certificates::{Certificate, VerificationReport};
use crate::cuts::{CutResult, CutSide};
use crate::linalg::ProjectionSpace;
use crate::matrix::Matrix;

/// Tuning knobs for a basic-procedure run.
#[derive(Debug, Clone)]
pub struct BpParams {
    /// Relaxation step size, must lie in (0, 2).
    pub step_size: f64,
    /// Hard iteration guard; 0 selects the default `10 r^3`.
    pub max_iters: usize,
    /// Relative tolerance for strict positivity checks.
    pub pos_tol_factor: f64,
}

impl Default for BpParams {
    fn default() -> Self {
        Self {
            step_size: 1.8,
            max_iters: 0,
            pos_tol_factor: 1e-11,
        }
    }
}

impl BpParams {
    pub fn validate(&self) -> Result<(), crate::error::SolverError> {
        if !(self.step_size > 0.0 && self.step_size < 2.0) {
            return Err(crate::error::SolverError::InvalidConfig(format!(
                "step size out of (0,2): {}",
                self.step_size
            )));
        }
        Ok(())
    }

    pub fn iter_guard(&self, active_cols: usize) -> usize {
        if self.max_iters > 0 {
            self.max_iters
        } else {
            10usize.saturating_mul(active_cols.saturating_pow(3))
        }
    }
}

/// Iterate of a basic procedure: `y` decomposes into the row-space
/// component `v` and the null-space component `z = y - v`.
#[derive(Debug, Clone)]
pub struct BpState {
    pub y: Vec<f64>,
    pub v: Vec<f64>,
    pub z: Vec<f64>,
    pub step_size: f64,
    pub threshold: f64,
    pub iterations: usize,
}

/// Terminal result of one basic-procedure call.
#[derive(Debug, Clone)]
pub enum BpOutcome {
    /// The null-space component certifies the homogeneous system.
    PrimalFeasible { z: Vec<f64>, state: BpState },
    /// The row-space component certifies the transposed strict system.
    DualFeasible { v: Vec<f64>, state: BpState },
    /// A rescaling cut; indices refer to the current column space.
    Cut { cut: CutResult, state: BpState },
}

impl BpOutcome {
    pub fn state(&self) -> &BpState {
        match self {
            BpOutcome::PrimalFeasible { state, .. } => state,
            BpOutcome::DualFeasible { state, .. } => state,
            BpOutcome::Cut { state, .. } => state,
        }
    }
}

/// One accepted update step, for invariant auditing.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StepRecord {
    pub iteration: usize,
    /// Column count of the factored matrix at this step.
    pub active_cols: usize,
    pub space: StepSpace,
    pub alpha: f64,
    pub k_size: usize,
    pub norm_sq_before: f64,
    pub norm_sq_after: f64,
    pub min_y_after: f64,
}

/// Which component the recorded update was driving down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StepSpace {
    RowSpace,
    NullSpace,
}

impl From<ProjectionSpace> for StepSpace {
    fn from(s: ProjectionSpace) -> Self {
        match s {
            ProjectionSpace::RowSpace => StepSpace::RowSpace,
            ProjectionSpace::NullSpace => StepSpace::NullSpace,
        }
    }
}

/// A rescaling event with the matrix it applied to, for soundness audits.
#[derive(Debug, Clone)]
pub struct CutEvent {
    pub side: CutSide,
    pub matrix: Matrix,
    pub indices: Vec<usize>,
}

/// Options controlling a full solve (main algorithm drive).
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub bp: BpParams,
    /// Override for the encoding-length bound; `None` derives it from the
    /// integer entries.
    pub bit_length: Option<u64>,
    /// Relative feasibility tolerance for primal certificates.
    pub feas_tol: f64,
    /// Relative strictness margin for dual certificates.
    pub dual_tol: f64,
    pub record_cuts: bool,
    pub record_steps: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            bp: BpParams::default(),
            bit_length: None,
            feas_tol: 1e-9,
            dual_tol: 1e-10,
            record_cuts: false,
            record_steps: false,
        }
    }
}

/// Aggregate counters for a solve.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SolveStats {
    pub bp_iterations: usize,
    pub bp_calls: usize,
    pub rescaling_rounds: usize,
    pub factorizations: usize,
    /// Rounds where the working matrix was numerically rank deficient.
    pub rank_deficient_rounds: usize,
    pub wall_time_ms: f64,
}

/// Full result of a main-algorithm run.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub certificate: Certificate,
    pub verification: VerificationReport,
    pub stats: SolveStats,
    pub cut_events: Vec<CutEvent>,
    pub step_trace: Vec<StepRecord>,
}

pub(crate) fn pow2_neg(k: u32) -> f64 {
    2f64.powi(-(k as i32))
}

pub(crate) fn pow2_pos(k: u32) -> f64 {
    2f64.powi(k as i32)
}

pub(crate) fn validate_problem_matrix(a: &Matrix) -> Result<(), crate::error::SolverError> {
    if a.rows() > a.cols() {
        return Err(crate::error::SolverError::InvalidConfig(format!(
            "problem matrix must satisfy m <= n, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

pub(crate) fn resolve_bit_length(
    a: &Matrix,
    opts: &SolveOptions,
) -> Result<u64, crate::error::SolverError> {
    match opts.bit_length {
        Some(0) => Err(crate::error::SolverError::InvalidConfig(
            "bit length must be at least 1".into(),
        )),
        Some(l) => Ok(l),
        None => a.bit_length(),
    }
}

pub(crate) fn finish_primal(
    a: &Matrix,
    x: Vec<f64>,
    mut stats: SolveStats,
    started: std::time::Instant,
    opts: &SolveOptions,
    cut_events: Vec<CutEvent>,
    step_trace: Vec<StepRecord>,
) -> Result<SolveOutcome, crate::error::SolverError> {
    stats.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    let verification = crate::certificates::verify_primal(a, &x, opts.feas_tol)?;
    if !verification.pass {
        return Err(crate::error::SolverError::VerificationFailed {
            details: format!(
                "primal witness rejected: residual {:?}, min {:?}, max {:?}",
                verification.residuals.max_abs_residual,
                verification.residuals.min_coordinate,
                verification.residuals.max_coordinate
            ),
        });
    }
    let mut certificate = Certificate::primal(x, a);
    certificate.rescaling_rounds = stats.rescaling_rounds;
    certificate.bp_iterations = stats.bp_iterations;
    Ok(SolveOutcome {
        certificate,
        verification,
        stats,
        cut_events,
        step_trace,
    })
}

pub(crate) fn finish_dual(
    a: &Matrix,
    u: Vec<f64>,
    mut stats: SolveStats,
    started: std::time::Instant,
    opts: &SolveOptions,
    cut_events: Vec<CutEvent>,
    step_trace: Vec<StepRecord>,
) -> Result<SolveOutcome, crate::error::SolverError> {
    stats.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    let verification = crate::certificates::verify_dual(a, &u, opts.dual_tol)?;
    if !verification.pass {
        return Err(crate::error::SolverError::VerificationFailed {
            details: format!(
                "dual witness rejected: min {:?}",
                verification.residuals.min_coordinate
            ),
        });
    }
    let mut certificate = Certificate::dual(u, a);
    certificate.rescaling_rounds = stats.rescaling_rounds;
    certificate.bp_iterations = stats.bp_iterations;
    Ok(SolveOutcome {
        certificate,
        verification,
        stats,
        cut_events,
        step_trace,
    })
}

pub(crate) fn finish_infeasible(
    side: crate::certificates::InfeasibleSide,
    mut stats: SolveStats,
    started: std::time::Instant,
    cut_events: Vec<CutEvent>,
    step_trace: Vec<StepRecord>,
) -> Result<SolveOutcome, crate::error::SolverError> {
    stats.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    let mut certificate = Certificate::infeasible(side);
    certificate.rescaling_rounds = stats.rescaling_rounds;
    certificate.bp_iterations = stats.bp_iterations;
    let verification = VerificationReport {
        kind: crate::certificates::CertificateKind::Infeasible,
        pass: true,
        residuals: crate::certificates::Residuals::default(),
        support: Vec::new(),
    };
    Ok(SolveOutcome {
        certificate,
        verification,
        stats,
        cut_events,
        step_trace,
    })
}
