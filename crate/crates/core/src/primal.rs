//! Basic procedure and main algorithm for the homogeneous system
//! `Ax = 0, x >= 0, x != 0`.
//!
//! The basic procedure drives the row-space component of the iterate
//! toward zero with relaxed multi-index orthogonalization steps; the main
//! algorithm halves cut columns, deletes columns whose accumulated scaling
//! crosses the encoding-length bound, and recovers a maximum-support
//! solution through the scaling diagonal.

use std::time::Instant;

use crate::certificates::InfeasibleSide;
use crate::cuts::{find_cut, CutSide};
use crate::error::SolverError;
use crate::linalg::{compute_projection_factors, ProjectionFactors, ProjectionSpace};
use crate::matrix::Matrix;
use crate::solve::{
    finish_dual, finish_infeasible, finish_primal, pow2_neg, resolve_bit_length,
    validate_problem_matrix, BpOutcome, BpParams, BpState, CutEvent, SolveOptions, SolveOutcome,
    SolveStats, StepRecord, StepSpace,
};
use crate::vecmath::{all_positive, axpy, dot, norm, norm_sq};

/// Directions with norm at or below this are unusable as update steps.
pub(crate) const DEGENERATE_DIR_TOL: f64 = 1e-12;

/// One basic-procedure run in the row space of the factored matrix.
///
/// `original_cols` is the column count of the undeleted problem; the
/// dual-feasible exit is only valid when no column has been deleted.
pub fn primal_bp(
    f: &ProjectionFactors,
    original_cols: usize,
    params: &BpParams,
    mut trace: Option<&mut Vec<StepRecord>>,
) -> Result<BpOutcome, SolverError> {
    params.validate()?;
    let r = f.cols();
    let rf = r as f64;
    let threshold = 1.0 / (2.0 * rf.powf(1.5));
    let c = params.step_size;
    let guard = params.iter_guard(r);

    let mut y = vec![1.0 / rf; r];
    let mut v = f.apply_row_space(&y)?;
    let mut iterations = 0usize;

    let state = |y: &Vec<f64>, v: &Vec<f64>, z: &Vec<f64>, iterations: usize| BpState {
        y: y.clone(),
        v: v.clone(),
        z: z.clone(),
        step_size: c,
        threshold,
        iterations,
    };

    loop {
        let z: Vec<f64> = y.iter().zip(&v).map(|(a, b)| a - b).collect();
        if all_positive(&z, params.pos_tol_factor) {
            let s = state(&y, &v, &z, iterations);
            return Ok(BpOutcome::PrimalFeasible { z, state: s });
        }
        if r == original_cols && all_positive(&v, params.pos_tol_factor) {
            let s = state(&y, &v, &z, iterations);
            return Ok(BpOutcome::DualFeasible { v, state: s });
        }
        if iterations >= guard {
            return Err(SolverError::IterationLimitExceeded { limit: guard });
        }

        let k: Vec<usize> = (0..r).filter(|&i| v[i] <= 0.0).collect();
        let mut cut_now = k.is_empty();
        if !cut_now {
            let q_k = f.project_indicator_sum(&k, ProjectionSpace::RowSpace)?;
            let nq = norm(&q_k);
            if nq <= DEGENERATE_DIR_TOL {
                cut_now = true;
            } else {
                let alpha = dot(&q_k, &v) / nq;
                if alpha <= -threshold {
                    let step = -c * alpha / nq;
                    let before = norm_sq(&v);
                    for &i in &k {
                        y[i] += step;
                    }
                    axpy(&mut v, -c * alpha / nq, &q_k);
                    iterations += 1;
                    if let Some(t) = trace.as_deref_mut() {
                        t.push(StepRecord {
                            iteration: iterations,
                            active_cols: r,
                            space: StepSpace::RowSpace,
                            alpha,
                            k_size: k.len(),
                            norm_sq_before: before,
                            norm_sq_after: norm_sq(&v),
                            min_y_after: y.iter().cloned().fold(f64::INFINITY, f64::min),
                        });
                    }
                    continue;
                }
                cut_now = true;
            }
        }
        debug_assert!(cut_now);
        let cut = find_cut(&v, CutSide::Primal)?;
        let z: Vec<f64> = y.iter().zip(&v).map(|(a, b)| a - b).collect();
        let s = state(&y, &v, &z, iterations);
        return Ok(BpOutcome::Cut { cut, state: s });
    }
}

/// Full solve of the homogeneous system with maximum-support recovery.
pub fn primal_ma(a: &Matrix, opts: &SolveOptions) -> Result<SolveOutcome, SolverError> {
    opts.bp.validate()?;
    validate_problem_matrix(a)?;
    let bit_len = resolve_bit_length(a, opts)?;
    let started = Instant::now();

    let n = a.cols();
    let mut halvings = vec![0u32; n];
    let mut active: Vec<usize> = (0..n).collect();
    let mut current = a.clone();
    let mut stats = SolveStats::default();
    let mut cut_events: Vec<CutEvent> = Vec::new();
    let mut trace: Vec<StepRecord> = Vec::new();

    loop {
        let f = compute_projection_factors(&current, 0.0)?;
        stats.factorizations += 1;
        if f.rank() < current.rows().min(current.cols()) {
            stats.rank_deficient_rounds += 1;
        }
        let outcome = primal_bp(
            &f,
            n,
            &opts.bp,
            opts.record_steps.then_some(&mut trace),
        )?;
        stats.bp_calls += 1;
        stats.bp_iterations += outcome.state().iterations;

        match outcome {
            BpOutcome::PrimalFeasible { z, .. } => {
                let mut x = vec![0.0; n];
                for (pos, &orig) in active.iter().enumerate() {
                    x[orig] = pow2_neg(halvings[orig]) * z[pos];
                }
                return finish_primal(a, x, stats, started, opts, cut_events, trace);
            }
            BpOutcome::DualFeasible { state, .. } => {
                let u = f.recover_multiplier(&state.y)?;
                return finish_dual(a, u, stats, started, opts, cut_events, trace);
            }
            BpOutcome::Cut { cut, .. } => {
                stats.rescaling_rounds += 1;
                if opts.record_cuts {
                    cut_events.push(CutEvent {
                        side: CutSide::Primal,
                        matrix: current.clone(),
                        indices: cut.indices.clone(),
                    });
                }
                current.scale_columns(&cut.indices, 0.5);
                for &j in &cut.indices {
                    halvings[active[j]] += 1;
                }
                let keep: Vec<usize> = (0..active.len())
                    .filter(|&j| (halvings[active[j]] as u64) < bit_len)
                    .collect();
                if keep.is_empty() {
                    return finish_infeasible(
                        InfeasibleSide::Primal,
                        stats,
                        started,
                        cut_events,
                        trace,
                    );
                }
                if keep.len() < active.len() {
                    current = current.select_columns(&keep)?;
                    active = keep.iter().map(|&j| active[j]).collect();
                }
            }
        }
    }
}
