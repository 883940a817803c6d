//! Basic procedure and main algorithm for the strict transposed system
//! `A^T u > 0`, rescaling the row space of the matrix.
//!
//! The basic procedure mirrors the primal one with the null-space
//! component in the driven role. The main algorithm doubles cut columns
//! and zeroes (never deletes) columns whose accumulated scaling crosses
//! the encoding-length bound, so the column count never shrinks.

use std::time::Instant;

use crate::certificates::InfeasibleSide;
use crate::cuts::{find_cut, CutSide};
use crate::error::SolverError;
use crate::linalg::{compute_projection_factors, ProjectionFactors, ProjectionSpace};
use crate::matrix::Matrix;
use crate::primal::DEGENERATE_DIR_TOL;
use crate::solve::{
    finish_dual, finish_infeasible, finish_primal, pow2_pos, resolve_bit_length,
    validate_problem_matrix, BpOutcome, BpParams, BpState, CutEvent, SolveOptions, SolveOutcome,
    SolveStats, StepRecord, StepSpace,
};
use crate::vecmath::{all_nonnegative, all_positive, axpy, dot, norm, norm_sq};

/// One basic-procedure run in the null space of the factored matrix.
///
/// Exit order follows the row-space formulation: the strict dual check
/// `v > 0` comes first, then the relaxed primal check `z >= 0`.
pub fn dual_bp(
    f: &ProjectionFactors,
    params: &BpParams,
    mut trace: Option<&mut Vec<StepRecord>>,
) -> Result<BpOutcome, SolverError> {
    params.validate()?;
    let n = f.cols();
    let nf = n as f64;
    let threshold = 1.0 / (2.0 * nf.powf(1.5));
    let c = params.step_size;
    let guard = params.iter_guard(n);

    let mut y = vec![1.0 / nf; n];
    let mut z = f.apply_null_space(&y)?;
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
        let v: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a - b).collect();
        if all_positive(&v, params.pos_tol_factor) {
            let s = state(&y, &v, &z, iterations);
            return Ok(BpOutcome::DualFeasible { v, state: s });
        }
        if all_nonnegative(&z, params.pos_tol_factor) {
            let s = state(&y, &v, &z, iterations);
            return Ok(BpOutcome::PrimalFeasible { z, state: s });
        }
        if iterations >= guard {
            return Err(SolverError::IterationLimitExceeded { limit: guard });
        }

        let k: Vec<usize> = (0..n).filter(|&i| z[i] <= 0.0).collect();
        let mut cut_now = k.is_empty();
        if !cut_now {
            let p_k = f.project_indicator_sum(&k, ProjectionSpace::NullSpace)?;
            let np = norm(&p_k);
            if np <= DEGENERATE_DIR_TOL {
                cut_now = true;
            } else {
                let alpha = dot(&p_k, &z) / np;
                if alpha <= -threshold {
                    let step = -c * alpha / np;
                    let before = norm_sq(&z);
                    for &i in &k {
                        y[i] += step;
                    }
                    axpy(&mut z, step, &p_k);
                    iterations += 1;
                    if let Some(t) = trace.as_deref_mut() {
                        t.push(StepRecord {
                            iteration: iterations,
                            active_cols: n,
                            space: StepSpace::NullSpace,
                            alpha,
                            k_size: k.len(),
                            norm_sq_before: before,
                            norm_sq_after: norm_sq(&z),
                            min_y_after: y.iter().cloned().fold(f64::INFINITY, f64::min),
                        });
                    }
                    continue;
                }
                cut_now = true;
            }
        }
        debug_assert!(cut_now);
        let cut = find_cut(&z, CutSide::Dual)?;
        let v: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a - b).collect();
        let s = state(&y, &v, &z, iterations);
        return Ok(BpOutcome::Cut { cut, state: s });
    }
}

/// Full solve of the strict transposed system.
pub fn dual_ma(a: &Matrix, opts: &SolveOptions) -> Result<SolveOutcome, SolverError> {
    opts.bp.validate()?;
    validate_problem_matrix(a)?;
    let bit_len = resolve_bit_length(a, opts)?;
    let started = Instant::now();

    let n = a.cols();
    let mut doublings = vec![0u32; n];
    let mut zeroed = vec![false; n];
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
        let outcome = dual_bp(&f, &opts.bp, opts.record_steps.then_some(&mut trace))?;
        stats.bp_calls += 1;
        stats.bp_iterations += outcome.state().iterations;

        match outcome {
            BpOutcome::DualFeasible { state, .. } => {
                let u = f.recover_multiplier(&state.y)?;
                return finish_dual(a, u, stats, started, opts, cut_events, trace);
            }
            BpOutcome::PrimalFeasible { z, .. } => {
                let x: Vec<f64> = (0..n)
                    .map(|i| {
                        if zeroed[i] {
                            0.0
                        } else {
                            pow2_pos(doublings[i]) * z[i].max(0.0)
                        }
                    })
                    .collect();
                return finish_primal(a, x, stats, started, opts, cut_events, trace);
            }
            BpOutcome::Cut { cut, .. } => {
                stats.rescaling_rounds += 1;
                if opts.record_cuts {
                    cut_events.push(CutEvent {
                        side: CutSide::Dual,
                        matrix: current.clone(),
                        indices: cut.indices.clone(),
                    });
                }
                let alive: Vec<usize> = cut
                    .indices
                    .iter()
                    .copied()
                    .filter(|&j| !zeroed[j])
                    .collect();
                if alive.is_empty() {
                    return Err(SolverError::RescalingStalled);
                }
                current.scale_columns(&alive, 2.0);
                let mut newly_zeroed = Vec::new();
                for &j in &alive {
                    doublings[j] += 1;
                    if doublings[j] as u64 >= bit_len {
                        zeroed[j] = true;
                        newly_zeroed.push(j);
                    }
                }
                if !newly_zeroed.is_empty() {
                    current.zero_columns(&newly_zeroed);
                }
                if zeroed.iter().all(|&b| b) {
                    return finish_infeasible(
                        InfeasibleSide::Dual,
                        stats,
                        started,
                        cut_events,
                        trace,
                    );
                }
            }
        }
    }
}
