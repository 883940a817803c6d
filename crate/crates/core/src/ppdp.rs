//! Interleaved primal-dual solver: one row-space-rescaled side searching
//! for a strict transposed witness and one null-space-rescaled side
//! searching for a maximum-support solution, advanced in lock-step until
//! either side produces a verifiable certificate.
//!
//! The row side has no deletion mechanism of its own; once any of its
//! scaling exponents crosses the encoding-length bound the normalized
//! transposed system is infeasible and the solve continues on the null
//! side alone (and symmetrically when the null side deletes every column).

use std::time::Instant;

use crate::cuts::{find_cut, CutResult, CutSide};
use crate::dual::dual_bp;
use crate::error::SolverError;
use crate::linalg::{compute_projection_factors, ProjectionFactors, ProjectionSpace};
use crate::matrix::Matrix;
use crate::primal::{primal_bp, DEGENERATE_DIR_TOL};
use crate::solve::{
    finish_dual, finish_primal, pow2_neg, pow2_pos, resolve_bit_length, validate_problem_matrix,
    BpOutcome, BpParams, CutEvent, SolveOptions, SolveOutcome, SolveStats, StepRecord, StepSpace,
};
use crate::vecmath::{all_positive, axpy, dot, norm, norm_sq};

/// Terminal case of one interleaved basic-procedure call.
#[derive(Debug, Clone)]
pub enum PpdpCase {
    /// Strictly positive null-space component on the row side.
    PrimalViaRowSide,
    /// Strictly positive row-space component on the row side.
    DualViaRowSide,
    /// Strictly positive null-space component on the null side.
    PrimalViaNullSide,
    /// Strictly positive row-space component on the undeleted null side.
    DualViaNullSide,
    /// Rescale the row side.
    RowSideCut(CutResult),
    /// Rescale the null side.
    NullSideCut(CutResult),
}

/// State handed back by the interleaved basic procedure. The iterates
/// `y1`/`y2` are advanced in place by the caller-owned buffers.
#[derive(Debug, Clone)]
pub struct PpdpBpResult {
    pub case: PpdpCase,
    pub z1: Vec<f64>,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub z2: Vec<f64>,
    pub iterations: usize,
}

/// One interleaved basic-procedure call: the row side drives its
/// null-space component down, the null side drives its row-space
/// component down, one step each per pass.
#[allow(clippy::too_many_arguments)]
pub fn ppdp_bp(
    f1: &ProjectionFactors,
    f2: &ProjectionFactors,
    y1: &mut [f64],
    y2: &mut [f64],
    original_cols: usize,
    params: &BpParams,
    mut trace: Option<&mut Vec<StepRecord>>,
) -> Result<PpdpBpResult, SolverError> {
    params.validate()?;
    let n = f1.cols();
    let r = f2.cols();
    if y1.len() != n {
        return Err(SolverError::DimensionMismatch {
            expected: n,
            got: y1.len(),
        });
    }
    if y2.len() != r {
        return Err(SolverError::DimensionMismatch {
            expected: r,
            got: y2.len(),
        });
    }
    let threshold1 = 1.0 / (2.0 * (n as f64).powf(1.5));
    let threshold2 = 1.0 / (2.0 * (r as f64).powf(1.5));
    let c = params.step_size;
    let guard = params.iter_guard(n.max(r));

    let mut z1 = f1.apply_null_space(y1)?;
    let mut v1: Vec<f64> = y1.iter().zip(&z1).map(|(a, b)| a - b).collect();
    let mut v2 = f2.apply_row_space(y2)?;
    let mut z2: Vec<f64> = y2.iter().zip(&v2).map(|(a, b)| a - b).collect();
    let mut iterations = 0usize;

    macro_rules! done {
        ($case:expr) => {
            return Ok(PpdpBpResult {
                case: $case,
                z1,
                v1,
                v2,
                z2,
                iterations,
            })
        };
    }

    loop {
        if all_positive(&v1, params.pos_tol_factor) {
            done!(PpdpCase::DualViaRowSide);
        }
        if all_positive(&z1, params.pos_tol_factor) {
            done!(PpdpCase::PrimalViaRowSide);
        }
        if r == original_cols && all_positive(&v2, params.pos_tol_factor) {
            done!(PpdpCase::DualViaNullSide);
        }
        if all_positive(&z2, params.pos_tol_factor) {
            done!(PpdpCase::PrimalViaNullSide);
        }
        if iterations >= guard {
            return Err(SolverError::IterationLimitExceeded { limit: guard });
        }

        // row side step or cut
        let k1: Vec<usize> = (0..n).filter(|&i| z1[i] <= 0.0).collect();
        let mut cut1 = k1.is_empty();
        if !cut1 {
            let p_k = f1.project_indicator_sum(&k1, ProjectionSpace::NullSpace)?;
            let np = norm(&p_k);
            if np <= DEGENERATE_DIR_TOL {
                cut1 = true;
            } else {
                let alpha1 = dot(&p_k, &z1) / np;
                if alpha1 <= -threshold1 {
                    let step = -c * alpha1 / np;
                    let before = norm_sq(&z1);
                    for &i in &k1 {
                        y1[i] += step;
                    }
                    axpy(&mut z1, step, &p_k);
                    for i in 0..n {
                        v1[i] = y1[i] - z1[i];
                    }
                    if let Some(t) = trace.as_deref_mut() {
                        t.push(StepRecord {
                            iteration: iterations + 1,
                            active_cols: n,
                            space: StepSpace::NullSpace,
                            alpha: alpha1,
                            k_size: k1.len(),
                            norm_sq_before: before,
                            norm_sq_after: norm_sq(&z1),
                            min_y_after: y1.iter().cloned().fold(f64::INFINITY, f64::min),
                        });
                    }
                } else {
                    cut1 = true;
                }
            }
        }
        if cut1 {
            let cut = find_cut(&z1, CutSide::Dual)?;
            done!(PpdpCase::RowSideCut(cut));
        }

        // null side step or cut
        let k2: Vec<usize> = (0..r).filter(|&i| v2[i] <= 0.0).collect();
        let mut cut2 = k2.is_empty();
        if !cut2 {
            let q_k = f2.project_indicator_sum(&k2, ProjectionSpace::RowSpace)?;
            let nq = norm(&q_k);
            if nq <= DEGENERATE_DIR_TOL {
                cut2 = true;
            } else {
                let alpha2 = dot(&q_k, &v2) / nq;
                if alpha2 <= -threshold2 {
                    let step = -c * alpha2 / nq;
                    let before = norm_sq(&v2);
                    for &i in &k2 {
                        y2[i] += step;
                    }
                    axpy(&mut v2, step, &q_k);
                    for i in 0..r {
                        z2[i] = y2[i] - v2[i];
                    }
                    if let Some(t) = trace.as_deref_mut() {
                        t.push(StepRecord {
                            iteration: iterations + 1,
                            active_cols: r,
                            space: StepSpace::RowSpace,
                            alpha: alpha2,
                            k_size: k2.len(),
                            norm_sq_before: before,
                            norm_sq_after: norm_sq(&v2),
                            min_y_after: y2.iter().cloned().fold(f64::INFINITY, f64::min),
                        });
                    }
                } else {
                    cut2 = true;
                }
            }
        }
        if cut2 {
            let cut = find_cut(&v2, CutSide::Primal)?;
            done!(PpdpCase::NullSideCut(cut));
        }

        iterations += 1;
    }
}

/// Full interleaved solve; always terminates with a verified witness on
/// solvable inputs, using whichever side certifies first.
pub fn ppdp_ma(a: &Matrix, opts: &SolveOptions) -> Result<SolveOutcome, SolverError> {
    opts.bp.validate()?;
    validate_problem_matrix(a)?;
    let bit_len = resolve_bit_length(a, opts)?;
    let started = Instant::now();

    let n = a.cols();
    let y_init = vec![1.0 / n as f64; n];

    // row side
    let mut a1 = a.clone();
    let mut doublings = vec![0u32; n];
    let mut y1 = y_init.clone();
    let mut f1 = compute_projection_factors(&a1, 0.0)?;
    let mut row_dead = false;

    // null side
    let mut a2 = a.clone();
    let mut halvings = vec![0u32; n];
    let mut active: Vec<usize> = (0..n).collect();
    let mut y2 = y_init.clone();
    let mut f2 = compute_projection_factors(&a2, 0.0)?;
    let mut null_dead = false;

    let mut stats = SolveStats::default();
    stats.factorizations = 2;
    let mut cut_events: Vec<CutEvent> = Vec::new();
    let mut trace: Vec<StepRecord> = Vec::new();

    loop {
        if row_dead && null_dead {
            return Err(SolverError::VerificationFailed {
                details: "both rescaling bounds exhausted without a witness".into(),
            });
        }

        if null_dead {
            // primal side proven infeasible by the bound; run the row side
            // alone with the relaxed standalone exit conditions
            let outcome = dual_bp(&f1, &opts.bp, opts.record_steps.then_some(&mut trace))?;
            stats.bp_calls += 1;
            stats.bp_iterations += outcome.state().iterations;
            match outcome {
                BpOutcome::DualFeasible { state, .. } => {
                    let u = f1.recover_multiplier(&state.y)?;
                    return finish_dual(a, u, stats, started, opts, cut_events, trace);
                }
                BpOutcome::PrimalFeasible { z, .. } => {
                    // contradicts the exhausted null side; trust only a
                    // verified witness
                    let x: Vec<f64> = (0..n).map(|i| pow2_pos(doublings[i]) * z[i].max(0.0)).collect();
                    return finish_primal(a, x, stats, started, opts, cut_events, trace);
                }
                BpOutcome::Cut { cut, .. } => {
                    rescale_row_side(
                        &mut a1,
                        &mut doublings,
                        &cut.indices,
                        bit_len,
                        &mut row_dead,
                    )?;
                    stats.rescaling_rounds += 1;
                    if opts.record_cuts {
                        cut_events.push(CutEvent {
                            side: CutSide::Dual,
                            matrix: a1.clone(),
                            indices: cut.indices.clone(),
                        });
                    }
                    f1 = compute_projection_factors(&a1, 0.0)?;
                    stats.factorizations += 1;
                }
            }
            continue;
        }

        if row_dead {
            // transposed side proven infeasible by the bound; plain
            // maximum-support search on the null side
            let outcome = primal_bp(&f2, n, &opts.bp, opts.record_steps.then_some(&mut trace))?;
            stats.bp_calls += 1;
            stats.bp_iterations += outcome.state().iterations;
            match outcome {
                BpOutcome::PrimalFeasible { z, .. } => {
                    let x = embed_null_side(n, &active, &halvings, &z);
                    return finish_primal(a, x, stats, started, opts, cut_events, trace);
                }
                BpOutcome::DualFeasible { state, .. } => {
                    let u = f2.recover_multiplier(&state.y)?;
                    return finish_dual(a, u, stats, started, opts, cut_events, trace);
                }
                BpOutcome::Cut { cut, .. } => {
                    stats.rescaling_rounds += 1;
                    if opts.record_cuts {
                        cut_events.push(CutEvent {
                            side: CutSide::Primal,
                            matrix: a2.clone(),
                            indices: cut.indices.clone(),
                        });
                    }
                    let survived = rescale_null_side(
                        &mut a2,
                        &mut active,
                        &mut halvings,
                        &cut.indices,
                        bit_len,
                    )?;
                    if !survived {
                        null_dead = true;
                        continue;
                    }
                    f2 = compute_projection_factors(&a2, 0.0)?;
                    stats.factorizations += 1;
                }
            }
            continue;
        }

        let result = ppdp_bp(
            &f1,
            &f2,
            &mut y1,
            &mut y2,
            n,
            &opts.bp,
            opts.record_steps.then_some(&mut trace),
        )?;
        stats.bp_calls += 1;
        stats.bp_iterations += result.iterations;

        match result.case {
            PpdpCase::DualViaRowSide => {
                let u = f1.recover_multiplier(&y1)?;
                return finish_dual(a, u, stats, started, opts, cut_events, trace);
            }
            PpdpCase::PrimalViaRowSide => {
                let x: Vec<f64> = (0..n)
                    .map(|i| pow2_pos(doublings[i]) * result.z1[i].max(0.0))
                    .collect();
                return finish_primal(a, x, stats, started, opts, cut_events, trace);
            }
            PpdpCase::DualViaNullSide => {
                let u = f2.recover_multiplier(&y2)?;
                return finish_dual(a, u, stats, started, opts, cut_events, trace);
            }
            PpdpCase::PrimalViaNullSide => {
                let x = embed_null_side(n, &active, &halvings, &result.z2);
                return finish_primal(a, x, stats, started, opts, cut_events, trace);
            }
            PpdpCase::RowSideCut(cut) => {
                stats.rescaling_rounds += 1;
                if opts.record_cuts {
                    cut_events.push(CutEvent {
                        side: CutSide::Dual,
                        matrix: a1.clone(),
                        indices: cut.indices.clone(),
                    });
                }
                rescale_row_side(&mut a1, &mut doublings, &cut.indices, bit_len, &mut row_dead)?;
                y1.copy_from_slice(&y_init);
                f1 = compute_projection_factors(&a1, 0.0)?;
                stats.factorizations += 1;
            }
            PpdpCase::NullSideCut(cut) => {
                stats.rescaling_rounds += 1;
                if opts.record_cuts {
                    cut_events.push(CutEvent {
                        side: CutSide::Primal,
                        matrix: a2.clone(),
                        indices: cut.indices.clone(),
                    });
                }
                let survived =
                    rescale_null_side(&mut a2, &mut active, &mut halvings, &cut.indices, bit_len)?;
                if !survived {
                    null_dead = true;
                    continue;
                }
                let r = active.len();
                y2 = vec![1.0 / r as f64; r];
                f2 = compute_projection_factors(&a2, 0.0)?;
                stats.factorizations += 1;
            }
        }
    }
}

/// Double the cut columns; the side dies when any exponent reaches the
/// bound, proving the normalized transposed system infeasible.
fn rescale_row_side(
    a1: &mut Matrix,
    doublings: &mut [u32],
    indices: &[usize],
    bit_len: u64,
    row_dead: &mut bool,
) -> Result<(), SolverError> {
    a1.scale_columns(indices, 2.0);
    for &j in indices {
        doublings[j] += 1;
        if doublings[j] as u64 >= bit_len {
            *row_dead = true;
        }
    }
    Ok(())
}

/// Halve the cut columns and delete those past the bound; returns false
/// when no column survives.
fn rescale_null_side(
    a2: &mut Matrix,
    active: &mut Vec<usize>,
    halvings: &mut [u32],
    indices: &[usize],
    bit_len: u64,
) -> Result<bool, SolverError> {
    a2.scale_columns(indices, 0.5);
    for &j in indices {
        halvings[active[j]] += 1;
    }
    let keep: Vec<usize> = (0..active.len())
        .filter(|&j| (halvings[active[j]] as u64) < bit_len)
        .collect();
    if keep.is_empty() {
        return Ok(false);
    }
    if keep.len() < active.len() {
        *a2 = a2.select_columns(&keep)?;
        *active = keep.iter().map(|&j| active[j]).collect();
    }
    Ok(true)
}

fn embed_null_side(n: usize, active: &[usize], halvings: &[u32], z: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (pos, &orig) in active.iter().enumerate() {
        x[orig] = pow2_neg(halvings[orig]) * z[pos].max(0.0);
    }
    x
}
