//! Classic basic-procedure update rules, pluggable into the shared
//! outer loop for benchmarking against the multi-index solver.
//!
//! All rules run in a projection space: the von Neumann and perceptron
//! rules drive the null-space component, the relaxation rules drive the
//! row-space component. Every rule shares the same exit cases and the same
//! multi-index cut trigger, so runs differ only in the update applied.

use std::fmt;
use std::fmt::Write as _;

use crate::cuts::{find_cut, CutSide};
use crate::error::SolverError;
use crate::linalg::{ProjectionFactors, ProjectionSpace};
use crate::matrix::Matrix;
use crate::primal::{primal_bp, DEGENERATE_DIR_TOL};
use crate::solve::{
    finish_dual, finish_infeasible, finish_primal, pow2_neg, resolve_bit_length,
    validate_problem_matrix, BpOutcome, BpParams, BpState, CutEvent, SolveOptions, SolveOutcome,
    SolveStats, StepRecord, StepSpace,
};
use crate::vecmath::{all_positive, axpy, dot, norm, norm_sq};

/// Update rule of a baseline basic procedure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpdateRule {
    /// Line-search convex combination, null-space updates.
    VonNeumann,
    /// Unit additive update, null-space updates.
    Perceptron,
    /// Single-index relaxation, row-space updates.
    DunaganVempala { step_size: f64 },
    /// All nonpositive indices at once, row-space updates.
    MultiIndexDv { step_size: f64 },
}

impl UpdateRule {
    pub fn parse(name: &str, step_size: f64) -> Result<Self, SolverError> {
        match name {
            "von-neumann" => Ok(UpdateRule::VonNeumann),
            "perceptron" => Ok(UpdateRule::Perceptron),
            "dv" | "dunagan-vempala" => Ok(UpdateRule::DunaganVempala { step_size }),
            "multi-dv" | "multi-index-dv" => Ok(UpdateRule::MultiIndexDv { step_size }),
            other => Err(SolverError::InvalidConfig(format!(
                "unknown baseline rule '{other}'"
            ))),
        }
    }
}

impl fmt::Display for UpdateRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpdateRule::VonNeumann => write!(f, "von-neumann"),
            UpdateRule::Perceptron => write!(f, "perceptron"),
            UpdateRule::DunaganVempala { .. } => write!(f, "dv"),
            UpdateRule::MultiIndexDv { .. } => write!(f, "multi-dv"),
        }
    }
}

/// Line-search step toward `a_k` with convex weights: the new iterate is
/// the norm-minimizing point of the segment `[y, a_k]`.
pub fn von_neumann_step(
    y: &[f64],
    x: &[f64],
    a_k: &[f64],
    k: usize,
) -> Result<(Vec<f64>, Vec<f64>), SolverError> {
    let diff: Vec<f64> = y.iter().zip(a_k).map(|(a, b)| a - b).collect();
    let dsq = norm_sq(&diff);
    if dsq <= 1e-300 {
        return Err(SolverError::DegenerateDirection);
    }
    let beta = (dot(y, &diff) / dsq).clamp(0.0, 1.0);
    let alpha = 1.0 - beta;
    let y_next = y.iter().zip(a_k).map(|(a, b)| alpha * a + beta * b).collect();
    let mut x_next: Vec<f64> = x.iter().map(|v| alpha * v).collect();
    if k < x_next.len() {
        x_next[k] += beta;
    }
    Ok((y_next, x_next))
}

/// Unit additive update.
pub fn perceptron_step(y: &[f64], x: &[f64], a_k: &[f64], k: usize) -> (Vec<f64>, Vec<f64>) {
    let y_next = y.iter().zip(a_k).map(|(a, b)| a + b).collect();
    let mut x_next = x.to_vec();
    if k < x_next.len() {
        x_next[k] += 1.0;
    }
    (y_next, x_next)
}

/// Orthogonalizing relaxation: removes the `a_k` component from `y`.
pub fn dunagan_vempala_step(y: &[f64], a_k: &[f64], k: usize) -> Result<Vec<f64>, SolverError> {
    let nsq = norm_sq(a_k);
    if nsq <= 1e-300 {
        return Err(SolverError::ZeroColumn { index: k });
    }
    let beta = -dot(y, a_k) / nsq;
    let mut y_next = y.to_vec();
    axpy(&mut y_next, beta, a_k);
    Ok(y_next)
}

/// Terminal state of one baseline run.
#[derive(Debug, Clone)]
pub enum BaselineOutcome {
    Done(BpOutcome),
    /// The iteration budget ran out before any exit case fired; expected
    /// for slow rules and reported rather than treated as an error.
    BudgetExhausted { iterations: usize },
    /// The rule has no applicable index or its cut came up empty.
    Stalled { iterations: usize },
}

#[derive(Debug, Clone)]
pub struct BaselineRun {
    pub outcome: BaselineOutcome,
    pub trace: Vec<StepRecord>,
}

/// Run one baseline basic procedure with the shared exit cases and cut
/// trigger.
pub fn run_baseline_bp(
    f: &ProjectionFactors,
    original_cols: usize,
    rule: UpdateRule,
    params: &BpParams,
    budget: usize,
) -> Result<BaselineRun, SolverError> {
    params.validate()?;
    if let UpdateRule::MultiIndexDv { step_size } = rule {
        let mut trace = Vec::new();
        let p = BpParams {
            step_size,
            max_iters: budget,
            ..params.clone()
        };
        return match primal_bp(f, original_cols, &p, Some(&mut trace)) {
            Ok(outcome) => Ok(BaselineRun {
                outcome: BaselineOutcome::Done(outcome),
                trace,
            }),
            Err(SolverError::IterationLimitExceeded { .. }) => Ok(BaselineRun {
                outcome: BaselineOutcome::BudgetExhausted { iterations: budget },
                trace,
            }),
            Err(e) => Err(e),
        };
    }
    single_index_bp(f, original_cols, rule, params, budget)
}

fn single_index_bp(
    f: &ProjectionFactors,
    original_cols: usize,
    rule: UpdateRule,
    params: &BpParams,
    budget: usize,
) -> Result<BaselineRun, SolverError> {
    let r = f.cols();
    let rf = r as f64;
    let threshold = 1.0 / (2.0 * rf.powf(1.5));
    let null_space_rule = matches!(rule, UpdateRule::VonNeumann | UpdateRule::Perceptron);

    let mut y = vec![1.0 / rf; r];
    let mut z = f.apply_null_space(&y)?;
    let mut v: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a - b).collect();
    let mut trace = Vec::new();
    let mut iterations = 0usize;

    let state = |y: &Vec<f64>, v: &Vec<f64>, z: &Vec<f64>, iterations: usize| BpState {
        y: y.clone(),
        v: v.clone(),
        z: z.clone(),
        step_size: match rule {
            UpdateRule::DunaganVempala { step_size } => step_size,
            _ => 1.0,
        },
        threshold,
        iterations,
    };

    loop {
        if all_positive(&z, params.pos_tol_factor) {
            let s = state(&y, &v, &z, iterations);
            return Ok(BaselineRun {
                outcome: BaselineOutcome::Done(BpOutcome::PrimalFeasible { z, state: s }),
                trace,
            });
        }
        if r == original_cols && all_positive(&v, params.pos_tol_factor) {
            let s = state(&y, &v, &z, iterations);
            return Ok(BaselineRun {
                outcome: BaselineOutcome::Done(BpOutcome::DualFeasible { v, state: s }),
                trace,
            });
        }
        if iterations >= budget {
            return Ok(BaselineRun {
                outcome: BaselineOutcome::BudgetExhausted { iterations },
                trace,
            });
        }

        // shared multi-index cut trigger
        let k_all: Vec<usize> = (0..r).filter(|&i| v[i] <= 0.0).collect();
        let mut trigger_alpha = 0.0;
        let mut cut_now = k_all.is_empty();
        if !cut_now {
            let q_all = f.project_indicator_sum(&k_all, ProjectionSpace::RowSpace)?;
            let nq = norm(&q_all);
            if nq <= DEGENERATE_DIR_TOL {
                cut_now = true;
            } else {
                trigger_alpha = dot(&q_all, &v) / nq;
                cut_now = trigger_alpha > -threshold;
            }
        }
        if cut_now {
            return match find_cut(&v, CutSide::Primal) {
                Ok(cut) => {
                    let s = state(&y, &v, &z, iterations);
                    Ok(BaselineRun {
                        outcome: BaselineOutcome::Done(BpOutcome::Cut { cut, state: s }),
                        trace,
                    })
                }
                Err(SolverError::EmptyCut) if null_space_rule => Ok(BaselineRun {
                    outcome: BaselineOutcome::Stalled { iterations },
                    trace,
                }),
                Err(e) => Err(e),
            };
        }

        let (before, k_size) = if null_space_rule {
            // most negative null-space coordinate
            let Some(k) = argmin(&z) else {
                return Ok(BaselineRun {
                    outcome: BaselineOutcome::Stalled { iterations },
                    trace,
                });
            };
            if z[k] > 0.0 {
                return Ok(BaselineRun {
                    outcome: BaselineOutcome::Stalled { iterations },
                    trace,
                });
            }
            let before = norm_sq(&z);
            let p_k = f.project_indicator_sum(&[k], ProjectionSpace::NullSpace)?;
            match rule {
                UpdateRule::VonNeumann => {
                    let (z_next, y_next) = match von_neumann_step(&z, &y, &p_k, k) {
                        Ok(pair) => pair,
                        Err(SolverError::DegenerateDirection) => {
                            return Ok(BaselineRun {
                                outcome: BaselineOutcome::Stalled { iterations },
                                trace,
                            })
                        }
                        Err(e) => return Err(e),
                    };
                    z = z_next;
                    y = y_next;
                }
                UpdateRule::Perceptron => {
                    let (z_next, y_next) = perceptron_step(&z, &y, &p_k, k);
                    z = z_next;
                    y = y_next;
                }
                _ => unreachable!(),
            }
            for i in 0..r {
                v[i] = y[i] - z[i];
            }
            (before, 1)
        } else {
            // single-index relaxation on the most negative row-space coordinate
            let UpdateRule::DunaganVempala { step_size } = rule else {
                unreachable!()
            };
            let Some(k) = argmin(&v) else {
                return Ok(BaselineRun {
                    outcome: BaselineOutcome::Stalled { iterations },
                    trace,
                });
            };
            let before = norm_sq(&v);
            let q_k = f.project_indicator_sum(&[k], ProjectionSpace::RowSpace)?;
            let nq = norm(&q_k);
            if nq <= DEGENERATE_DIR_TOL {
                return Ok(BaselineRun {
                    outcome: BaselineOutcome::Stalled { iterations },
                    trace,
                });
            }
            let alpha_k = dot(&q_k, &v) / nq;
            let step = -step_size * alpha_k / nq;
            y[k] += step;
            axpy(&mut v, step, &q_k);
            for i in 0..r {
                z[i] = y[i] - v[i];
            }
            (before, 1)
        };

        iterations += 1;
        let driven = if null_space_rule { &z } else { &v };
        trace.push(StepRecord {
            iteration: iterations,
            active_cols: r,
            space: if null_space_rule {
                StepSpace::NullSpace
            } else {
                StepSpace::RowSpace
            },
            alpha: trigger_alpha,
            k_size,
            norm_sq_before: before,
            norm_sq_after: norm_sq(driven),
            min_y_after: y.iter().cloned().fold(f64::INFINITY, f64::min),
        });
    }
}

fn argmin(w: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &x) in w.iter().enumerate() {
        if best.map_or(true, |b| x < w[b]) {
            best = Some(i);
        }
    }
    best
}

/// Drive a full solve with a baseline rule in place of the multi-index
/// basic procedure; shares the null-space rescaling loop.
pub fn baseline_ma(
    a: &Matrix,
    rule: UpdateRule,
    opts: &SolveOptions,
) -> Result<SolveOutcome, SolverError> {
    opts.bp.validate()?;
    validate_problem_matrix(a)?;
    let bit_len = resolve_bit_length(a, opts)?;
    let started = std::time::Instant::now();

    let n = a.cols();
    let mut halvings = vec![0u32; n];
    let mut active: Vec<usize> = (0..n).collect();
    let mut current = a.clone();
    let mut stats = SolveStats::default();
    let mut cut_events: Vec<CutEvent> = Vec::new();
    let mut trace: Vec<StepRecord> = Vec::new();

    loop {
        let f = crate::linalg::compute_projection_factors(&current, 0.0)?;
        stats.factorizations += 1;
        let budget = opts.bp.iter_guard(f.cols());
        let run = run_baseline_bp(&f, n, rule, &opts.bp, budget)?;
        stats.bp_calls += 1;
        if opts.record_steps {
            trace.extend(run.trace.iter().copied());
        }
        let outcome = match run.outcome {
            BaselineOutcome::Done(o) => o,
            BaselineOutcome::BudgetExhausted { .. } | BaselineOutcome::Stalled { .. } => {
                return Err(SolverError::IterationLimitExceeded { limit: budget });
            }
        };
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
                        crate::certificates::InfeasibleSide::Primal,
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

/// CSV rows `iteration, norm_sq, alpha, k_size` for a recorded trace.
pub fn trace_to_csv(trace: &[StepRecord]) -> String {
    let mut out = String::from("iteration,norm_sq,alpha,k_size\n");
    for rec in trace {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            rec.iteration, rec.norm_sq_after, rec.alpha, rec.k_size
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::compute_projection_factors;

    fn mat(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn von_neumann_closed_form() {
        let (y, _x) = von_neumann_step(&[1.0, 0.0], &[0.0, 0.0], &[-1.0, 0.0], 0).unwrap();
        assert!(y[0].abs() < 1e-15 && y[1].abs() < 1e-15);

        let (y, _x) = von_neumann_step(&[1.0, 0.0], &[0.0, 0.0], &[0.0, -1.0], 1).unwrap();
        assert!((y[0] - 0.5).abs() < 1e-15 && (y[1] + 0.5).abs() < 1e-15);
        assert!((norm(&y) - (2f64).sqrt() / 2.0).abs() < 1e-15);

        assert!(matches!(
            von_neumann_step(&[0.3, -0.2], &[0.0, 0.0], &[0.3, -0.2], 0),
            Err(SolverError::DegenerateDirection)
        ));
    }

    #[test]
    fn von_neumann_never_grows_norm() {
        // greedy index satisfies <a_k, y> <= 0; norm is non-increasing
        let y = [0.8, -0.6, 0.1];
        let a_k = [-0.5, 0.2, -0.4];
        assert!(dot(&y, &a_k) <= 0.0);
        let (y_next, _) = von_neumann_step(&y, &[0.0; 3], &a_k, 0).unwrap();
        assert!(norm(&y_next) <= norm(&y) + 1e-12);
    }

    #[test]
    fn perceptron_adds_directly() {
        let (y, x) = perceptron_step(&[1.0, 0.0], &[0.0, 0.0], &[-1.0, 0.0], 0);
        assert_eq!(y, vec![0.0, 0.0]);
        assert_eq!(x, vec![1.0, 0.0]);
        let (y, _) = perceptron_step(&[0.0, 0.0], &[0.0, 0.0], &[0.3, -0.4], 1);
        assert_eq!(y, vec![0.3, -0.4]);
        let (y, _) = perceptron_step(&[1.0, 1.0], &[0.0, 0.0], &[0.0, -1.0], 1);
        assert_eq!(y, vec![1.0, 0.0]);
    }

    #[test]
    fn dv_step_orthogonalizes() {
        let y = dunagan_vempala_step(&[1.0, 1.0], &[0.0, 1.0], 1).unwrap();
        assert_eq!(y, vec![1.0, 0.0]);
        // already orthogonal: no change
        let y = dunagan_vempala_step(&[1.0, 0.0], &[0.0, 1.0], 1).unwrap();
        assert_eq!(y, vec![1.0, 0.0]);
        assert!(matches!(
            dunagan_vempala_step(&[1.0, 0.0], &[0.0, 0.0], 1),
            Err(SolverError::ZeroColumn { index: 1 })
        ));
    }

    #[test]
    fn dv_output_is_orthogonal_to_column() {
        let y = [0.3, -0.7, 0.2];
        let a_k = [1.0, 2.0, -0.5];
        let y_next = dunagan_vempala_step(&y, &a_k, 0).unwrap();
        assert!(dot(&y_next, &a_k).abs() <= 1e-10 * norm(&y) * norm(&a_k));
    }

    #[test]
    fn all_rules_terminate_immediately_on_trivial_instances() {
        let rules = [
            UpdateRule::VonNeumann,
            UpdateRule::Perceptron,
            UpdateRule::DunaganVempala { step_size: 1.8 },
            UpdateRule::MultiIndexDv { step_size: 1.8 },
        ];
        for rule in rules {
            let f = compute_projection_factors(&Matrix::identity(2), 0.0).unwrap();
            let run = run_baseline_bp(&f, 2, rule, &BpParams::default(), 1000).unwrap();
            assert!(
                matches!(
                    run.outcome,
                    BaselineOutcome::Done(BpOutcome::DualFeasible { .. })
                ),
                "identity should be dual feasible for {rule}"
            );

            let f = compute_projection_factors(&mat(&[&[1.0, -1.0]]), 0.0).unwrap();
            let run = run_baseline_bp(&f, 2, rule, &BpParams::default(), 1000).unwrap();
            assert!(matches!(
                run.outcome,
                BaselineOutcome::Done(BpOutcome::PrimalFeasible { .. })
            ));
        }
    }

    #[test]
    fn dv_reaches_dual_feasible_within_bound() {
        let a = mat(&[&[1.0, 1.0]]);
        let f = compute_projection_factors(&a, 0.0).unwrap();
        let rule = UpdateRule::DunaganVempala { step_size: 1.8 };
        // iteration bound 4 r^2 / (2c - c^2)
        let bound = (4.0 * 4.0 / (2.0 * 1.8 - 1.8 * 1.8_f64)).ceil() as usize;
        let run = run_baseline_bp(&f, 2, rule, &BpParams::default(), bound).unwrap();
        assert!(matches!(
            run.outcome,
            BaselineOutcome::Done(BpOutcome::DualFeasible { .. })
        ));
    }

    #[test]
    fn baseline_ma_matches_multi_index_verdicts() {
        let instances = [
            mat(&[&[1.0, -1.0]]),
            mat(&[&[1.0, 1.0]]),
            mat(&[&[1.0, -2.0, 1.0], &[0.0, 1.0, -1.0]]),
        ];
        for a in &instances {
            let reference = crate::primal::primal_ma(a, &SolveOptions::default()).unwrap();
            let run = baseline_ma(
                a,
                UpdateRule::DunaganVempala { step_size: 1.8 },
                &SolveOptions::default(),
            )
            .unwrap();
            assert_eq!(run.certificate.kind, reference.certificate.kind);
        }
    }

    #[test]
    fn csv_trace_has_header_and_rows() {
        let a = mat(&[&[1.0, 1.0]]);
        let f = compute_projection_factors(&a, 0.0).unwrap();
        let run = run_baseline_bp(
            &f,
            2,
            UpdateRule::DunaganVempala { step_size: 1.0 },
            &BpParams::default(),
            100,
        )
        .unwrap();
        let csv = trace_to_csv(&run.trace);
        assert!(csv.starts_with("iteration,norm_sq,alpha,k_size\n"));
    }
}
