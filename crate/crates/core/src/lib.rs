//! Feasibility solver for homogeneous linear systems by projection and
//! rescaling.
//!
//! Given an integer matrix `A`, exactly one of the two systems
//!
//! ```text
//! Ax = 0, x >= 0, x != 0        A^T u > 0
//! ```
//!
//! is feasible. This crate decides which, returns a verified witness, and
//! for the first system returns a solution of maximum support. Three
//! solver drives are provided: a null-space-rescaling solve tuned to
//! infeasible instances, a row-space-rescaling solve tuned to feasible
//! instances, and an interleaved primal-dual drive balanced across both,
//! plus classic single-index update rules for benchmarking.

pub mod baselines;
pub mod certificates;
pub mod cuts;
pub mod dual;
pub mod error;
pub mod instances;
pub mod linalg;
pub mod matrix;
pub mod oracle;
pub mod ppdp;
pub mod primal;
pub mod solve;
mod vecmath;

pub use certificates::{
    max_support_oracle, recover_general, reduce_general, verify_dual, verify_primal, Certificate,
    CertificateKind, InfeasibleSide, Residuals, VerificationReport,
};
pub use cuts::{bound_dual, bound_primal, find_cut, CutResult, CutSide};
pub use dual::{dual_bp, dual_ma};
pub use error::SolverError;
pub use instances::{generate, generate_one, read_problem, write_problem, GeneratorSpec};
pub use linalg::{
    compute_projection_factors, estimate_rho, ProjectionFactors, ProjectionSpace,
};
pub use matrix::Matrix;
pub use ppdp::{ppdp_bp, ppdp_ma, PpdpBpResult, PpdpCase};
pub use primal::{primal_bp, primal_ma};
pub use solve::{
    BpOutcome, BpParams, BpState, CutEvent, SolveOptions, SolveOutcome, SolveStats, StepRecord,
    StepSpace,
};
pub use baselines::{
    baseline_ma, dunagan_vempala_step, perceptron_step, run_baseline_bp, trace_to_csv,
    von_neumann_step, BaselineOutcome, BaselineRun, UpdateRule,
};
