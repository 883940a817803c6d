//! Per-coordinate upper bounds on normalized feasible solutions and the
//! cut sets they induce.
//!
//! For any vector `w` in the relevant projection space and any nonzero
//! coordinate `w_j`, every feasible solution `x` of the normalized system
//! satisfies `x_j <= sum_i max(0, w_i / (-w_j))`. Indices whose bound drops
//! to 1/2 or below license a rescaling.

use crate::error::SolverError;

/// Which normalized system a bound refers to: the null-space system
/// (`Ax = 0, x in [0,1]^n`) reads bounds off the row-space component, the
/// row-space system reads them off the null-space component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutSide {
    Primal,
    Dual,
}

/// Result of a cut search: all indices whose bound is at most 1/2,
/// plus the bound values for diagnostics.
#[derive(Debug, Clone)]
pub struct CutResult {
    pub indices: Vec<usize>,
    /// `(index, bound)` for every coordinate with a defined bound.
    pub bounds: Vec<(usize, f64)>,
    pub threshold: f64,
}

/// Relative floor below which a coordinate counts as zero and its bound is
/// undefined.
pub const ZERO_COORD_FACTOR: f64 = 1e-12;

fn bound_at(w: &[f64], j: usize) -> Result<f64, SolverError> {
    if j >= w.len() {
        return Err(SolverError::IndexOutOfRange {
            index: j,
            len: w.len(),
        });
    }
    let scale = crate::vecmath::inf_norm(w);
    if w[j].abs() <= ZERO_COORD_FACTOR * scale {
        return Err(SolverError::ZeroCoordinate { index: j });
    }
    let neg_inv = -1.0 / w[j];
    Ok(w.iter().map(|&wi| (wi * neg_inv).max(0.0)).sum())
}

/// Upper bound for `x_j` over feasible solutions of the normalized
/// null-space system, read off the row-space component `v`.
pub fn bound_primal(v: &[f64], j: usize) -> Result<f64, SolverError> {
    bound_at(v, j)
}

/// Mirror bound for the normalized row-space system, read off the
/// null-space component `z`.
pub fn bound_dual(z: &[f64], j: usize) -> Result<f64, SolverError> {
    bound_at(z, j)
}

/// Collect every index whose bound is at most 1/2 (ties included).
///
/// Callers invoke this when the basic-procedure step trigger failed, where
/// the cut is guaranteed nonempty; an empty result signals numerical
/// breakdown and is surfaced as an error.
pub fn find_cut(ref_vec: &[f64], _side: CutSide) -> Result<CutResult, SolverError> {
    let scale = crate::vecmath::inf_norm(ref_vec);
    let mut indices = Vec::new();
    let mut bounds = Vec::new();
    for j in 0..ref_vec.len() {
        if ref_vec[j].abs() <= ZERO_COORD_FACTOR * scale {
            continue;
        }
        let b = bound_at(ref_vec, j)?;
        bounds.push((j, b));
        if b <= 0.5 {
            indices.push(j);
        }
    }
    if indices.is_empty() {
        return Err(SolverError::EmptyCut);
    }
    Ok(CutResult {
        indices,
        bounds,
        threshold: 0.5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        // positive-part sums, 0-indexed coordinates
        assert!((bound_primal(&[1.0, -1.0, 0.5], 1).unwrap() - 1.5).abs() < 1e-15);
        assert!((bound_primal(&[-1.0, 1.0], 0).unwrap() - 1.0).abs() < 1e-15);
        assert!((bound_dual(&[1.0, -1.0, 0.5], 1).unwrap() - 1.5).abs() < 1e-15);
        assert!((bound_dual(&[2.0, -4.0], 1).unwrap() - 0.5).abs() < 1e-15);
        assert!((bound_dual(&[-1.0, 1.0], 0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bounds_are_scale_invariant() {
        let v = [0.3, -0.2, 0.9, -0.05];
        for j in 0..v.len() {
            let b = bound_primal(&v, j).unwrap();
            let scaled: Vec<f64> = v.iter().map(|x| x * 7.25).collect();
            let bs = bound_primal(&scaled, j).unwrap();
            assert!((b - bs).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn zero_coordinate_is_rejected() {
        assert!(matches!(
            bound_primal(&[1.0, 0.0], 1),
            Err(SolverError::ZeroCoordinate { index: 1 })
        ));
        assert!(matches!(
            bound_primal(&[1.0, 1e-15], 1),
            Err(SolverError::ZeroCoordinate { .. })
        ));
    }

    #[test]
    fn cut_collects_all_qualifying_indices() {
        // bound_0 evaluated verbatim on the positive coordinate: the two
        // negative entries fold to (1/0.9)*0.01*... = 0.0111 <= 1/2
        let cut = find_cut(&[0.9, -0.01], CutSide::Primal).unwrap();
        assert_eq!(cut.indices, vec![0]);
        let b0 = cut.bounds.iter().find(|(j, _)| *j == 0).unwrap().1;
        assert!((b0 - 0.01 / 0.9).abs() < 1e-12);
        let b1 = cut.bounds.iter().find(|(j, _)| *j == 1).unwrap().1;
        assert!((b1 - 90.0).abs() < 1e-9);
    }

    #[test]
    fn verbatim_bound_on_positive_coordinate() {
        // every entry of v/(-v_0) is nonpositive except the folded small
        // negatives: bound_0 = 0.2, so the cut picks index 0 while the
        // negative coordinates have bound 10
        let cut = find_cut(&[1.0, -0.1, -0.1], CutSide::Primal).unwrap();
        assert_eq!(cut.indices, vec![0]);
        for (j, b) in cut.bounds {
            if j > 0 {
                assert!((b - 10.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn empty_cut_is_an_error() {
        // antisymmetric pair: both bounds are exactly 1, nothing qualifies
        assert!(matches!(
            find_cut(&[1.0, -1.0], CutSide::Primal),
            Err(SolverError::EmptyCut)
        ));
    }

    #[test]
    fn ties_at_half_are_included() {
        // bound_1 = 0.5 exactly
        let cut = find_cut(&[2.0, -4.0], CutSide::Dual).unwrap();
        assert!(cut.indices.contains(&1));
    }
}
