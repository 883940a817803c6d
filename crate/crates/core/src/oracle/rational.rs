//! Exact rational linear algebra for the test oracle.
//!
//! This module is deliberately independent of the floating-point solver
//! path: it hand-rolls Gauss-Jordan elimination over `BigRational` and is
//! only used for ground truth on small instances.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::SolverError;
use crate::matrix::Matrix;

pub type Rat = BigRational;

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Exact conversion: every finite f64 is a dyadic rational.
pub fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("finite input")
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // numer/denom may exceed i64; go through string-free float division
    // of the truncated quotient plus remainder correction at oracle scale.
    let numer = r.numer();
    let denom = r.denom();
    bigint_to_f64(numer) / bigint_to_f64(denom)
}

fn bigint_to_f64(v: &BigInt) -> f64 {
    // Good to ~2^63 per limb chunk; oracle values stay far below that
    // after reduction, but fall back to string parsing for safety.
    if let Some(x) = i64::try_from(v.clone()).ok() {
        x as f64
    } else {
        v.to_string().parse::<f64>().unwrap_or(f64::INFINITY)
    }
}

pub fn matrix_to_rational(a: &Matrix) -> Vec<Vec<Rat>> {
    (0..a.rows())
        .map(|i| a.row(i).iter().map(|&x| rat_from_f64(x)).collect())
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(rows: &mut [Vec<Rat>]) -> Vec<usize> {
    let m = rows.len();
    if m == 0 {
        return Vec::new();
    }
    let n = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].clone();
        for j in 0..n {
            rows[r][j] = &rows[r][j] / &inv;
        }
        for i in 0..m {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..n {
                    let sub = &f * &rows[r][j];
                    rows[i][j] = &rows[i][j] - &sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m {
            break;
        }
    }
    pivots
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut copy = rows.to_vec();
    rref(&mut copy).len()
}

/// Independent rows spanning the row space (nonzero rows of the rref).
pub fn row_basis(rows: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let mut copy = rows.to_vec();
    let pivots = rref(&mut copy);
    copy.truncate(pivots.len());
    copy
}

/// Solve `M x = rhs` when the solution is unique (full column rank and
/// consistent); `None` otherwise.
pub fn solve_unique(m_rows: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let m = m_rows.len();
    assert_eq!(m, rhs.len());
    let n = if m == 0 { 0 } else { m_rows[0].len() };
    let mut aug: Vec<Vec<Rat>> = m_rows
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&n) {
        return None; // inconsistent
    }
    if pivots.len() < n {
        return None; // underdetermined
    }
    let mut x = vec![Rat::zero(); n];
    for (row_idx, &col) in pivots.iter().enumerate() {
        x[col] = aug[row_idx][n].clone();
    }
    Some(x)
}

/// Invert a square matrix; `None` when singular.
pub fn invert(rows: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = rows.len();
    let mut aug: Vec<Vec<Rat>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n);
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { Rat::one() } else { Rat::zero() });
            }
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let m = a.len();
    let k = if m == 0 { 0 } else { a[0].len() };
    let n = if b.is_empty() { 0 } else { b[0].len() };
    assert_eq!(k, b.len());
    let mut out = vec![vec![Rat::zero(); n]; m];
    for i in 0..m {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..n {
                let add = &a[i][l] * &b[l][j];
                out[i][j] = &out[i][j] + &add;
            }
        }
    }
    out
}

pub fn transpose(a: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    (0..n)
        .map(|j| (0..m).map(|i| a[i][j].clone()).collect())
        .collect()
}

/// Exact projections onto the null space and row space of `a`:
/// `Q = B^T (B B^T)^{-1} B` over a row basis `B`, `P = I - Q`.
/// A zero matrix yields `Q = 0`, `P = I`.
pub fn projection_pair(a: &Matrix) -> Result<(Vec<Vec<Rat>>, Vec<Vec<Rat>>), SolverError> {
    let n = a.cols();
    let rows = matrix_to_rational(a);
    let basis = row_basis(&rows);
    let q = if basis.is_empty() {
        vec![vec![Rat::zero(); n]; n]
    } else {
        let bt = transpose(&basis);
        let gram = mat_mul(&basis, &bt);
        let gram_inv = invert(&gram).ok_or_else(|| SolverError::InvalidConfig(
            "row basis gram matrix must be invertible".into(),
        ))?;
        mat_mul(&mat_mul(&bt, &gram_inv), &basis)
    };
    let mut p = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            p[i][j] = if i == j {
                Rat::one() - &q[i][j]
            } else {
                -q[i][j].clone()
            };
        }
    }
    Ok((p, q))
}

pub fn apply(rows: &[Vec<Rat>], x: &[Rat]) -> Vec<Rat> {
    rows.iter()
        .map(|r| {
            r.iter()
                .zip(x)
                .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect()
}

/// Vertices of the normalized feasible region `{x : Ax = 0, sum x = 1, x >= 0}`.
///
/// Every vertex has linearly independent support columns in `[A; 1]`, so
/// enumerating supports of size at most `rank + 1` finds them all.
pub fn simplex_vertices(a: &Matrix) -> Vec<Vec<Rat>> {
    let m = a.rows();
    let n = a.cols();
    let mut stacked = matrix_to_rational(a);
    stacked.push(vec![Rat::one(); n]);
    let max_support = (m + 1).min(n);
    let mut rhs = vec![Rat::zero(); m];
    rhs.push(Rat::one());

    let mut vertices = Vec::new();
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        if support.len() > max_support {
            continue;
        }
        let cols: Vec<Vec<Rat>> = stacked
            .iter()
            .map(|row| support.iter().map(|&j| row[j].clone()).collect())
            .collect();
        let Some(xs) = solve_unique(&cols, &rhs) else {
            continue;
        };
        if xs.iter().any(|v| v.is_negative()) {
            continue;
        }
        let mut x = vec![Rat::zero(); n];
        for (k, &j) in support.iter().enumerate() {
            x[j] = xs[k].clone();
        }
        vertices.push(x);
    }
    vertices
}

/// Exact maximum support of `{Ax = 0, x >= 0, x != 0}`: the union of the
/// vertex supports of the normalized region.
pub fn max_support(a: &Matrix) -> (bool, Vec<usize>) {
    let vertices = simplex_vertices(a);
    let feasible = !vertices.is_empty();
    let n = a.cols();
    let mut in_support = vec![false; n];
    for v in &vertices {
        for (j, val) in v.iter().enumerate() {
            if val.is_positive() {
                in_support[j] = true;
            }
        }
    }
    let support = (0..n).filter(|&j| in_support[j]).collect();
    (feasible, support)
}

/// Vertices of `{x : Ax = 0, 0 <= x <= 1}`.
///
/// At a vertex the coordinates strictly between the bounds form a set `F`
/// with `A_F` of full column rank; the rest sit at 0 or 1.
pub fn box_null_vertices(a: &Matrix) -> Vec<Vec<Rat>> {
    let m = a.rows();
    let n = a.cols();
    let rows = matrix_to_rational(a);
    let mut vertices: Vec<Vec<Rat>> = Vec::new();

    let max_free = m.min(n);
    for free_mask in 0u32..(1 << n) {
        let free: Vec<usize> = (0..n).filter(|j| free_mask & (1 << j) != 0).collect();
        if free.len() > max_free {
            continue;
        }
        let fixed: Vec<usize> = (0..n).filter(|j| free_mask & (1 << j) == 0).collect();
        let fixed_count = fixed.len();
        for assign in 0u32..(1 << fixed_count) {
            let mut x = vec![Rat::zero(); n];
            for (k, &j) in fixed.iter().enumerate() {
                x[j] = if assign & (1 << k) != 0 {
                    Rat::one()
                } else {
                    Rat::zero()
                };
            }
            if free.is_empty() {
                if apply(&rows, &x).iter().all(|v| v.is_zero()) {
                    push_unique(&mut vertices, x);
                }
                continue;
            }
            // A_F x_F = -A_fixed x_fixed, unique solution required
            let cols: Vec<Vec<Rat>> = rows
                .iter()
                .map(|row| free.iter().map(|&j| row[j].clone()).collect())
                .collect();
            let rhs: Vec<Rat> = rows
                .iter()
                .map(|row| {
                    -fixed
                        .iter()
                        .fold(Rat::zero(), |acc, &j| acc + &row[j] * &x[j])
                })
                .collect();
            let Some(xf) = solve_unique(&cols, &rhs) else {
                continue;
            };
            if xf
                .iter()
                .any(|v| v.is_negative() || v > &Rat::one())
            {
                continue;
            }
            for (k, &j) in free.iter().enumerate() {
                x[j] = xf[k].clone();
            }
            push_unique(&mut vertices, x);
        }
    }
    vertices
}

/// Vertices of the row-space slab `{x = B^T w : 0 <= x <= 1}` where `B` is
/// a row basis of `a`; returned in x-coordinates.
pub fn row_space_box_vertices(a: &Matrix) -> Vec<Vec<Rat>> {
    let n = a.cols();
    let rows = matrix_to_rational(a);
    let basis = row_basis(&rows);
    let k = basis.len();
    if k == 0 {
        return vec![vec![Rat::zero(); n]];
    }
    let bt = transpose(&basis); // n x k, row j = coefficients of x_j in w

    let mut vertices: Vec<Vec<Rat>> = Vec::new();
    // A vertex of the k-dimensional slab has k active constraints
    // x_j = 0 or x_j = 1 with independent normals.
    let mut combo = vec![0usize; k];
    enumerate_combinations(n, k, &mut combo, 0, 0, &mut |active: &[usize]| {
        let sys: Vec<Vec<Rat>> = active.iter().map(|&j| bt[j].clone()).collect();
        for assign in 0u32..(1 << k) {
            let rhs: Vec<Rat> = (0..k)
                .map(|i| {
                    if assign & (1 << i) != 0 {
                        Rat::one()
                    } else {
                        Rat::zero()
                    }
                })
                .collect();
            let Some(w) = solve_unique(&sys, &rhs) else {
                continue;
            };
            let x = apply(&bt, &w);
            if x.iter().all(|v| !v.is_negative() && v <= &Rat::one()) {
                push_unique(&mut vertices, x);
            }
        }
    });
    vertices
}

fn enumerate_combinations(
    n: usize,
    k: usize,
    combo: &mut Vec<usize>,
    start: usize,
    depth: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if depth == k {
        f(combo);
        return;
    }
    for j in start..n {
        combo[depth] = j;
        enumerate_combinations(n, k, combo, j + 1, depth + 1, f);
    }
}

fn push_unique(list: &mut Vec<Vec<Rat>>, x: Vec<Rat>) {
    if !list.contains(&x) {
        list.push(x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rref_detects_rank() {
        let rows = matrix_to_rational(&mat(&[&[1.0, 2.0], &[2.0, 4.0]]));
        assert_eq!(rank(&rows), 1);
        let rows = matrix_to_rational(&mat(&[&[1.0, 0.0], &[0.0, 1.0]]));
        assert_eq!(rank(&rows), 2);
    }

    #[test]
    fn invert_round_trips() {
        let rows = matrix_to_rational(&mat(&[&[2.0, 1.0], &[1.0, 1.0]]));
        let inv = invert(&rows).unwrap();
        let prod = mat_mul(&rows, &inv);
        assert!(prod[0][0].is_one() && prod[1][1].is_one());
        assert!(prod[0][1].is_zero() && prod[1][0].is_zero());
    }

    #[test]
    fn projections_for_two_column_difference() {
        // A = [[1, -1]]: Q has entries +-1/2, P is the all-half matrix
        let (p, q) = projection_pair(&mat(&[&[1.0, -1.0]])).unwrap();
        let half = Rat::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(q[0][0], half);
        assert_eq!(q[0][1], -half.clone());
        assert_eq!(p[0][0], half);
        assert_eq!(p[0][1], half);
    }

    #[test]
    fn projection_of_ones_padding() {
        // null space of [[1,0,-1],[0,1,-1]] is spanned by (1,1,1)
        let (p, _q) = projection_pair(&mat(&[&[1.0, 0.0, -1.0], &[0.0, 1.0, -1.0]])).unwrap();
        let third = Rat::new(BigInt::from(1), BigInt::from(3));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(p[i][j], third);
            }
        }
    }

    #[test]
    fn zero_matrix_projects_to_identity_null_space() {
        let (p, q) = projection_pair(&mat(&[&[0.0, 0.0]])).unwrap();
        assert!(q.iter().flatten().all(|v| v.is_zero()));
        assert!(p[0][0].is_one() && p[1][1].is_one());
    }

    #[test]
    fn simplex_vertices_find_max_support() {
        let (feasible, support) = max_support(&mat(&[&[1.0, -1.0, 0.0], &[0.0, 0.0, 1.0]]));
        assert!(feasible);
        assert_eq!(support, vec![0, 1]);

        let (feasible, support) = max_support(&Matrix::identity(2));
        assert!(!feasible);
        assert!(support.is_empty());

        let (feasible, support) = max_support(&mat(&[&[1.0, -1.0]]));
        assert!(feasible);
        assert_eq!(support, vec![0, 1]);
    }

    #[test]
    fn box_vertices_of_difference_matrix() {
        // {x1 = x2, 0 <= x <= 1} has vertices (0,0) and (1,1)
        let verts = box_null_vertices(&mat(&[&[1.0, -1.0]]));
        assert_eq!(verts.len(), 2);
    }

    #[test]
    fn row_space_slab_vertices() {
        // row space of [[1, -1]] is spanned by (1,-1); slab [0,1]^2 cuts it
        // to the segment from (0,0) to ... only (0,0) has both coords in range
        let verts = row_space_box_vertices(&mat(&[&[1.0, -1.0]]));
        assert!(verts.iter().any(|v| v.iter().all(|c| c.is_zero())));
        // every vertex stays in the box
        for v in &verts {
            assert!(v.iter().all(|c| !c.is_negative() && c <= &Rat::one()));
        }
    }
}
