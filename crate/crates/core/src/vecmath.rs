//! Small dense vector helpers used by the solver loops.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub(crate) fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// a += s * b
pub(crate) fn axpy(a: &mut [f64], s: f64, b: &[f64]) {
    debug_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter_mut().zip(b) {
        *x += s * y;
    }
}

/// Strict positivity with a relative floor: every entry must exceed
/// `tol_factor * ||a||_inf`.
pub(crate) fn all_positive(a: &[f64], tol_factor: f64) -> bool {
    let floor = tol_factor * inf_norm(a);
    !a.is_empty() && a.iter().all(|&x| x > floor)
}

/// Nonnegativity up to a relative tolerance.
pub(crate) fn all_nonnegative(a: &[f64], tol_factor: f64) -> bool {
    let floor = -tol_factor * inf_norm(a);
    a.iter().all(|&x| x >= floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axpy_accumulates() {
        let mut a = vec![1.0, 2.0];
        axpy(&mut a, 2.0, &[3.0, -1.0]);
        assert_eq!(a, vec![7.0, 0.0]);
    }

    #[test]
    fn positivity_uses_relative_floor() {
        assert!(all_positive(&[1.0, 2.0], 1e-11));
        assert!(!all_positive(&[1.0, 0.0], 1e-11));
        assert!(!all_positive(&[1.0, 1e-14], 1e-11));
        assert!(all_nonnegative(&[1.0, -1e-14], 1e-11));
        assert!(!all_nonnegative(&[1.0, -1e-3], 1e-11));
    }
}
