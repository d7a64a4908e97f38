//! Eigenvalues of symmetric tridiagonal matrices by Sturm-sequence bisection.
//!
//! Only the counting function and targeted bisection are provided; the
//! spectral pencils assembled in [`crate::sl`] need a handful of extreme
//! eigenvalues of large tridiagonal matrices, for which full
//! diagonalization would be wasteful.

/// Number of eigenvalues strictly below `x` (Sturm count via the LDLᵀ
/// recurrence, with the standard guard against exact zero pivots).
pub fn count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let n = diag.len();
    debug_assert_eq!(off.len() + 1, n.max(1));
    let mut count = 0usize;
    let mut q = 1.0f64;
    for i in 0..n {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - e2 / q;
        if q < 0.0 {
            count += 1;
        }
        if q == 0.0 {
            q = 1e-300;
        }
    }
    count
}

/// Gershgorin interval containing the whole spectrum.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += off[i - 1].abs();
        }
        if i < n - 1 {
            r += off[i].abs();
        }
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// The k-th smallest eigenvalue (k starting at 1), bisected to relative
/// precision ~1e-14.
pub fn kth_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(diag, off);
    debug_assert!(k >= 1 && k <= diag.len());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(diag, off, mid) >= k {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 * hi.abs().max(lo.abs()).max(1e-30) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// All eigenvalues strictly below `bound`, in increasing order.
pub fn eigenvalues_below(diag: &[f64], off: &[f64], bound: f64) -> Vec<f64> {
    let k = count_below(diag, off, bound);
    (1..=k).map(|j| kth_eigenvalue(diag, off, j)).collect()
}

/// The `k` smallest eigenvalues, in increasing order.
pub fn smallest_eigenvalues(diag: &[f64], off: &[f64], k: usize) -> Vec<f64> {
    (1..=k.min(diag.len()))
        .map(|j| kth_eigenvalue(diag, off, j))
        .collect()
}
