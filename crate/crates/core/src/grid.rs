//! Grid constructions shared by the solvers.

/// Spacing of the clustered grid at the r = 1 end.
const END_SPACING: f64 = 5e-6;

/// Grid of `n` points on [r_min, 1] refined geometrically toward both ends,
/// with the last point exactly 1. The spacing near r_min resolves the
/// singular endpoint of the radial problems; toward 1 the spacings contract
/// geometrically down to [`END_SPACING`], with no jump in the spacing
/// sequence (finite-difference stencils stay well conditioned).
pub fn clustered_grid(r_min: f64, n: usize) -> Vec<f64> {
    assert!(n >= 16, "grid too small");
    assert!(r_min > 0.0 && r_min < 0.25);
    let half = n / 2;
    let m = n - half; // right-block points, 1.0 inclusive
    let mut g = Vec::with_capacity(n);
    // left block: geometric positions from r_min up to (but excluding) 1/2
    let ratio = (0.5 / r_min).powf(1.0 / half as f64);
    let mut x = r_min;
    for _ in 0..half {
        g.push(x);
        x *= ratio;
    }
    // right block: m points from ~1/2 to 1 whose spacings shrink
    // geometrically to s_end; the growth factor solves
    // s_end (sigma^{m-1} - 1)/(sigma - 1) = 1/2.
    let s_end = END_SPACING.max(r_min);
    let gaps = m - 1;
    let total = 0.5f64;
    let sum = |sigma: f64| s_end * (sigma.powi(gaps as i32) - 1.0) / (sigma - 1.0);
    let (mut lo, mut hi) = (1.0 + 1e-12, 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sum(mid) < total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sigma = 0.5 * (lo + hi);
    let mut pts = Vec::with_capacity(m);
    let mut x = 1.0f64;
    let mut s = s_end;
    pts.push(1.0);
    for _ in 0..gaps {
        x -= s;
        s *= sigma;
        pts.push(x);
    }
    pts.reverse();
    g.extend_from_slice(&pts);
    debug_assert!(g.windows(2).all(|w| w[0] < w[1]), "grid not increasing");
    g
}

/// Nodes (i/n)^gamma on [0, 1], i = 0..=n. `gamma > 1` grades toward 0,
/// which restores O(h^2) convergence of the finite-volume pencils when
/// eigenfunctions behave like a fractional power at the origin.
pub fn graded_nodes(n: usize, gamma: f64) -> Vec<f64> {
    (0..=n).map(|i| (i as f64 / n as f64).powf(gamma)).collect()
}

/// n+1 equally spaced nodes on [a, b].
pub fn uniform_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| a + (b - a) * i as f64 / n as f64)
        .collect()
}
