//! Finite-difference weights on arbitrary node sets (Fornberg's recurrence).

/// Weights for approximating derivatives of order 0..=m at `x0` from samples
/// at `nodes`. Returns `w` with `w[k][i]` the weight of `nodes[i]` in the
/// k-th derivative. Nodes must be distinct; accuracy is the usual
/// order-(n - k) polynomial exactness.
pub fn fd_weights(x0: f64, nodes: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    assert!(n > m, "need more nodes than the derivative order");
    let mut w = vec![vec![0.0f64; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    w[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    w[k][i] = c1 * (k as f64 * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                w[k][j] = (c4 * w[k][j] - k as f64 * w[k - 1][j]) / c3;
            }
            w[0][j] = c4 * w[0][j] / c3;
        }
        c1 = c2;
    }
    w
}

/// Derivative of a closed-form function by a symmetric (2·reach + 1)-point
/// stencil of spacing `h` centered at `x`.
pub fn derivative(f: impl Fn(f64) -> f64, x: f64, order: usize, h: f64, reach: usize) -> f64 {
    let nodes: Vec<f64> = (0..=2 * reach)
        .map(|i| x + (i as f64 - reach as f64) * h)
        .collect();
    let w = fd_weights(x, &nodes, order);
    nodes
        .iter()
        .zip(&w[order])
        .map(|(&xi, &wi)| wi * f(xi))
        .sum()
}

/// First derivative of sampled data at index `i` using a stencil of
/// `width` nearest nodes (clipped at the ends of the grid).
pub fn sampled_derivative(xs: &[f64], ys: &[f64], i: usize, width: usize) -> f64 {
    let n = xs.len();
    let width = width.min(n);
    let lo = i.saturating_sub(width / 2).min(n - width);
    let w = fd_weights(xs[i], &xs[lo..lo + width], 1);
    ys[lo..lo + width]
        .iter()
        .zip(&w[1])
        .map(|(&y, &wi)| wi * y)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn uniform_five_point_weights() {
        let nodes = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let w = fd_weights(0.0, &nodes, 2);
        let d1 = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        let d2 = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
        for i in 0..5 {
            assert_abs_diff_eq!(w[1][i], d1[i], epsilon = 1e-14);
            assert_abs_diff_eq!(w[2][i], d2[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn derivative_of_exp() {
        let d1 = derivative(f64::exp, 0.3, 1, 1e-2, 4);
        let d2 = derivative(f64::exp, 0.3, 2, 1e-2, 4);
        let e = (0.3f64).exp();
        assert_abs_diff_eq!(d1, e, epsilon = 1e-12);
        assert_abs_diff_eq!(d2, e, epsilon = 1e-10);
    }

    #[test]
    fn nonuniform_nodes_differentiate_polynomials_exactly() {
        // degree-4 polynomial, 5 scattered nodes: weights must be exact
        let nodes = [0.1, 0.13, 0.2, 0.34, 0.5];
        let p = |x: f64| 2.0 + x - 3.0 * x.powi(2) + 0.5 * x.powi(4);
        let dp = |x: f64| 1.0 - 6.0 * x + 2.0 * x.powi(3);
        let x0 = 0.2;
        let w = fd_weights(x0, &nodes, 1);
        let approx_d: f64 = nodes.iter().zip(&w[1]).map(|(&x, &wi)| wi * p(x)).sum();
        assert_abs_diff_eq!(approx_d, dp(x0), epsilon = 1e-11);
    }

    #[test]
    fn sampled_first_derivative() {
        let xs: Vec<f64> = (0..50).map(|i| (i as f64 / 49.0).powi(2) + 0.01).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| x.sin()).collect();
        for &i in &[0usize, 10, 25, 49] {
            let d = sampled_derivative(&xs, &ys, i, 7);
            assert_abs_diff_eq!(d, xs[i].cos(), epsilon = 1e-7);
        }
    }
}
