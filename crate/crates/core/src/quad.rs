//! Quadrature: composite 16-point Gauss-Legendre panels, geometric panel
//! layouts for power-law integrands, and Simpson's rule on nonuniform grids.

/// 16-point Gauss-Legendre abscissae on [-1, 1] (positive half).
const GL_X: [f64; 8] = [
    0.095_012_509_837_637_440_185,
    0.281_603_550_779_258_913_230,
    0.458_016_777_657_227_386_342,
    0.617_876_244_402_643_748_447,
    0.755_404_408_355_003_033_895,
    0.865_631_202_387_831_743_880,
    0.944_575_023_073_232_576_078,
    0.989_400_934_991_649_932_596,
];
const GL_W: [f64; 8] = [
    0.189_450_610_455_068_496_285,
    0.182_603_415_044_923_588_867,
    0.169_156_519_395_002_538_189,
    0.149_595_988_816_576_732_081,
    0.124_628_971_255_533_872_052,
    0.095_158_511_682_492_784_810,
    0.062_253_523_938_647_892_863,
    0.027_152_459_411_754_094_852,
];

/// ∫_a^b f by a single 16-point Gauss-Legendre rule.
pub fn gauss16(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for i in 0..8 {
        s += GL_W[i] * (f(c + h * GL_X[i]) + f(c - h * GL_X[i]));
    }
    s * h
}

/// Composite Gauss over the panels defined by consecutive breakpoints.
pub fn gauss_panels(f: &dyn Fn(f64) -> f64, breaks: &[f64]) -> f64 {
    breaks.windows(2).map(|w| gauss16(f, w[0], w[1])).sum()
}

/// Breakpoints halving geometrically from `b` down to (roughly) `floor`,
/// returned in increasing order. Resolves integrable power-law behavior
/// at the left endpoint; the interval [0, floor] is dropped by the caller.
pub fn dyadic_breaks(floor: f64, b: f64) -> Vec<f64> {
    assert!(floor > 0.0 && floor < b);
    let mut v = vec![b];
    let mut x = b;
    while x > floor {
        x *= 0.5;
        v.push(x);
    }
    v.reverse();
    v
}

/// ∫_0^b f for integrands with an integrable power-law singularity at 0:
/// dyadic panels down to `floor·b`, the remainder below is neglected.
pub fn integrate_graded(f: &dyn Fn(f64) -> f64, b: f64, floor: f64) -> f64 {
    gauss_panels(f, &dyadic_breaks(floor * b, b))
}

/// ∫_0^r_max f for integrands smooth on (0, ∞) with power decay:
/// graded panels below the unit scale `scale`, doubling panels above it.
pub fn integrate_semiline(f: &dyn Fn(f64) -> f64, scale: f64, r_max: f64, floor: f64) -> f64 {
    let mut breaks = dyadic_breaks(floor * scale, scale);
    let mut x = scale;
    while x < r_max {
        x = (2.0 * x).min(r_max);
        breaks.push(x);
    }
    gauss_panels(f, &breaks)
}

/// Composite Simpson on a (possibly nonuniform) grid of sampled values.
/// Pairs of intervals use the three-point quadratic rule; an odd leftover
/// interval is handled with the trapezoid rule.
pub fn simpson_nonuniform(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    assert!(n >= 2);
    let mut s = 0.0;
    let mut i = 0;
    while i + 2 < n {
        let (h0, h1) = (xs[i + 1] - xs[i], xs[i + 2] - xs[i + 1]);
        let (f0, f1, f2) = (ys[i], ys[i + 1], ys[i + 2]);
        // exact for quadratics on unequal intervals
        let ht = h0 + h1;
        s += ht / 6.0
            * ((2.0 - h1 / h0) * f0 + ht * ht / (h0 * h1) * f1 + (2.0 - h0 / h1) * f2);
        i += 2;
    }
    if i + 1 < n {
        s += 0.5 * (xs[i + 1] - xs[i]) * (ys[i] + ys[i + 1]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_exact_for_high_degree_polynomials() {
        // 16-point rule is exact through degree 31
        let f = |x: f64| x.powi(20) - 3.0 * x.powi(7) + 2.0;
        let exact = (2.0_f64.powi(21) - 1.0) / 21.0 - 3.0 / 8.0 * (2.0_f64.powi(8) - 1.0) + 2.0;
        assert_abs_diff_eq!(gauss16(&f, 1.0, 2.0), exact, epsilon = 1e-9);
    }

    #[test]
    fn graded_handles_power_singularity() {
        // ∫_0^1 x^(-0.9) dx = 10
        let v = integrate_graded(&|x: f64| x.powf(-0.9), 1.0, 1e-250);
        assert_abs_diff_eq!(v, 10.0, epsilon = 1e-8);
        // ∫_0^1 x^(-0.5) dx = 2
        let v = integrate_graded(&|x: f64| x.powf(-0.5), 1.0, 1e-250);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn semiline_decaying_integrand() {
        // ∫_0^∞ r^2/(1+r^2)^3 dr = pi/16
        let f = |r: f64| r * r / (1.0 + r * r).powi(3);
        let v = integrate_semiline(&f, 1.0, 1e7, 1e-30);
        assert_abs_diff_eq!(v, std::f64::consts::PI / 16.0, epsilon = 1e-12);
    }

    #[test]
    fn simpson_nonuniform_converges() {
        let xs: Vec<f64> = (0..201).map(|i| (i as f64 / 200.0).powi(2)).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| (3.0 * x).sin()).collect();
        let exact = (1.0 - (3.0f64).cos()) / 3.0;
        assert_abs_diff_eq!(simpson_nonuniform(&xs, &ys), exact, epsilon = 1e-8);
    }
}
