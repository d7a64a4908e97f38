//! Adaptive Dormand–Prince 5(4) integration for small fixed-size systems.
//!
//! The solvers in this crate integrate second-order ODEs rewritten as
//! two-component first-order systems, always forward in the independent
//! variable. A per-step callback observes accepted steps, which is how the
//! shooting routines count sign changes and rescale growing solutions.

use crate::error::{Error, Result};

/// Dormand-Prince 5(4) coefficients.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// 5th-order weights (row 7 of A; FSAL).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Embedded 4th-order weights.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One accepted step, reported to the observer callback.
#[derive(Clone, Copy, Debug)]
pub struct Step<const D: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; D],
    pub y1: [f64; D],
}

/// Observer verdict after an accepted step.
pub enum Control {
    Continue,
    /// Multiply the state by the given factor before continuing. Only valid
    /// for systems linear in the state (the scaled function still solves the
    /// ODE); used to keep exponentially growing shooting solutions in range.
    Scale(f64),
    Stop,
}

#[derive(Clone, Copy, Debug)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 {
            rtol: 1e-12,
            atol: 1e-14,
            max_step: f64::INFINITY,
            max_steps: 50_000_000,
        }
    }
}

impl Dopri5 {
    pub fn with_tol(rtol: f64, atol: f64) -> Self {
        Dopri5 {
            rtol,
            atol,
            ..Default::default()
        }
    }

    /// Integrate y' = f(t, y) from (t0, y0) to t_end (t_end > t0), reporting
    /// each accepted step. Returns the final state (t, y); `t` equals `t_end`
    /// unless the observer stopped early.
    pub fn integrate<const D: usize>(
        &self,
        f: &dyn Fn(f64, &[f64; D]) -> [f64; D],
        t0: f64,
        y0: [f64; D],
        t_end: f64,
        observer: &mut dyn FnMut(&Step<D>) -> Control,
    ) -> Result<(f64, [f64; D])> {
        if !(t_end > t0) {
            return Err(Error::InvalidParameter(format!(
                "integration range is empty: [{t0}, {t_end}]"
            )));
        }
        let span = t_end - t0;
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = (1e-3 * span).min(self.max_step);
        let hmin_rel = 1e-14;

        for _ in 0..self.max_steps {
            if t >= t_end {
                return Ok((t, y));
            }
            h = h.min(self.max_step).min(t_end - t);
            if h <= hmin_rel * t.abs().max(1e-3) {
                // final sliver: the state is converged at this resolution
                if t_end - t <= 1e-12 * t_end.abs().max(1.0) {
                    return Ok((t_end, y));
                }
                return Err(Error::StepSizeUnderflow { t, h });
            }

            let mut k = [[0.0f64; D]; 7];
            k[0] = k1;
            for s in 1..6 {
                let mut ys = y;
                for d in 0..D {
                    let mut acc = 0.0;
                    for j in 0..s {
                        acc += A[s - 1][j] * k[j][d];
                    }
                    ys[d] += h * acc;
                }
                k[s] = f(t + C[s] * h, &ys);
            }
            let mut y5 = y;
            for d in 0..D {
                let mut acc = 0.0;
                for j in 0..6 {
                    acc += B5[j] * k[j][d];
                }
                y5[d] += h * acc;
            }
            // FSAL stage doubles as the error stage
            k[6] = f(t + h, &y5);

            let mut err = 0.0f64;
            for d in 0..D {
                let mut e = 0.0;
                for j in 0..7 {
                    e += (B5[j] - B4[j]) * k[j][d];
                }
                e *= h;
                let sc = self.atol + self.rtol * y[d].abs().max(y5[d].abs());
                err += (e / sc) * (e / sc);
            }
            err = (err / D as f64).sqrt();

            if err <= 1.0 {
                let step = Step {
                    t0: t,
                    t1: t + h,
                    y0: y,
                    y1: y5,
                };
                t += h;
                y = y5;
                k1 = k[6];
                match observer(&step) {
                    Control::Continue => {}
                    Control::Scale(s) => {
                        for d in 0..D {
                            y[d] *= s;
                            k1[d] *= s;
                        }
                    }
                    Control::Stop => return Ok((t, y)),
                }
                let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 10.0);
                h *= fac;
            } else {
                let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                h *= fac;
            }
        }
        Err(Error::StepSizeUnderflow { t, h })
    }

    /// Integrate without observation.
    pub fn run<const D: usize>(
        &self,
        f: &dyn Fn(f64, &[f64; D]) -> [f64; D],
        t0: f64,
        y0: [f64; D],
        t_end: f64,
    ) -> Result<(f64, [f64; D])> {
        self.integrate(f, t0, y0, t_end, &mut |_| Control::Continue)
    }
}

/// Locate a root of component `comp` by bisection inside an accepted step
/// that brackets a sign change, re-integrating from the step start at each
/// probe. Requires y0[comp] and y1[comp] of opposite (nonzero-able) sign.
pub fn refine_root<const D: usize>(
    solver: &Dopri5,
    f: &dyn Fn(f64, &[f64; D]) -> [f64; D],
    step: &Step<D>,
    comp: usize,
) -> Result<f64> {
    let mut lo = step.t0;
    let mut hi = step.t1;
    let pos = step.y0[comp] > 0.0;
    let tight = Dopri5 {
        rtol: solver.rtol.min(1e-12),
        atol: solver.atol.min(1e-14),
        ..*solver
    };
    for _ in 0..80 {
        if hi - lo <= 1e-13 * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (_, ym) = tight.run(f, step.t0, step.y0, mid)?;
        if (ym[comp] > 0.0) == pos {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
