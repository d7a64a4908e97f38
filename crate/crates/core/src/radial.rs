//! Positive radial solutions of the Lane-Emden problem in the unit ball and
//! their linearization potential.
//!
//! The solver integrates the radial ODE u'' + (N-1)/r u' + u^p = 0 once from
//! u(0) = 1, locates the first zero R, and rescales: u(r) = R^{2/(p-1)} v(Rr)
//! solves the same equation with first zero at r = 1 and peak
//! M_p = R^{2/(p-1)}. Uniqueness of the positive radial solution is assumed,
//! so no shooting in the initial value is needed.

use crate::error::{Error, Result};
use crate::fd;
use crate::grid::clustered_grid;
use crate::ode::{refine_root, Control, Dopri5, Step};
use serde::{Deserialize, Serialize};

/// Radius at which integration starts from the regular power series; the
/// ODE has a removable singularity at r = 0.
pub const DEFAULT_R_START: f64 = 1e-6;
/// Integration is abandoned if no zero appears before this radius.
pub const DEFAULT_R_MAX: f64 = 1e6;
/// Default size of the resampling grid (clustered toward 0 and 1).
pub const DEFAULT_GRID_SIZE: usize = 4096;

/// Relative/absolute tolerance pair for the adaptive integrator.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-12,
            atol: 1e-14,
        }
    }
}

impl StepControl {
    fn solver(&self) -> Dopri5 {
        Dopri5::with_tol(self.rtol, self.atol)
    }
}

/// Raw trajectory of the radial initial value problem (accepted steps).
#[derive(Clone, Debug)]
pub struct RadialTrajectory {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
    /// Location of the first sign change, when one occurred before r_max.
    pub first_zero: Option<f64>,
}

/// Odd power-law extension s ↦ |s|^{p-1} s, so that integration remains
/// well defined while bracketing the first zero.
fn power(u: f64, p: f64) -> f64 {
    u.abs().powf(p - 1.0) * u
}

fn lane_emden_rhs(n_dim: u32, p: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    let nm1 = (n_dim - 1) as f64;
    move |r: f64, y: &[f64; 2]| [y[1], -nm1 / r * y[1] - power(y[0], p)]
}

/// Series start for u(0) = u0: u = u0 - u0^p r²/(2N) + p u0^{2p-1} r⁴/(8N(N+2)).
fn series_state(n_dim: u32, p: f64, u0: f64, r: f64) -> [f64; 2] {
    let n = n_dim as f64;
    let c2 = -u0.powf(p) / (2.0 * n);
    let c4 = p * u0.powf(2.0 * p - 1.0) / (8.0 * n * (n + 2.0));
    [
        u0 + c2 * r * r + c4 * r.powi(4),
        2.0 * c2 * r + 4.0 * c4 * r.powi(3),
    ]
}

/// Integrate the radial Lane-Emden IVP from u(0) = u0 up to `r_max` or the
/// first sign change of u, whichever comes first.
pub fn integrate_radial(
    n_dim: u32,
    p: f64,
    u0: f64,
    r_max: f64,
    ctrl: StepControl,
) -> Result<RadialTrajectory> {
    if n_dim < 3 {
        return Err(Error::InvalidParameter(format!("N = {n_dim} < 3")));
    }
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must exceed 1")));
    }
    if u0 < 0.0 {
        return Err(Error::InvalidParameter(format!("u0 = {u0} is negative")));
    }
    if !(r_max > DEFAULT_R_START) {
        return Err(Error::InvalidParameter(format!("r_max = {r_max} too small")));
    }

    let f = lane_emden_rhs(n_dim, p);
    let solver = ctrl.solver();
    let y0 = series_state(n_dim, p, u0, DEFAULT_R_START);

    let mut radii = vec![DEFAULT_R_START];
    let mut values = vec![y0[0]];
    let mut derivatives = vec![y0[1]];
    let mut bracket: Option<Step<2>> = None;

    solver.integrate(&f, DEFAULT_R_START, y0, r_max, &mut |s: &Step<2>| {
        if s.y0[0] > 0.0 && s.y1[0] <= 0.0 {
            bracket = Some(*s);
            return Control::Stop;
        }
        radii.push(s.t1);
        values.push(s.y1[0]);
        derivatives.push(s.y1[1]);
        Control::Continue
    })?;

    let first_zero = match bracket {
        None => None,
        Some(step) => {
            let root = refine_root(&solver, &f, &step, 0)?;
            let (_, y) = solver.solver_tight().run(&f, step.t0, step.y0, root)?;
            radii.push(root);
            values.push(y[0]);
            derivatives.push(y[1]);
            Some(root)
        }
    };

    Ok(RadialTrajectory {
        radii,
        values,
        derivatives,
        first_zero,
    })
}

trait TightExt {
    fn solver_tight(&self) -> Dopri5;
}
impl TightExt for Dopri5 {
    fn solver_tight(&self) -> Dopri5 {
        Dopri5 {
            rtol: self.rtol.min(1e-12),
            atol: self.atol.min(1e-14),
            ..*self
        }
    }
}

/// The positive radial Lane-Emden solution on (0, 1] with u(1) = 0.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadialSolution {
    pub n_dim: u32,
    pub exponent: f64,
    /// Strictly increasing radii in (0, 1], last exactly 1.
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// Peak value M_p = u(0+).
    pub peak: f64,
    /// First zero R of the unit-peak run (rescaling factor: M_p = R^{2/(p-1)}).
    pub first_zero: f64,
    pub tol: f64,
    pub step_control: StepControl,
}

/// Options for [`solve_lane_emden_with`].
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub grid_size: usize,
    pub r_start: f64,
    pub r_max: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            grid_size: DEFAULT_GRID_SIZE,
            r_start: DEFAULT_R_START,
            r_max: DEFAULT_R_MAX,
        }
    }
}

/// Solve the Lane-Emden problem with first zero pinned at r = 1.
pub fn solve_lane_emden(n_dim: u32, p: f64, tol: f64) -> Result<RadialSolution> {
    solve_lane_emden_with(n_dim, p, tol, &SolveOptions::default())
}

pub fn solve_lane_emden_with(
    n_dim: u32,
    p: f64,
    tol: f64,
    opts: &SolveOptions,
) -> Result<RadialSolution> {
    if n_dim < 3 {
        return Err(Error::InvalidParameter(format!("N = {n_dim} < 3")));
    }
    let p_s = crate::critical_exponent(n_dim);
    if !(p > 1.0 && p < p_s) {
        return Err(Error::InvalidParameter(format!(
            "p = {p} outside the subcritical range (1, {p_s})"
        )));
    }
    let ctrl = StepControl {
        rtol: (tol * 1e-2).clamp(1e-13, 1e-8),
        atol: (tol * 1e-4).clamp(1e-15, 1e-10),
    };

    let traj = integrate_radial(n_dim, p, 1.0, opts.r_max, ctrl)?;
    let big_r = traj.first_zero.ok_or(Error::NoFirstZero { r_max: opts.r_max })?;
    let peak = big_r.powf(2.0 / (p - 1.0));

    // Resample v onto the clustered grid of (0, 1] by re-integrating with
    // forced stops at s_i = R r_i; no interpolation error enters the samples.
    let grid = clustered_grid(opts.r_start, opts.grid_size);
    let f = lane_emden_rhs(n_dim, p);
    let solver = ctrl.solver();
    let mut u = Vec::with_capacity(grid.len());
    let mut du = Vec::with_capacity(grid.len());

    let s0 = big_r * grid[0];
    let mut state = series_state(n_dim, p, 1.0, s0);
    let mut t = s0;
    u.push(peak * state[0]);
    du.push(peak * big_r * state[1]);
    for &r in &grid[1..] {
        let target = big_r * r;
        let (t1, y1) = solver.run(&f, t, state, target)?;
        t = t1;
        state = y1;
        u.push(peak * state[0]);
        du.push(peak * big_r * state[1]);
    }

    Ok(RadialSolution {
        n_dim,
        exponent: p,
        grid,
        u,
        du,
        peak,
        first_zero: big_r,
        tol,
        step_control: ctrl,
    })
}

impl RadialSolution {
    /// u(r) for any r in [0, 1]: power series below the grid, cubic Hermite
    /// interpolation of the (u, du) samples elsewhere.
    pub fn eval_u(&self, r: f64) -> f64 {
        if r <= self.grid[0] {
            return self.peak * series_state(self.n_dim, self.exponent, 1.0, self.first_zero * r)[0];
        }
        if r >= 1.0 {
            return *self.u.last().unwrap();
        }
        let (i, t, h) = self.locate(r);
        let (h00, h10, h01, h11) = hermite_basis(t);
        h00 * self.u[i] + h10 * h * self.du[i] + h01 * self.u[i + 1] + h11 * h * self.du[i + 1]
    }

    /// u'(r), same interpolation scheme.
    pub fn eval_du(&self, r: f64) -> f64 {
        if r <= self.grid[0] {
            return self.peak
                * self.first_zero
                * series_state(self.n_dim, self.exponent, 1.0, self.first_zero * r)[1];
        }
        if r >= 1.0 {
            return *self.du.last().unwrap();
        }
        let (i, t, h) = self.locate(r);
        let d00 = (6.0 * t * t - 6.0 * t) / h;
        let d10 = 3.0 * t * t - 4.0 * t + 1.0;
        let d01 = (6.0 * t - 6.0 * t * t) / h;
        let d11 = 3.0 * t * t - 2.0 * t;
        d00 * self.u[i] + d10 * self.du[i] + d01 * self.u[i + 1] + d11 * self.du[i + 1]
    }

    fn locate(&self, r: f64) -> (usize, f64, f64) {
        let i = match self
            .grid
            .binary_search_by(|x| x.partial_cmp(&r).unwrap())
        {
            Ok(i) => i.min(self.grid.len() - 2),
            Err(i) => i - 1,
        };
        let h = self.grid[i + 1] - self.grid[i];
        ((i), (r - self.grid[i]) / h, h)
    }

    /// Sup-norm of the ODE residual u'' + (N-1)/r u' + u^p over the grid,
    /// with u'' recovered from the du samples by 7-point finite differences.
    /// Independent of how the samples were produced.
    pub fn residual_sup(&self) -> f64 {
        let n = self.grid.len();
        let nm1 = (self.n_dim - 1) as f64;
        let mut sup: f64 = 0.0;
        for i in 0..n {
            let upp = fd::sampled_derivative(&self.grid, &self.du, i, 7);
            let res = upp + nm1 / self.grid[i] * self.du[i] + power(self.u[i], self.exponent);
            sup = sup.max(res.abs());
        }
        sup
    }

    /// CSV with columns (r, u, du, a), a = p u^{p-1}.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,u,du,a\n");
        let p = self.exponent;
        for i in 0..self.grid.len() {
            let a = p * self.u[i].max(0.0).powf(p - 1.0);
            s.push_str(&format!("{},{},{},{}\n", self.grid[i], self.u[i], self.du[i], a));
        }
        s
    }

    /// JSON header describing the run.
    pub fn header_json(&self) -> serde_json::Value {
        serde_json::json!({
            "N": self.n_dim,
            "p": self.exponent,
            "M_p": self.peak,
            "first_zero_unit_run": self.first_zero,
            "grid_size": self.grid.len(),
            "tolerances": { "tol": self.tol, "rtol": self.step_control.rtol, "atol": self.step_control.atol },
        })
    }

    /// The linearization potential a(r) = p u(r)^{p-1}.
    pub fn linearization(&self) -> LinearizedPotential {
        linearized_potential(self.clone())
    }
}

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

/// A bounded radial potential a(r) on (0, 1], as seen by the eigensolvers.
pub trait RadialPotential {
    fn eval(&self, r: f64) -> f64;
    /// Sup norm over (0, 1].
    fn sup_norm(&self) -> f64;
    /// Limit value a(0+), used by the series starts at the singular end.
    fn at_origin(&self) -> f64;
}

/// Linearization potential of a Lane-Emden solution: a(r) = p u(r)^{p-1},
/// nonincreasing, with sup norm p M_p^{p-1} attained at the origin.
#[derive(Clone, Debug)]
pub struct LinearizedPotential {
    pub solution: RadialSolution,
    /// Samples a_i on the solution grid.
    pub values: Vec<f64>,
    /// p M_p^{p-1}.
    pub sup: f64,
}

/// Build the linearization potential of a radial solution.
pub fn linearized_potential(solution: RadialSolution) -> LinearizedPotential {
    let p = solution.exponent;
    let values = solution
        .u
        .iter()
        .map(|&u| p * u.max(0.0).powf(p - 1.0))
        .collect();
    let sup = p * solution.peak.powf(p - 1.0);
    LinearizedPotential {
        solution,
        values,
        sup,
    }
}

impl LinearizedPotential {
    pub fn exponent(&self) -> f64 {
        self.solution.exponent
    }
    pub fn grid(&self) -> &[f64] {
        &self.solution.grid
    }
}

impl RadialPotential for LinearizedPotential {
    fn eval(&self, r: f64) -> f64 {
        let p = self.solution.exponent;
        p * self.solution.eval_u(r).max(0.0).powf(p - 1.0)
    }
    fn sup_norm(&self) -> f64 {
        self.sup
    }
    fn at_origin(&self) -> f64 {
        self.sup
    }
}

/// Constant potential, mainly for experiments and cross-checks.
#[derive(Clone, Copy, Debug)]
pub struct ConstantPotential(pub f64);

impl RadialPotential for ConstantPotential {
    fn eval(&self, _r: f64) -> f64 {
        self.0
    }
    fn sup_norm(&self) -> f64 {
        self.0.abs()
    }
    fn at_origin(&self) -> f64 {
        self.0
    }
}
