//! Negative singular radial eigenvalues of the linearized operator, the
//! standard (nonsingular) radial eigenvalues with an angular shift, and the
//! Hardy quotient.
//!
//! The singular problem on (0, 1), written in Sturm-Liouville form
//!
//! ```text
//! -(r^{N-1} ψ')' - r^{N-1} a(r) ψ = Λ r^{N-3} ψ,   ψ(1) = 0,
//! ```
//!
//! is solved by shooting from the origin along the admissible Frobenius
//! branch ψ ~ r^{β₊}, β₊ the positive root of β² + (N-2)β + Λ = 0. Only this
//! branch has finite Hardy energy, so it is the one selected. Eigenvalues
//! are ordered by oscillation: the shooting solution at parameter Λ has
//! exactly #{k : Λ_k < Λ} interior zeros, and each eigenvalue is pinned by
//! bisection on that count.

use crate::error::{Error, Result};
use crate::grid;
use crate::ode::{Control, Dopri5, Step};
use crate::quad::gauss16;
use crate::radial::{LinearizedPotential, RadialPotential};
use crate::sl::{assemble_pencil, Endpoint};
use serde::{Deserialize, Serialize};

pub use crate::radial::ConstantPotential;

/// Start of the shooting integrations; matches the radial solver grid.
const R_START: f64 = 1e-6;
/// Magnitude at which a growing shooting solution is rescaled.
const RESCALE_AT: f64 = 1e100;
/// Default bisection tolerance in the eigenvalue.
pub const DEFAULT_EIG_TOL: f64 = 1e-9;
/// Safety margin on the lower search bound -(N-1).
const FLOOR_MARGIN: f64 = 0.5;

/// Endpoint data of the singular equation at r = 0.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IndicialData {
    pub lambda_hat: f64,
    /// Positive-branch Frobenius exponent β₊ = (-(N-2) + √((N-2)² - 4Λ))/2.
    pub beta_plus: f64,
}

/// Admissible Frobenius exponent at the origin. Requires Λ < (N-2)²/4
/// (Hardy-admissible range); the discriminant would otherwise vanish.
pub fn indicial_exponent(n_dim: u32, lambda_hat: f64) -> Result<IndicialData> {
    if n_dim < 3 {
        return Err(Error::InvalidParameter(format!("N = {n_dim} < 3")));
    }
    let nm2 = (n_dim - 2) as f64;
    let disc = nm2 * nm2 - 4.0 * lambda_hat;
    if disc <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "lambda_hat = {lambda_hat} is outside the admissible range (< (N-2)^2/4)"
        )));
    }
    Ok(IndicialData {
        lambda_hat,
        beta_plus: 0.5 * (-nm2 + disc.sqrt()),
    })
}

/// Outcome of one shooting integration.
#[derive(Clone, Copy, Debug)]
pub struct Shot {
    /// ψ(1) up to an irrelevant positive normalization.
    pub endpoint: f64,
    /// Sign changes of ψ on (r_start, 1).
    pub zeros: usize,
}

/// Radial equation ψ'' + (N-1)/r ψ' + (a(r) + c2/r² + c0) ψ = 0.
/// c2 = Λ̂ gives the singular problem, (c2, c0) = (-λ, Λ) the standard one.
struct RadialShoot<'a, P: RadialPotential> {
    n_dim: u32,
    a: &'a P,
    c2: f64,
    c0: f64,
}

impl<'a, P: RadialPotential> RadialShoot<'a, P> {
    fn beta(&self) -> Result<f64> {
        Ok(indicial_exponent(self.n_dim, self.c2)?.beta_plus)
    }

    /// Initial state at r0 from the two-term Frobenius series,
    /// normalized to ψ(r0) = 1.
    fn initial(&self, r0: f64) -> Result<[f64; 2]> {
        let beta = self.beta()?;
        let n = self.n_dim as f64;
        let q0 = self.a.at_origin() + self.c0;
        let d = 4.0 * beta + 2.0 * n;
        let corr = 1.0 - q0 * r0 * r0 / d;
        // logarithmic derivative of r^β (1 - q0 r²/d)
        let logd = beta / r0 - 2.0 * q0 * r0 / (d * corr);
        Ok([1.0, logd])
    }

    fn rhs(&self) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
        let nm1 = (self.n_dim - 1) as f64;
        move |r: f64, y: &[f64; 2]| {
            let coeff = self.a.eval(r) + self.c2 / (r * r) + self.c0;
            [y[1], -nm1 / r * y[1] - coeff * y[0]]
        }
    }

    /// Integrate to r = 1, counting sign changes; rescales when the linear
    /// solution grows past the overflow guard (sign pattern preserved).
    fn shoot(&self, ctrl: &Dopri5) -> Result<Shot> {
        let r0 = R_START;
        let y0 = self.initial(r0)?;
        let f = self.rhs();
        let mut zeros = 0usize;
        let mut sign = 1.0f64; // ψ(r0) = 1
        let solver = Dopri5 {
            max_step: (1.0 - r0) / 256.0,
            ..*ctrl
        };
        let (_, y) = solver.integrate(&f, r0, y0, 1.0, &mut |s: &Step<2>| {
            let v = s.y1[0];
            if v != 0.0 && v.signum() != sign {
                zeros += 1;
                sign = v.signum();
            }
            let mag = s.y1[0].abs().max(s.y1[1].abs());
            if mag > RESCALE_AT {
                Control::Scale(1.0 / mag)
            } else {
                Control::Continue
            }
        })?;
        Ok(Shot {
            endpoint: y[0],
            zeros,
        })
    }

    /// Re-run at a fixed parameter collecting ψ, ψ' at the given radii
    /// (first radius must be >= r_start). Normalized to max |ψ| = 1.
    fn sample(&self, radii: &[f64], ctrl: &Dopri5) -> Result<(Vec<f64>, Vec<f64>)> {
        let r0 = radii[0].max(R_START);
        let mut state = self.initial(r0)?;
        let mut t = r0;
        let f = self.rhs();
        let mut psi = Vec::with_capacity(radii.len());
        let mut dpsi = Vec::with_capacity(radii.len());
        psi.push(state[0]);
        dpsi.push(state[1]);
        let mut scale_log = 0.0f64;
        let mut scales = vec![0.0f64];
        for &r in &radii[1..] {
            if r > t {
                let (t1, y1) = ctrl.run(&f, t, state, r)?;
                t = t1;
                state = y1;
                let mag = state[0].abs().max(state[1].abs());
                if mag > RESCALE_AT {
                    state[0] /= mag;
                    state[1] /= mag;
                    scale_log += mag.ln();
                }
            }
            psi.push(state[0]);
            dpsi.push(state[1]);
            scales.push(scale_log);
        }
        // undo the running rescales relative to the final one, then
        // normalize the peak
        let max_log = scale_log;
        for i in 0..psi.len() {
            let f = (scales[i] - max_log).exp();
            psi[i] *= f;
            dpsi[i] *= f;
        }
        let peak = psi.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        if peak > 0.0 {
            for i in 0..psi.len() {
                psi[i] /= peak;
                dpsi[i] /= peak;
            }
        }
        Ok((psi, dpsi))
    }
}

/// ψ(1) and oscillation count for the singular problem at Λ̂.
pub fn shoot_singular<P: RadialPotential>(n_dim: u32, a: &P, lambda_hat: f64) -> Result<Shot> {
    let sh = RadialShoot {
        n_dim,
        a,
        c2: lambda_hat,
        c0: 0.0,
    };
    sh.shoot(&Dopri5::with_tol(1e-11, 1e-13))
}

/// Samples (ψ, ψ') of the singular shooting solution at parameter Λ̂ on the
/// given radii, max-normalized. Λ̂ need not be an eigenvalue.
pub fn sample_singular_solution<P: RadialPotential>(
    n_dim: u32,
    a: &P,
    lambda_hat: f64,
    radii: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let sh = RadialShoot {
        n_dim,
        a,
        c2: lambda_hat,
        c0: 0.0,
    };
    sh.sample(radii, &Dopri5::with_tol(1e-11, 1e-13))
}

/// One eigenpair of the singular problem.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SingularEigenvalue {
    /// 1-based index.
    pub k: usize,
    pub value: f64,
    /// Interior zeros of the eigenfunction (= k - 1).
    pub zeros: usize,
    /// Samples of ψ on the grid, max-normalized.
    #[serde(skip)]
    pub psi: Vec<f64>,
    #[serde(skip)]
    pub dpsi: Vec<f64>,
}

/// The negative part of the singular radial spectrum.
#[derive(Clone, Debug)]
pub struct SingularSpectrum {
    pub n_dim: u32,
    /// Lane-Emden exponent of the potential, when it has one.
    pub exponent: Option<f64>,
    pub eigenvalues: Vec<SingularEigenvalue>,
    /// Radii carrying the eigenfunction samples.
    pub grid: Vec<f64>,
    pub tol: f64,
}

impl SingularSpectrum {
    pub fn values(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|e| e.value).collect()
    }

    /// Most negative eigenvalue, if any.
    pub fn first(&self) -> Option<f64> {
        self.eigenvalues.first().map(|e| e.value)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "N": self.n_dim,
            "p": self.exponent,
            "eigenvalues": self.eigenvalues.iter().map(|e| serde_json::json!({
                "k": e.k, "value": e.value, "zeros": e.zeros,
            })).collect::<Vec<_>>(),
            "tolerances": { "eigenvalue_tol": self.tol },
        })
    }
}

/// All negative singular eigenvalues of a Lane-Emden linearization, up to
/// `k_max`, bisected to `tol`. The search window (-(N-1)(1+margin), 0) is
/// justified by the lower bound Λ̂₁ > -(N-1) for linearizations of positive
/// radial solutions; an oscillation at the floor is reported as a distinct
/// error from an empty spectrum.
pub fn negative_singular_eigenvalues(
    n_dim: u32,
    a: &LinearizedPotential,
    k_max: usize,
    tol: f64,
) -> Result<SingularSpectrum> {
    let floor = -((n_dim - 1) as f64) * (1.0 + FLOOR_MARGIN);
    // eigenfunctions sampled on the radial solution grid
    let mut spec = negative_spectrum(n_dim, a, k_max, tol, floor, a.grid().to_vec(), true)?;
    spec.exponent = Some(a.exponent());
    Ok(spec)
}

/// As [`negative_singular_eigenvalues`] for a general bounded potential and
/// an explicit window floor.
pub fn negative_singular_eigenvalues_in<P: RadialPotential>(
    n_dim: u32,
    a: &P,
    k_max: usize,
    tol: f64,
    floor: f64,
) -> Result<SingularSpectrum> {
    let grid = grid::clustered_grid(R_START, 2048);
    negative_spectrum(n_dim, a, k_max, tol, floor, grid, true)
}

/// First singular eigenvalue only, without eigenfunction sampling; `None`
/// when the spectrum has no negative part. This is the cheap evaluation
/// used inside exponent sweeps.
pub fn first_singular_eigenvalue<P: RadialPotential>(
    n_dim: u32,
    a: &P,
    tol: f64,
) -> Result<Option<f64>> {
    let floor = -((n_dim - 1) as f64) * (1.0 + FLOOR_MARGIN);
    let spec = negative_spectrum(n_dim, a, 1, tol, floor, Vec::new(), false)?;
    Ok(spec.first())
}

fn negative_spectrum<P: RadialPotential>(
    n_dim: u32,
    a: &P,
    k_max: usize,
    tol: f64,
    floor: f64,
    grid: Vec<f64>,
    sample_eigenfunctions: bool,
) -> Result<SingularSpectrum> {
    if k_max < 1 {
        return Err(Error::InvalidParameter("k_max must be >= 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let count = |lam: f64| -> Result<usize> { Ok(shoot_singular(n_dim, a, lam)?.zeros) };

    let at_floor = count(floor)?;
    if at_floor > 0 {
        return Err(Error::BelowSearchFloor {
            floor,
            count_at_floor: at_floor,
        });
    }
    let d = count(0.0)?.min(k_max);

    let ctrl = Dopri5::with_tol(1e-11, 1e-13);
    let mut eigenvalues = Vec::with_capacity(d);
    for k in 1..=d {
        let (mut lo, mut hi) = (floor, 0.0f64);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if count(mid)? >= k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let value = 0.5 * (lo + hi);
        let (psi, dpsi) = if sample_eigenfunctions {
            let sh = RadialShoot {
                n_dim,
                a,
                c2: value,
                c0: 0.0,
            };
            sh.sample(&grid, &ctrl)?
        } else {
            (Vec::new(), Vec::new())
        };
        eigenvalues.push(SingularEigenvalue {
            k,
            value,
            zeros: k - 1,
            psi,
            dpsi,
        });
    }
    Ok(SingularSpectrum {
        n_dim,
        exponent: None,
        eigenvalues,
        grid,
        tol,
    })
}

/// Number of negative standard radial eigenvalues with angular shift λ:
/// the oscillation count of the standard shooting solution at Λ = 0.
pub fn standard_negative_count<P: RadialPotential>(n_dim: u32, a: &P, shift: f64) -> Result<usize> {
    if shift < 0.0 {
        return Err(Error::InvalidParameter(format!("shift = {shift} < 0")));
    }
    let sh = RadialShoot {
        n_dim,
        a,
        c2: -shift,
        c0: 0.0,
    };
    Ok(sh.shoot(&Dopri5::with_tol(1e-11, 1e-13))?.zeros)
}

/// Lowest `count` eigenvalues of the standard radial problem
/// -ψ'' - (N-1)/r ψ' + (λ/r²) ψ - a(r) ψ = Λ ψ, ψ(1) = 0, regular branch
/// at the origin.
pub fn standard_radial_eigenvalues<P: RadialPotential>(
    n_dim: u32,
    a: &P,
    shift: f64,
    count: usize,
) -> Result<Vec<f64>> {
    if shift < 0.0 {
        return Err(Error::InvalidParameter(format!("shift = {shift} < 0")));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let ctrl = Dopri5::with_tol(1e-11, 1e-13);
    let zeros_at = |cap: f64| -> Result<usize> {
        let sh = RadialShoot {
            n_dim,
            a,
            c2: -shift,
            c0: cap,
        };
        Ok(sh.shoot(&ctrl)?.zeros)
    };
    // Λ_1 >= -||a||_inf since the shift term is nonnegative
    let lo0 = -a.sup_norm() - 1.0;
    let mut hi0 = 10.0f64.max(-lo0);
    while zeros_at(hi0)? < count {
        hi0 *= 2.0;
        if hi0 > 1e9 {
            return Err(Error::InvalidParameter(
                "standard eigenvalue search exceeded 1e9".into(),
            ));
        }
    }
    let mut out = Vec::with_capacity(count);
    for k in 1..=count {
        let (mut lo, mut hi) = (lo0, hi0);
        for _ in 0..64 {
            if hi - lo <= DEFAULT_EIG_TOL * hi.abs().max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if zeros_at(mid)? >= k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}

/// Dense verification oracle for the singular problem: finite-volume
/// discretization of the Sturm-Liouville form on a graded grid, negative
/// generalized eigenvalues of the pencil. Shares nothing with the shooting
/// path.
pub fn dense_oracle_singular<P: RadialPotential>(
    n_dim: u32,
    a: &P,
    grid_n: usize,
) -> Result<Vec<f64>> {
    let nodes = grid::graded_nodes(grid_n, 2.0);
    let nm1 = (n_dim - 1) as i32;
    let nm3 = (n_dim - 3) as i32;
    let pencil = assemble_pencil(
        &nodes,
        &|r| r.powi(nm1),
        &|r| -r.powi(nm1) * a.eval(r),
        &|r| r.powi(nm3),
        Endpoint::Natural,
        Endpoint::Dirichlet,
    )?;
    Ok(pencil.eigenvalues_below(0.0))
}

/// Dense oracle for the standard problem with angular shift: eigenvalues
/// below `bound`.
pub fn dense_oracle_standard<P: RadialPotential>(
    n_dim: u32,
    a: &P,
    shift: f64,
    grid_n: usize,
    bound: f64,
) -> Result<Vec<f64>> {
    let nodes = grid::graded_nodes(grid_n, 2.0);
    let nm1 = (n_dim - 1) as i32;
    let nm3 = (n_dim - 3) as i32;
    let pencil = assemble_pencil(
        &nodes,
        &|r| r.powi(nm1),
        &|r| r.powi(nm3) * shift - r.powi(nm1) * a.eval(r),
        &|r| r.powi(nm1),
        Endpoint::Natural,
        Endpoint::Dirichlet,
    )?;
    Ok(pencil.eigenvalues_below(bound))
}

/// Largest grid spacing of the dense oracles at size `grid_n` (for the
/// agreement tolerance max(1e-6, 10 h²)).
pub fn oracle_spacing(grid_n: usize) -> f64 {
    1.0 - ((grid_n - 1) as f64 / grid_n as f64).powi(2)
}

/// A sampled radial test function on (0, 1] with its derivative.
#[derive(Clone, Debug)]
pub struct RadialTestFunction {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
}

impl RadialTestFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, derivs: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() != derivs.len() || grid.len() < 2 {
            return Err(Error::InvalidParameter("inconsistent sample lengths".into()));
        }
        if !grid.windows(2).all(|w| w[0] < w[1]) || grid[0] <= 0.0 {
            return Err(Error::InvalidParameter(
                "grid must be strictly increasing in (0, 1]".into(),
            ));
        }
        if (grid.last().unwrap() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("grid must end at r = 1".into()));
        }
        Ok(RadialTestFunction {
            grid,
            values,
            derivs,
        })
    }

    /// Sample a closed-form pair (v, v') on a geometric grid of `n` points
    /// from `r_min` to 1.
    pub fn from_fn(v: impl Fn(f64) -> f64, dv: impl Fn(f64) -> f64, r_min: f64, n: usize) -> Self {
        let ratio = (1.0 / r_min).powf(1.0 / (n - 1) as f64);
        let mut grid: Vec<f64> = (0..n).map(|i| r_min * ratio.powi(i as i32)).collect();
        *grid.last_mut().unwrap() = 1.0;
        let values = grid.iter().map(|&r| v(r)).collect();
        let derivs = grid.iter().map(|&r| dv(r)).collect();
        RadialTestFunction {
            grid,
            values,
            derivs,
        }
    }
}

/// The Hardy quotient (∫ r^{N-1} v'²)/(∫ r^{N-3} v²) of a test function
/// vanishing at r = 1. Bounded below by (N-2)²/4 for every admissible v.
/// Integration: per-interval Gauss on the cubic Hermite interpolant (exact
/// for the interpolant), constant extension below the first grid point.
pub fn hardy_quotient(n_dim: u32, v: &RadialTestFunction) -> Result<f64> {
    if n_dim < 3 {
        return Err(Error::InvalidParameter(format!("N = {n_dim} < 3")));
    }
    let vmax = v.values.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if vmax == 0.0 {
        return Err(Error::DegenerateInput("test function vanishes identically".into()));
    }
    if v.values.last().unwrap().abs() > 1e-8 * vmax {
        return Err(Error::InvalidParameter("test function must vanish at r = 1".into()));
    }
    let nm1 = (n_dim - 1) as i32;
    let nm3 = (n_dim - 3) as i32;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..v.grid.len() - 1 {
        let (x0, x1) = (v.grid[i], v.grid[i + 1]);
        let h = x1 - x0;
        let (f0, f1, d0, d1) = (v.values[i], v.values[i + 1], v.derivs[i], v.derivs[i + 1]);
        let hermite = move |r: f64| {
            let t = (r - x0) / h;
            let t2 = t * t;
            let t3 = t2 * t;
            (2.0 * t3 - 3.0 * t2 + 1.0) * f0
                + (t3 - 2.0 * t2 + t) * h * d0
                + (-2.0 * t3 + 3.0 * t2) * f1
                + (t3 - t2) * h * d1
        };
        let hermite_d = move |r: f64| {
            let t = (r - x0) / h;
            let t2 = t * t;
            ((6.0 * t2 - 6.0 * t) * f0
                + (3.0 * t2 - 4.0 * t + 1.0) * h * d0
                + (6.0 * t - 6.0 * t2) * f1
                + (3.0 * t2 - 2.0 * t) * h * d1)
                / h
        };
        num += gauss16(&|r| r.powi(nm1) * hermite_d(r).powi(2), x0, x1);
        den += gauss16(&|r| r.powi(nm3) * hermite(r).powi(2), x0, x1);
    }
    // constant extension over [0, r_min]
    let g0 = v.grid[0];
    den += v.values[0].powi(2) * g0.powi(nm3 + 1) / (nm3 + 1) as f64;
    if den < 1e-300 {
        return Err(Error::DegenerateInput("zero denominator".into()));
    }
    Ok(num / den)
}

impl SingularSpectrum {
    /// Normalized weak-form defect of the k-th sampled eigenpair against a
    /// smooth test function φ vanishing at r = 1:
    /// |∫ r^{N-1}(ψ'φ' - aψφ) - Λ ∫ r^{N-3} ψφ| / ‖ψ‖ ‖φ‖ with the Hardy
    /// norm ‖v‖² = ∫ r^{N-3} v². Small for genuine eigenpairs.
    pub fn weak_residual<P: RadialPotential>(
        &self,
        a: &P,
        k: usize,
        phi: impl Fn(f64) -> f64,
        dphi: impl Fn(f64) -> f64,
    ) -> f64 {
        use crate::quad::simpson_nonuniform;
        let e = &self.eigenvalues[k - 1];
        let nm1 = (self.n_dim - 1) as i32;
        let nm3 = (self.n_dim - 3) as i32;
        let g = &self.grid;
        let f1: Vec<f64> = (0..g.len())
            .map(|i| {
                g[i].powi(nm1) * (e.dpsi[i] * dphi(g[i]) - a.eval(g[i]) * e.psi[i] * phi(g[i]))
            })
            .collect();
        let f2: Vec<f64> = (0..g.len())
            .map(|i| g[i].powi(nm3) * e.psi[i] * phi(g[i]))
            .collect();
        let npsi: Vec<f64> = (0..g.len())
            .map(|i| g[i].powi(nm3) * e.psi[i] * e.psi[i])
            .collect();
        let nphi: Vec<f64> = (0..g.len())
            .map(|i| g[i].powi(nm3) * phi(g[i]).powi(2))
            .collect();
        let defect = simpson_nonuniform(g, &f1) - e.value * simpson_nonuniform(g, &f2);
        let scale = (simpson_nonuniform(g, &npsi) * simpson_nonuniform(g, &nphi)).sqrt();
        defect.abs() / scale.max(1e-300)
    }
}
