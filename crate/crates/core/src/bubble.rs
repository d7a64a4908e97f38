//! The standard bubble on cones and the objects of the critical limit:
//! the explicit extremal η of the singular radial Rayleigh quotient, the
//! behaviour of the first singular eigenvalue as p approaches the critical
//! exponent, and the separated quadratic forms that witness instability.

use crate::error::{Error, Result};
use crate::fd;
use crate::quad::{gauss16, integrate_semiline, simpson_nonuniform};
use crate::radial::solve_lane_emden;
use crate::singular::{first_singular_eigenvalue, DEFAULT_EIG_TOL};
use serde::Serialize;

/// α_N = (N(N-2))^{(N-2)/4}, the peak of the unit-scale bubble.
pub fn alpha_n(n_dim: u32) -> f64 {
    let n = n_dim as f64;
    (n * (n - 2.0)).powf((n - 2.0) / 4.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Normalization {
    /// U(0) = α_N λ^{-(N-2)/2} (the α_N-normalized family).
    PeakAlpha,
    /// U(0) = 1 (the member with λ = √(N(N-2))).
    PeakOne,
}

/// The standard bubble U(x) = α_N (λ/(λ² + |x|²))^{(N-2)/2}, the radial
/// solution of -ΔU = U^{p_S} on R^N (and on any cone, by the Neumann
/// condition on rays).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Bubble {
    pub n_dim: u32,
    pub scale: f64,
    pub normalization: Normalization,
}

impl Bubble {
    pub fn peak_alpha(n_dim: u32, scale: f64) -> Self {
        Bubble {
            n_dim,
            scale,
            normalization: Normalization::PeakAlpha,
        }
    }

    /// The peak-1 member: U(x) = (N(N-2)/(N(N-2)+|x|²))^{(N-2)/2}.
    pub fn peak_one(n_dim: u32) -> Self {
        Bubble {
            n_dim,
            scale: 1.0,
            normalization: Normalization::PeakOne,
        }
    }

    fn lambda(&self) -> f64 {
        let n = self.n_dim as f64;
        match self.normalization {
            Normalization::PeakAlpha => self.scale,
            Normalization::PeakOne => self.scale * (n * (n - 2.0)).sqrt(),
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        let n = self.n_dim as f64;
        let lam = self.lambda();
        alpha_n(self.n_dim) * (lam / (lam * lam + r * r)).powf((n - 2.0) / 2.0)
    }

    /// U'(r), closed form.
    pub fn derivative(&self, r: f64) -> f64 {
        let n = self.n_dim as f64;
        let m = (n - 2.0) / 2.0;
        let lam = self.lambda();
        -2.0 * m * alpha_n(self.n_dim) * lam.powf(m) * r * (lam * lam + r * r).powf(-m - 1.0)
    }

    /// -ΔU, closed form: N(N-2) α_N λ^{(N+2)/2} (λ² + r²)^{-(N+2)/2}.
    pub fn minus_laplacian(&self, r: f64) -> f64 {
        let n = self.n_dim as f64;
        let lam = self.lambda();
        n * (n - 2.0)
            * alpha_n(self.n_dim)
            * lam.powf((n + 2.0) / 2.0)
            * (lam * lam + r * r).powf(-(n + 2.0) / 2.0)
    }

    /// Linearization potential p_S U^{p_S - 1}.
    pub fn potential(&self, r: f64) -> f64 {
        let p_s = crate::critical_exponent(self.n_dim);
        p_s * self.value(r).powf(p_s - 1.0)
    }

    /// Pointwise residual -ΔU - U^{p_S} (zero for the exact bubble).
    pub fn pde_residual(&self, r: f64) -> f64 {
        let p_s = crate::critical_exponent(self.n_dim);
        self.minus_laplacian(r) - self.value(r).powf(p_s)
    }
}

/// η(r) = r / (1 + r²/(N(N-2)))^{N/2}, the extremal of the singular radial
/// Rayleigh quotient at the critical potential; behaves like r at 0
/// (indicial exponent 1 at level -(N-1)) and decays like r^{1-N}.
pub fn eta_value(n_dim: u32, r: f64) -> f64 {
    let n = n_dim as f64;
    let c = n * (n - 2.0);
    r / (1.0 + r * r / c).powf(n / 2.0)
}

/// η'(r), closed form: (1 + r²/c)^{-N/2 - 1} (1 + (1-N) r²/c).
pub fn eta_derivative(n_dim: u32, r: f64) -> f64 {
    let n = n_dim as f64;
    let c = n * (n - 2.0);
    let w = 1.0 + r * r / c;
    w.powf(-n / 2.0 - 1.0) * (1.0 + (1.0 - n) * r * r / c)
}

/// Residual of the extremal identity
/// -η'' - (N-1)/r η' - V η + (N-1) η / r², with V the peak-1 bubble
/// potential, evaluated by high-order central finite differences on the
/// closed form. Vanishes identically in exact arithmetic.
pub fn eta_residual(n_dim: u32, r: f64) -> f64 {
    assert!(r > 0.0);
    let n = n_dim as f64;
    let h = (0.02 * r.max(1.0)).min(r / 5.0);
    let f = |x: f64| eta_value(n_dim, x);
    let d1 = fd::derivative(f, r, 1, h, 4);
    let d2 = fd::derivative(f, r, 2, h, 4);
    let v = Bubble::peak_one(n_dim).potential(r);
    let eta = eta_value(n_dim, r);
    -d2 - (n - 1.0) / r * d1 - v * eta + (n - 1.0) * eta / (r * r)
}

/// Truncation radius where the power-law tails of the η-quadratures drop
/// below ~1e-15 of the integral scale.
fn eta_trunc(n_dim: u32) -> f64 {
    let n = n_dim as f64;
    let c = n * (n - 2.0);
    c * 10f64.powf(15.0 / n)
}

/// Rayleigh quotient of the singular form at η:
/// (∫ r^{N-1}(η'² - V η²)) / (∫ r^{N-3} η²); equals -(N-1).
pub fn rayleigh_quotient_eta(n_dim: u32) -> f64 {
    let n = n_dim as f64;
    let c = n * (n - 2.0);
    let v = Bubble::peak_one(n_dim);
    let r_max = eta_trunc(n_dim);
    let num = integrate_semiline(
        &|r| {
            r.powf(n - 1.0)
                * (eta_derivative(n_dim, r).powi(2) - v.potential(r) * eta_value(n_dim, r).powi(2))
        },
        c.sqrt(),
        r_max,
        1e-18,
    );
    let den = integrate_semiline(
        &|r| r.powf(n - 3.0) * eta_value(n_dim, r).powi(2),
        c.sqrt(),
        r_max,
        1e-18,
    );
    num / den
}

/// One row of the critical-limit study.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LimitRow {
    pub p: f64,
    pub lambda_hat_1: f64,
    /// Λ̂₁(p) + (N-1); positive, shrinking toward the critical exponent.
    pub gap: f64,
    /// sup |V_p - V| over a fixed ball: convergence of the rescaled
    /// linearization potential to the bubble potential.
    pub vp_diagnostic: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitTable {
    pub n_dim: u32,
    pub rows: Vec<LimitRow>,
}

impl LimitTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,lambda_hat_1_rad,gap,Vp_diagnostic\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{}\n",
                r.p, r.lambda_hat_1, r.gap, r.vp_diagnostic
            ));
        }
        s
    }
}

/// Run the radial pipeline for each exponent and record Λ̂₁(p), its gap to
/// -(N-1), and the rescaled-potential diagnostic
/// V_p(x) = p (u_p(|x| M_p^{-(p-1)/2}) / M_p)^{p-1} compared with the
/// bubble potential on a fixed ball.
pub fn limit_study(n_dim: u32, p_list: &[f64], tol: f64) -> Result<LimitTable> {
    if p_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("p_list must be ascending".into()));
    }
    let mut rows = Vec::with_capacity(p_list.len());
    for &p in p_list {
        rows.push(limit_row(n_dim, p, tol)?);
    }
    Ok(LimitTable { n_dim, rows })
}

/// Single row of [`limit_study`]; rows are independent, so sweeps can fan
/// out across workers.
pub fn limit_row(n_dim: u32, p: f64, tol: f64) -> Result<LimitRow> {
    let n = n_dim as f64;
    let v_exact = Bubble::peak_one(n_dim);
    let sol = solve_lane_emden(n_dim, p, tol)?;
    let a = sol.linearization();
    let lam = first_singular_eigenvalue(n_dim, &a, DEFAULT_EIG_TOL)?.unwrap_or(0.0);
    let big_r = sol.peak.powf((p - 1.0) / 2.0);
    let r_diag = 4.0f64.min(0.99 * big_r);
    let mut sup = 0.0f64;
    for i in 0..=200 {
        let x = r_diag * i as f64 / 200.0;
        let vp = p * (sol.eval_u(x / big_r) / sol.peak).max(0.0).powf(p - 1.0);
        sup = sup.max((vp - v_exact.potential(x)).abs());
    }
    Ok(LimitRow {
        p,
        lambda_hat_1: lam,
        gap: lam + (n - 1.0),
        vp_diagnostic: sup,
    })
}

/// An angular Neumann eigenpair sampled on its cap, as produced by
/// [`crate::cap::angular_eigenfunction`].
#[derive(Clone, Debug)]
pub struct AngularMode {
    pub ell: u32,
    pub lambda: f64,
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
}

/// Quadratic form of the bubble linearization at the separated test
/// function ψ(x) = η(|x|) φ(x/|x|):
///
/// ```text
/// Q(ψ) = ∫_D φ² dσ · [ ∫ r^{N-1} η'² + λ ∫ r^{N-3} η² - ∫ r^{N-1} V η² ],
/// ```
///
/// which by the extremal identity equals (λ - (N-1)) ∫φ² ∫ r^{N-3} η²:
/// negative exactly when λ < N-1. The azimuthal factor of φ is normalized
/// away; the sign is invariant under bubble rescaling.
pub fn step1_quadratic_form(n_dim: u32, mode: &AngularMode) -> Result<f64> {
    if mode.thetas.len() != mode.values.len() || mode.thetas.len() < 3 {
        return Err(Error::InvalidParameter("bad angular samples".into()));
    }
    let n = n_dim as f64;
    let c = n * (n - 2.0);
    let nm2 = (n_dim - 2) as i32;
    // angular factor ∫ g² sin^{N-2}θ dθ
    let w: Vec<f64> = (0..mode.thetas.len())
        .map(|i| mode.values[i].powi(2) * mode.thetas[i].sin().powi(nm2))
        .collect();
    let a_phi = simpson_nonuniform(&mode.thetas, &w);

    let v = Bubble::peak_one(n_dim);
    let r_max = eta_trunc(n_dim);
    let r1 = integrate_semiline(
        &|r| r.powf(n - 1.0) * eta_derivative(n_dim, r).powi(2),
        c.sqrt(),
        r_max,
        1e-18,
    );
    let r2 = integrate_semiline(
        &|r| r.powf(n - 3.0) * eta_value(n_dim, r).powi(2),
        c.sqrt(),
        r_max,
        1e-18,
    );
    let r3 = integrate_semiline(
        &|r| r.powf(n - 1.0) * v.potential(r) * eta_value(n_dim, r).powi(2),
        c.sqrt(),
        r_max,
        1e-18,
    );
    Ok(a_phi * (r1 + mode.lambda * r2 - r3))
}

/// Q_U(U) over the cone spanned by a cap: (1 - p_S) |D| ∫ U^{2*} r^{N-1} dr,
/// strictly negative since p_S > 1.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BubbleFormReport {
    pub value: f64,
    /// ∫_0^∞ U^{2*} r^{N-1} dr.
    pub radial_integral: f64,
    /// Surface measure of the cap.
    pub cap_measure: f64,
    /// value / full-space value = |D| / |S^{N-1}|.
    pub ratio_to_full_space: f64,
}

pub fn q_u_on_bubble(n_dim: u32, theta0: f64) -> Result<BubbleFormReport> {
    if !(theta0 > 0.0 && theta0 < std::f64::consts::PI) {
        return Err(Error::InvalidParameter(format!(
            "theta0 = {theta0} outside (0, pi)"
        )));
    }
    let n = n_dim as f64;
    let p_s = crate::critical_exponent(n_dim);
    let two_star = p_s + 1.0;
    let u = Bubble::peak_alpha(n_dim, 1.0);
    let radial_integral = integrate_semiline(
        &|r| r.powf(n - 1.0) * u.value(r).powf(two_star),
        1.0,
        eta_trunc(n_dim),
        1e-18,
    );
    let nm2 = (n_dim - 2) as i32;
    let cap_measure =
        crate::unit_sphere_area(n_dim - 2) * gauss16(&|t: f64| t.sin().powi(nm2), 0.0, theta0);
    let sphere = crate::unit_sphere_area(n_dim - 1);
    Ok(BubbleFormReport {
        value: (1.0 - p_s) * cap_measure * radial_integral,
        radial_integral,
        cap_measure,
        ratio_to_full_space: cap_measure / sphere,
    })
}
