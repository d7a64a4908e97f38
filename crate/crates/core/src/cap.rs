//! Neumann spectrum of the Laplace-Beltrami operator on geodesic caps
//! D_{θ₀} ⊂ S^{N-1}, plus ingestion of user-supplied spectra for general
//! domains.
//!
//! Separation in the polar angle reduces the cap problem, per azimuthal
//! order ℓ, to the weighted Sturm-Liouville problem
//!
//! ```text
//! -g'' - (N-2) cot(θ) g' + [ℓ(ℓ+N-3)/sin²θ] g = λ g   on (0, θ₀),
//! g ~ θ^ℓ at 0,    g'(θ₀) = 0,
//! ```
//!
//! every eigenvalue carrying the multiplicity of degree-ℓ spherical
//! harmonics on S^{N-2}. Eigenvalues are located by bisection on the
//! Neumann oscillation count of the shooting solution.
//!
//! Indexing convention: entries are listed from λ = 0 (the constant mode),
//! and "first nontrivial eigenvalue λ₁" means the smallest positive entry.

use crate::error::{Error, Result};
use crate::grid::uniform_nodes;
use crate::ode::{Control, Dopri5, Step};
use crate::sl::{assemble_pencil, Endpoint};
use serde::{Deserialize, Serialize};

const THETA_START: f64 = 1e-6;
const RESCALE_AT: f64 = 1e100;
const EIG_TOL: f64 = 1e-10;

/// Dimension of the space of degree-ℓ spherical harmonics on S^{N-2}
/// (the multiplicity carried by each separated cap eigenvalue).
pub fn multiplicity(ell: u32, n_dim: u32) -> u32 {
    assert!(n_dim >= 3);
    let n = (n_dim - 1) as u64; // harmonics in N-1 variables
    let l = ell as u64;
    if l == 0 {
        return 1;
    }
    let binom = |top: u64, k: u64| -> u64 {
        if top < k {
            return 0;
        }
        let mut v = 1u64;
        for i in 0..k {
            v = v * (top - i) / (i + 1);
        }
        v
    };
    let a = binom(n + l - 1, l);
    let b = if l >= 2 { binom(n + l - 3, l - 2) } else { 0 };
    (a - b) as u32
}

/// One shooting run of the angular equation.
#[derive(Clone, Copy, Debug)]
pub struct AngularShot {
    /// Neumann defect g'(θ₀), up to positive normalization.
    pub neumann_defect: f64,
    /// g(θ₀), same normalization.
    pub endpoint_value: f64,
    /// Interior sign changes of g on (0, θ₀).
    pub zeros: usize,
}

struct AngularShoot {
    n_dim: u32,
    ell: u32,
    theta0: f64,
}

impl AngularShoot {
    /// g = θ^ℓ (1 + c₂ θ² + ...) with
    /// c₂ = -(λ - ℓ(ℓ+2N-5)/3) / (4ℓ + 2N - 2), normalized to g(θs) = 1.
    fn initial(&self, lambda: f64, ts: f64) -> [f64; 2] {
        let n = self.n_dim as f64;
        let l = self.ell as f64;
        let c2 = -(lambda - l * (l + 2.0 * n - 5.0) / 3.0) / (4.0 * l + 2.0 * n - 2.0);
        let corr = 1.0 + c2 * ts * ts;
        [1.0, l / ts + 2.0 * c2 * ts / corr]
    }

    fn rhs(&self, lambda: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
        let nm2 = (self.n_dim - 2) as f64;
        let q = (self.ell * (self.ell + self.n_dim - 3)) as f64;
        move |t: f64, y: &[f64; 2]| {
            let s = t.sin();
            let coeff = q / (s * s) - lambda;
            [y[1], -nm2 * (t.cos() / s) * y[1] + coeff * y[0]]
        }
    }

    fn shoot(&self, lambda: f64) -> Result<AngularShot> {
        let ts = THETA_START;
        let y0 = self.initial(lambda, ts);
        let f = self.rhs(lambda);
        let solver = Dopri5 {
            max_step: (self.theta0 - ts) / 256.0,
            ..Dopri5::with_tol(1e-11, 1e-13)
        };
        let mut zeros = 0usize;
        let mut sign = 1.0f64;
        let (_, y) = solver.integrate(&f, ts, y0, self.theta0, &mut |s: &Step<2>| {
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
        Ok(AngularShot {
            neumann_defect: y[1],
            endpoint_value: y[0],
            zeros,
        })
    }

    /// Number of Neumann eigenvalues of this branch strictly below λ:
    /// the Prüfer phase passes π/2 + mπ once per eigenvalue, which in terms
    /// of the shooting solution is one interior zero per full π plus a
    /// final half-turn visible as g·g' < 0 at θ₀.
    fn count_below(&self, lambda: f64) -> Result<usize> {
        let shot = self.shoot(lambda)?;
        let extra = usize::from(shot.endpoint_value * shot.neumann_defect < 0.0);
        Ok(shot.zeros + extra)
    }
}

/// Neumann defect and oscillation count of the angular shooting solution.
pub fn angular_shoot(n_dim: u32, ell: u32, theta0: f64, lambda: f64) -> Result<AngularShot> {
    check_cap(n_dim, theta0)?;
    AngularShoot {
        n_dim,
        ell,
        theta0,
    }
    .shoot(lambda)
}

fn check_cap(n_dim: u32, theta0: f64) -> Result<()> {
    if n_dim < 3 {
        return Err(Error::InvalidParameter(format!("N = {n_dim} < 3")));
    }
    if !(theta0 > 0.0 && theta0 < std::f64::consts::PI) {
        return Err(Error::InvalidParameter(format!(
            "theta0 = {theta0} outside (0, pi)"
        )));
    }
    Ok(())
}

/// Domain tag of a cap spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CapDomain {
    Cap { theta0: f64 },
    /// Spectrum supplied from a file for a general domain.
    External,
}

/// One entry of the Neumann spectrum.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct CapEntry {
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<u32>,
    pub multiplicity: u32,
}

/// Neumann spectrum of -Δ_{S^{N-1}} on a cap (or an external domain),
/// sorted by eigenvalue, starting with the simple zero mode.
#[derive(Clone, Debug)]
pub struct CapSpectrum {
    pub n_dim: u32,
    pub domain: CapDomain,
    pub entries: Vec<CapEntry>,
    /// Enumeration is complete up to this level.
    pub enumerated_to: f64,
}

impl CapSpectrum {
    /// First nontrivial eigenvalue (smallest positive entry).
    pub fn lambda1(&self) -> Option<f64> {
        self.entries.iter().map(|e| e.lambda).find(|&l| l > 0.0)
    }

    /// Entries expanded with multiplicity, ascending, zero mode included.
    pub fn levels_with_multiplicity(&self) -> Vec<f64> {
        let mut v = Vec::new();
        for e in &self.entries {
            for _ in 0..e.multiplicity {
                v.push(e.lambda);
            }
        }
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        let theta0 = match self.domain {
            CapDomain::Cap { theta0 } => serde_json::json!(theta0),
            CapDomain::External => serde_json::json!("external"),
        };
        serde_json::json!({
            "N": self.n_dim,
            "theta0": theta0,
            "lambda_max": self.enumerated_to,
            "entries": self.entries,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::SpectrumFormat("empty spectrum".into()));
        }
        let first = &self.entries[0];
        if first.lambda != 0.0 {
            return Err(Error::SpectrumFormat(
                "missing zero mode: first entry must have lambda = 0".into(),
            ));
        }
        if first.multiplicity != 1 {
            return Err(Error::SpectrumFormat(
                "zero mode must be simple for a connected domain".into(),
            ));
        }
        if self.entries.iter().any(|e| e.lambda < 0.0) {
            return Err(Error::SpectrumFormat("negative eigenvalue".into()));
        }
        if self.entries.windows(2).any(|w| w[1].lambda < w[0].lambda) {
            return Err(Error::SpectrumFormat("entries not sorted ascending".into()));
        }
        if self.entries.iter().any(|e| e.multiplicity < 1) {
            return Err(Error::SpectrumFormat("multiplicity must be >= 1".into()));
        }
        Ok(())
    }
}

/// All Neumann eigenvalues ≤ λ_max of the cap D_{θ₀}, with multiplicities.
/// Azimuthal branches are enumerated until the branch minimum exceeds
/// λ_max (branches are monotone in ℓ since the angular potential is).
pub fn cap_neumann_eigenvalues(n_dim: u32, theta0: f64, lambda_max: f64) -> Result<CapSpectrum> {
    check_cap(n_dim, theta0)?;
    if !(lambda_max > 0.0) {
        return Err(Error::InvalidParameter("lambda_max must be positive".into()));
    }
    let mut entries = Vec::new();
    let mut ell = 0u32;
    loop {
        let branch = AngularShoot {
            n_dim,
            ell,
            theta0,
        };
        let in_branch = branch.count_below(lambda_max)?;
        if ell == 0 {
            // the zero mode is exact; modes m >= 1 come from bisection
            entries.push(CapEntry {
                lambda: 0.0,
                ell: Some(0),
                mode: Some(0),
                multiplicity: 1,
            });
        } else if in_branch == 0 {
            break;
        }
        let first_mode = usize::from(ell == 0);
        for m in first_mode..in_branch {
            let (mut lo, mut hi) = (0.0f64, lambda_max);
            while hi - lo > EIG_TOL {
                let mid = 0.5 * (lo + hi);
                if branch.count_below(mid)? > m {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            entries.push(CapEntry {
                lambda: 0.5 * (lo + hi),
                ell: Some(ell),
                mode: Some(m as u32),
                multiplicity: multiplicity(ell, n_dim),
            });
        }
        ell += 1;
    }
    entries.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());
    let spec = CapSpectrum {
        n_dim,
        domain: CapDomain::Cap { theta0 },
        entries,
        enumerated_to: lambda_max,
    };
    spec.validate()?;
    Ok(spec)
}

/// Samples (θ, g, g') of the angular eigenfunction for branch ℓ at
/// parameter λ on a uniform θ grid of `n_samples + 1` points,
/// max-normalized in g.
pub fn angular_eigenfunction(
    n_dim: u32,
    ell: u32,
    theta0: f64,
    lambda: f64,
    n_samples: usize,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    check_cap(n_dim, theta0)?;
    let sh = AngularShoot {
        n_dim,
        ell,
        theta0,
    };
    let thetas = uniform_nodes(THETA_START, theta0, n_samples);
    let f = sh.rhs(lambda);
    let solver = Dopri5::with_tol(1e-11, 1e-13);
    let mut state = sh.initial(lambda, thetas[0]);
    let mut t = thetas[0];
    let mut values = vec![state[0]];
    let mut derivs = vec![state[1]];
    for &th in &thetas[1..] {
        let (t1, y1) = solver.run(&f, t, state, th)?;
        t = t1;
        state = y1;
        values.push(state[0]);
        derivs.push(state[1]);
    }
    let peak = values.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    for i in 0..values.len() {
        values[i] /= peak;
        derivs[i] /= peak;
    }
    Ok((thetas, values, derivs))
}

/// Dense verification oracle for one angular branch: finite-volume pencil
/// of the weighted form with weight sin^{N-2}θ on a uniform grid,
/// eigenvalues below `bound`.
pub fn dense_oracle_angular(
    n_dim: u32,
    ell: u32,
    theta0: f64,
    grid_n: usize,
    bound: f64,
) -> Result<Vec<f64>> {
    check_cap(n_dim, theta0)?;
    let nodes = uniform_nodes(0.0, theta0, grid_n);
    let nm2 = (n_dim - 2) as i32;
    let q = (ell * (ell + n_dim - 3)) as f64;
    let left = if ell == 0 {
        Endpoint::Natural
    } else {
        Endpoint::Dirichlet
    };
    let pencil = assemble_pencil(
        &nodes,
        &|t| t.sin().powi(nm2),
        &|t| q * t.sin().powi(nm2 - 2),
        &|t| t.sin().powi(nm2),
        left,
        Endpoint::Natural,
    )?;
    Ok(pencil.eigenvalues_below(bound))
}

/// Parse and validate an external spectrum document (same JSON schema as
/// the emitted cap spectra). The result is tagged external regardless of
/// any theta0 field in the document.
pub fn load_spectrum(doc: &str) -> Result<CapSpectrum> {
    #[derive(Deserialize)]
    struct Doc {
        #[serde(rename = "N")]
        n_dim: u32,
        #[serde(default)]
        lambda_max: Option<f64>,
        entries: Vec<CapEntry>,
    }
    let doc: Doc = serde_json::from_str(doc).map_err(|e| Error::SpectrumFormat(e.to_string()))?;
    if doc.n_dim < 3 {
        return Err(Error::SpectrumFormat(format!("N = {} < 3", doc.n_dim)));
    }
    let enumerated_to = doc
        .lambda_max
        .unwrap_or_else(|| doc.entries.last().map(|e| e.lambda).unwrap_or(0.0));
    let spec = CapSpectrum {
        n_dim: doc.n_dim,
        domain: CapDomain::External,
        entries: doc.entries,
        enumerated_to,
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn multiplicities() {
        assert_eq!(multiplicity(0, 4), 1);
        assert_eq!(multiplicity(1, 3), 2);
        assert_eq!(multiplicity(1, 4), 3);
        assert_eq!(multiplicity(5, 3), 2);
        assert_eq!(multiplicity(2, 4), 5);
        assert_eq!(multiplicity(3, 4), 7);
        assert_eq!(multiplicity(2, 5), 9);
    }

    #[test]
    fn multiplicities_partition_full_sphere_harmonics() {
        // the separated branches (ℓ, m) with ℓ + m = L must carry exactly
        // the degree-L harmonic dimension of S^{N-1}
        let dim_harmonics = |n: u64, l: u64| -> u64 {
            let binom = |top: u64, k: u64| -> u64 {
                if top < k {
                    return 0;
                }
                (0..k).fold(1u64, |v, i| v * (top - i) / (i + 1))
            };
            if l >= 2 {
                binom(n + l - 1, l) - binom(n + l - 3, l - 2)
            } else {
                binom(n + l - 1, l)
            }
        };
        for n_dim in 3u32..=7 {
            for big_l in 0u32..=10 {
                let total: u64 = (0..=big_l)
                    .map(|ell| multiplicity(ell, n_dim) as u64)
                    .sum();
                assert_eq!(
                    total,
                    dim_harmonics(n_dim as u64, big_l as u64),
                    "N={n_dim} L={big_l}"
                );
            }
        }
    }

    #[test]
    fn constant_mode_is_exact() {
        for n_dim in [3u32, 4, 5] {
            let shot = angular_shoot(n_dim, 0, 1.2, 0.0).unwrap();
            assert_eq!(shot.zeros, 0);
            assert!(shot.neumann_defect.abs() < 1e-10, "{}", shot.neumann_defect);
        }
    }

    #[test]
    fn half_sphere_coordinate_eigenfunction() {
        // g = sin θ solves the ℓ=1 branch at λ = N-1 with g'(π/2) = 0
        for n_dim in [3u32, 4, 5] {
            let shot = angular_shoot(n_dim, 1, PI / 2.0, (n_dim - 1) as f64).unwrap();
            assert_eq!(shot.zeros, 0);
            assert!(
                shot.neumann_defect.abs() < 1e-9 * shot.endpoint_value.abs(),
                "defect {}",
                shot.neumann_defect
            );
        }
    }

    #[test]
    fn neumann_defect_changes_sign_on_wide_cap() {
        // nonconvex cap: the ℓ=1 eigenvalue drops below N-1 = 2
        let theta0 = 2.0 * PI / 3.0;
        let branch = AngularShoot {
            n_dim: 3,
            ell: 1,
            theta0,
        };
        assert_eq!(branch.count_below(2.0).unwrap(), 1, "eigenvalue below 2");
        assert_eq!(branch.count_below(0.5).unwrap(), 0);
    }

    #[test]
    fn half_sphere_spectrum_anchor() {
        // Neumann half-sphere (N=3): eigenvalues L(L+1) restricted to
        // equator-symmetric harmonics; up to 7: 0, 2 (x2), 6 (x1 zonal),
        // 6 (x2 from ell=2)
        let spec = cap_neumann_eigenvalues(3, PI / 2.0, 7.0).unwrap();
        assert_abs_diff_eq!(spec.lambda1().unwrap(), 2.0, epsilon = 1e-8);
        let levels = spec.levels_with_multiplicity();
        let expected = [0.0, 2.0, 2.0, 6.0, 6.0, 6.0];
        assert_eq!(levels.len(), expected.len(), "{levels:?}");
        for (l, e) in levels.iter().zip(&expected) {
            assert_abs_diff_eq!(l, e, epsilon = 1e-7);
        }
        // entry bookkeeping: zero mode simple and first
        assert_eq!(spec.entries[0].multiplicity, 1);
        assert_eq!(spec.entries[0].ell, Some(0));
    }

    #[test]
    fn half_sphere_lambda1_equals_nm1_for_all_dims() {
        for n_dim in [3u32, 4, 5] {
            let spec = cap_neumann_eigenvalues(n_dim, PI / 2.0, (n_dim as f64) + 1.0).unwrap();
            assert_abs_diff_eq!(spec.lambda1().unwrap(), (n_dim - 1) as f64, epsilon = 1e-8);
            // multiplicity of the coordinate functions: N-1
            let e = spec.entries.iter().find(|e| e.lambda > 0.0).unwrap();
            assert_eq!(e.multiplicity, n_dim - 1);
        }
    }

    #[test]
    fn lambda1_shape_in_aperture() {
        // λ₁ decreases from the narrow-cap regime through the half sphere,
        // dips below N-1 = 2 past π/2, attains an interior minimum, and
        // climbs back toward 2 as θ₀ → π (it must: the full sphere has
        // λ₁ = 2, so no global monotonicity). Values locked against an
        // independent associated-Legendre root solve: the ℓ=1 ground mode
        // is ν(ν+1) with ∂_θ P_ν¹(cos θ₀) = 0.
        let l1_at = |theta0: f64| {
            cap_neumann_eigenvalues(3, theta0, 30.0)
                .unwrap()
                .lambda1()
                .unwrap()
        };
        let narrow = l1_at(PI / 3.0);
        let half = l1_at(PI / 2.0);
        let wide = l1_at(2.0 * PI / 3.0);
        let wider = l1_at(5.0 * PI / 6.0);
        assert_abs_diff_eq!(narrow, 3.622974342, epsilon = 1e-8);
        assert_abs_diff_eq!(half, 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(wide, 1.589585646, epsilon = 1e-8);
        assert_abs_diff_eq!(wider, 1.711429455, epsilon = 1e-8);
        assert!(narrow > half && half > wide, "decreasing through 2π/3");
        assert!(wider > wide, "interior minimum before 5π/6");
        // convex/nonconvex dichotomy on the grid
        assert!(narrow > 2.0 && wide < 2.0 && wider < 2.0);
    }

    #[test]
    fn closed_sphere_limit() {
        // θ₀ → π: spectrum approaches the full-sphere values L(L+N-2)
        let mut err1 = f64::INFINITY;
        let mut err2 = f64::INFINITY;
        for theta0 in [3.0, 3.1, 3.14] {
            let spec = cap_neumann_eigenvalues(3, theta0, 7.0).unwrap();
            let l1 = spec.lambda1().unwrap();
            let e1 = (l1 - 2.0).abs();
            assert!(e1 < err1, "lambda1 not approaching 2: {l1} at {theta0}");
            err1 = e1;
            let above = spec
                .entries
                .iter()
                .map(|e| e.lambda)
                .find(|&l| l > 3.0)
                .unwrap();
            let e2 = (above - 6.0).abs();
            assert!(e2 < err2, "next level not approaching 6");
            err2 = e2;
        }
        assert!(err1 < 0.02, "residual gap at theta0 = 3.14: {err1}");
    }

    #[test]
    fn shooting_matches_dense_oracle() {
        for (n_dim, ell, theta0) in [(3u32, 1u32, 2.0 * PI / 3.0), (4, 2, 1.0), (3, 0, 2.2)] {
            let branch = AngularShoot {
                n_dim,
                ell,
                theta0,
            };
            let bound = 40.0;
            let count = branch.count_below(bound).unwrap();
            assert!(count >= 1);
            let mut shots = Vec::new();
            for m in 0..count {
                let (mut lo, mut hi) = (0.0f64, bound);
                while hi - lo > 1e-10 {
                    let mid = 0.5 * (lo + hi);
                    if branch.count_below(mid).unwrap() > m {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                shots.push(0.5 * (lo + hi));
            }
            let n_grid = 4000;
            let oracle = dense_oracle_angular(n_dim, ell, theta0, n_grid, bound).unwrap();
            assert_eq!(oracle.len(), shots.len(), "counts disagree");
            let h = theta0 / n_grid as f64;
            let tol = 1e-6f64.max(10.0 * h * h);
            for (s, o) in shots.iter().zip(&oracle) {
                assert_abs_diff_eq!(s, o, epsilon = tol * s.abs().max(1.0));
            }
        }
    }

    #[test]
    fn eigenfunction_zero_counts_match_mode_index() {
        let theta0 = 2.0 * PI / 3.0;
        let spec = cap_neumann_eigenvalues(3, theta0, 30.0).unwrap();
        for e in spec.entries.iter().filter(|e| e.ell.is_some()) {
            let shot = angular_shoot(3, e.ell.unwrap(), theta0, e.lambda).unwrap();
            assert_eq!(
                shot.zeros as u32,
                e.mode.unwrap(),
                "mode {:?} of branch {:?}",
                e.mode,
                e.ell
            );
        }
    }

    #[test]
    fn load_spectrum_validation() {
        // full-sphere S³ prefix: valid
        let ok = r#"{"N":4,"entries":[
            {"lambda":0.0,"multiplicity":1},
            {"lambda":3.0,"multiplicity":4},
            {"lambda":8.0,"multiplicity":9}]}"#;
        let spec = load_spectrum(ok).unwrap();
        assert_eq!(spec.domain, CapDomain::External);
        assert_abs_diff_eq!(spec.lambda1().unwrap(), 3.0);
        assert_eq!(spec.enumerated_to, 8.0);

        let neg = r#"{"N":4,"entries":[{"lambda":0.0,"multiplicity":1},{"lambda":-1.0,"multiplicity":1}]}"#;
        assert!(matches!(load_spectrum(neg), Err(Error::SpectrumFormat(_))));

        let unsorted = r#"{"N":4,"entries":[{"lambda":0.0,"multiplicity":1},{"lambda":5.0,"multiplicity":1},{"lambda":2.0,"multiplicity":1}]}"#;
        assert!(matches!(load_spectrum(unsorted), Err(Error::SpectrumFormat(_))));

        let no_zero = r#"{"N":4,"entries":[{"lambda":1.0,"multiplicity":1}]}"#;
        assert!(matches!(load_spectrum(no_zero), Err(Error::SpectrumFormat(_))));

        let fat_zero = r#"{"N":4,"entries":[{"lambda":0.0,"multiplicity":2}]}"#;
        assert!(matches!(load_spectrum(fat_zero), Err(Error::SpectrumFormat(_))));
    }

    #[test]
    fn computed_spectrum_roundtrips_through_loader() {
        let spec = cap_neumann_eigenvalues(3, PI / 2.0, 7.0).unwrap();
        let json = spec.to_json().to_string();
        let loaded = load_spectrum(&json).unwrap();
        assert_eq!(loaded.entries.len(), spec.entries.len());
        for (a, b) in loaded.entries.iter().zip(&spec.entries) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rejects_bad_cap_parameters() {
        assert!(cap_neumann_eigenvalues(3, -0.1, 5.0).is_err());
        assert!(cap_neumann_eigenvalues(3, PI, 5.0).is_err());
        assert!(cap_neumann_eigenvalues(2, 1.0, 5.0).is_err());
    }

    proptest::proptest! {
        // the loader must never panic, and must accept exactly the
        // documents satisfying the stated invariants
        #[test]
        fn loader_accepts_iff_valid(
            entries in proptest::collection::vec((-1.0..5.0f64, 0u32..4), 0..8),
        ) {
            let doc = serde_json::json!({
                "N": 4,
                "entries": entries.iter().map(|&(lambda, multiplicity)| serde_json::json!({
                    "lambda": lambda, "multiplicity": multiplicity,
                })).collect::<Vec<_>>(),
            });
            let parsed = load_spectrum(&doc.to_string());
            let valid = !entries.is_empty()
                && entries[0].0 == 0.0
                && entries[0].1 == 1
                && entries.iter().all(|e| e.0 >= 0.0 && e.1 >= 1)
                && entries.windows(2).all(|w| w[1].0 >= w[0].0);
            proptest::prop_assert_eq!(parsed.is_ok(), valid);
        }
    }
}
