//! Morse index assembly: combines negative singular radial eigenvalues with
//! the angular Neumann spectrum through the spectral decomposition
//! Λ̂ = Λ̂ₖ + λⱼ, evaluates the closed-form counting formulas, cross-checks
//! the two eigenvalue-counting routes, and locates the symmetry-breaking
//! exponent threshold.

use crate::cap::CapSpectrum;
use crate::error::{Error, Result};
use crate::radial::{solve_lane_emden, LinearizedPotential, RadialPotential};
use crate::singular::{
    first_singular_eigenvalue, negative_singular_eigenvalues, standard_negative_count,
    SingularSpectrum, DEFAULT_EIG_TOL,
};
use serde::Serialize;

/// Pair sums closer to zero than this are flagged as degenerate-boundary
/// warnings.
pub const TIE_TOL: f64 = 1e-9;

/// One negative-direction pair (k-th radial eigenvalue, j-th angular entry).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MorsePair {
    pub k: usize,
    /// Index into the angular entry list (0 is the zero mode).
    pub j: usize,
    /// Λ̂ₖ + λⱼ.
    pub lambda_sum: f64,
    pub multiplicity: u32,
}

/// Morse index of a radial solution, by direct pair enumeration and by the
/// closed-form count.
#[derive(Clone, Debug, Serialize)]
pub struct MorseReport {
    #[serde(rename = "N")]
    pub n_dim: u32,
    /// Number of negative singular radial eigenvalues.
    pub m_rad: usize,
    /// Full Morse index: pairs with Λ̂ₖ + λⱼ < 0, angular multiplicity
    /// respected.
    pub m: usize,
    /// Closed-form count; equals `m` by contract.
    pub formula_m: usize,
    pub pairs: Vec<MorsePair>,
    /// Pairs whose sum is within [`TIE_TOL`] of zero (boundary cases; not
    /// counted in `m`, counted in `m_including_ties`).
    pub ties: Vec<MorsePair>,
    pub m_including_ties: usize,
    pub radial_eigenvalues: Vec<f64>,
    pub lambda1: Option<f64>,
}

fn check_cutoff(angular: &CapSpectrum, required: f64) -> Result<()> {
    if angular.enumerated_to < required {
        return Err(Error::CutoffTooLow {
            cutoff: angular.enumerated_to,
            required,
        });
    }
    Ok(())
}

/// Direct Morse count: enumerate all (k, j) with Λ̂ₖ + λⱼ < 0. The angular
/// spectrum must be enumerated at least up to -Λ̂₁, otherwise pairs could
/// be missed.
pub fn morse_index_direct(
    radial: &SingularSpectrum,
    angular: &CapSpectrum,
) -> Result<MorseReport> {
    let values = radial.values();
    if let Some(&first) = values.first() {
        check_cutoff(angular, -first)?;
    }
    let mut pairs = Vec::new();
    let mut ties = Vec::new();
    let mut m = 0usize;
    let mut m_ties = 0usize;
    for (ki, &lam_rad) in values.iter().enumerate() {
        for (j, entry) in angular.entries.iter().enumerate() {
            let sum = lam_rad + entry.lambda;
            let pair = MorsePair {
                k: ki + 1,
                j,
                lambda_sum: sum,
                multiplicity: entry.multiplicity,
            };
            if sum < 0.0 {
                m += entry.multiplicity as usize;
                pairs.push(pair);
            }
            if sum.abs() <= TIE_TOL {
                m_ties += entry.multiplicity as usize * usize::from(sum >= 0.0);
                ties.push(pair);
            }
        }
    }
    let formula_m = morse_index_formula(radial, angular)?;
    Ok(MorseReport {
        n_dim: radial.n_dim,
        m_rad: values.len(),
        m,
        formula_m,
        pairs,
        ties,
        m_including_ties: m + m_ties,
        radial_eigenvalues: values,
        lambda1: angular.lambda1(),
    })
}

/// Closed-form Morse count. With the negative radial eigenvalues
/// Λ̂₁ < … < Λ̂_d < 0 and Λ̂_{d+1} := 0 closing the last bucket, every
/// nontrivial angular level λ in [-Λ̂_{k+1}, -Λ̂_k) lies below -Λ̂_{k'}
/// exactly for k' ≤ k, so it contributes k pairs:
///
/// ```text
/// m = Σ_{k=1}^{d} k · #{ j ≥ 1 : -Λ̂_{k+1} ≤ λ_j < -Λ̂_k }  +  d,
/// ```
///
/// the trailing d coming from the zero mode paired with every Λ̂_k.
/// Multiplicities are respected throughout.
pub fn morse_index_formula(radial: &SingularSpectrum, angular: &CapSpectrum) -> Result<usize> {
    let values = radial.values();
    let d = values.len();
    if d == 0 {
        return Ok(0);
    }
    check_cutoff(angular, -values[0])?;
    // thresholds T_k = -Λ̂_k, decreasing; T_{d+1} = 0
    let t = |k: usize| -> f64 {
        if k <= d {
            -values[k - 1]
        } else {
            0.0
        }
    };
    // nontrivial levels with multiplicity (skip the simple zero mode)
    let levels: Vec<f64> = angular
        .levels_with_multiplicity()
        .into_iter()
        .skip(1)
        .collect();
    let mut m = d; // zero-mode column
    for k in 1..=d {
        let (lo, hi) = (t(k + 1), t(k));
        let in_bucket = levels.iter().filter(|&&l| l >= lo && l < hi).count();
        m += k * in_bucket;
    }
    Ok(m)
}

/// Morse index of the standard bubble on the cone over the domain:
/// #{ j ≥ 1 : λⱼ < N-1 } + 1 with multiplicity. The spectrum must be
/// enumerated at least up to N-1.
pub fn bubble_morse(angular: &CapSpectrum, n_dim: u32) -> Result<usize> {
    let bound = (n_dim - 1) as f64;
    check_cutoff(angular, bound)?;
    let below = angular
        .levels_with_multiplicity()
        .into_iter()
        .skip(1)
        .filter(|&l| l < bound)
        .count();
    Ok(below + 1)
}

/// Count the negative spectrum of the linearized operator on the sector by
/// two independent routes and return both integers (equal by contract):
/// per angular level, the number of negative standard radial eigenvalues
/// with that shift, against the direct singular-decomposition count.
/// The angular spectrum must reach ‖a‖∞ (a negative standard eigenvalue at
/// shift λ forces λ < ‖a‖∞ because r ≤ 1).
pub fn verify_count_equality(
    n_dim: u32,
    a: &LinearizedPotential,
    angular: &CapSpectrum,
) -> Result<(usize, usize)> {
    check_cutoff(angular, a.sup_norm())?;
    let mut k_std = 0usize;
    for e in &angular.entries {
        let neg = standard_negative_count(n_dim, a, e.lambda)?;
        k_std += neg * e.multiplicity as usize;
    }
    let radial = negative_singular_eigenvalues(n_dim, a, 64, DEFAULT_EIG_TOL)?;
    let k_hat = morse_index_direct(&radial, angular)?.m;
    Ok((k_std, k_hat))
}

/// One evaluated exponent in a threshold search.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ThresholdSample {
    pub p: f64,
    /// Λ̂₁(p); zero when the spectrum had no negative part.
    pub lambda_hat_1: f64,
    /// λ₁(D) + Λ̂₁(p).
    pub sum: f64,
}

/// A located symmetry-breaking threshold in the exponent.
#[derive(Clone, Debug, Serialize)]
pub struct ThresholdResult {
    #[serde(rename = "N")]
    pub n_dim: u32,
    pub lambda1: f64,
    pub p0: f64,
    pub bracket: (f64, f64),
    /// λ₁ + Λ̂₁ at the bracket ends: positive at `bracket.0`, negative at
    /// `bracket.1`.
    pub sum_at_lo: f64,
    pub sum_at_hi: f64,
    /// Further sign-change brackets seen in the coarse sweep, if any
    /// (monotonicity of p ↦ Λ̂₁(p) is observed, not assumed).
    pub extra_brackets: Vec<(f64, f64)>,
    pub samples: Vec<ThresholdSample>,
    pub tol: f64,
}

/// Outcome of the threshold search.
#[derive(Clone, Debug)]
pub enum ThresholdOutcome {
    /// λ₁(D) ≥ N-1: the sum λ₁ + Λ̂₁(p) stays positive for every
    /// subcritical exponent, no threshold exists.
    NoBreakingDetected { lambda1: f64, bound: f64 },
    Bracketed(Box<ThresholdResult>),
}

/// Locate the exponent p₀ where λ₁(D) + Λ̂₁(p) changes sign, by a coarse
/// sweep over (1, p_S) followed by bisection to `tol`. Requires
/// λ₁(D) < N-1; otherwise reports no-breaking without solving anything.
pub fn symmetry_breaking_threshold(
    n_dim: u32,
    angular: &CapSpectrum,
    tol: f64,
) -> Result<ThresholdOutcome> {
    let bound = (n_dim - 1) as f64;
    let lambda1 = match angular.lambda1() {
        Some(l) => l,
        // no nontrivial eigenvalue below the cutoff: λ₁ exceeds it, so if
        // the enumeration reaches N-1 the no-breaking conclusion stands
        None if angular.enumerated_to >= bound => {
            return Ok(ThresholdOutcome::NoBreakingDetected {
                lambda1: f64::INFINITY,
                bound,
            });
        }
        None => {
            return Err(Error::CutoffTooLow {
                cutoff: angular.enumerated_to,
                required: bound,
            });
        }
    };
    if lambda1 >= bound {
        return Ok(ThresholdOutcome::NoBreakingDetected { lambda1, bound });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let p_s = crate::critical_exponent(n_dim);
    let mut samples: Vec<ThresholdSample> = Vec::new();
    let mut eval = |p: f64| -> Result<f64> {
        let sol = solve_lane_emden(n_dim, p, 1e-10)?;
        let a = sol.linearization();
        let lam = first_singular_eigenvalue(n_dim, &a, DEFAULT_EIG_TOL)?.unwrap_or(0.0);
        let sum = lambda1 + lam;
        samples.push(ThresholdSample {
            p,
            lambda_hat_1: lam,
            sum,
        });
        Ok(sum)
    };

    // coarse sweep, denser toward the critical exponent
    let lo_edge = 1.0 + 0.1 * (p_s - 1.0) / 4.0;
    let hi_edge = p_s - 0.002 * (p_s - 1.0);
    let n_coarse = 9;
    let mut grid = Vec::with_capacity(n_coarse);
    for i in 0..n_coarse {
        let s = i as f64 / (n_coarse - 1) as f64;
        grid.push(lo_edge + (hi_edge - lo_edge) * s);
    }
    let mut sums = Vec::with_capacity(grid.len());
    for &p in &grid {
        sums.push(eval(p)?);
    }
    let mut brackets = Vec::new();
    for i in 0..grid.len() - 1 {
        if sums[i] > 0.0 && sums[i + 1] <= 0.0 || sums[i] <= 0.0 && sums[i + 1] > 0.0 {
            brackets.push((grid[i], grid[i + 1]));
        }
    }
    if brackets.is_empty() {
        return Err(Error::ThresholdBracketNotFound {
            n_samples: samples.len(),
            samples: samples.iter().map(|s| (s.p, s.sum)).collect(),
        });
    }
    // refine the bracket closest to p_S; the theorem regime sits above it
    let (mut lo, mut hi) = *brackets.last().unwrap();
    let extra_brackets = brackets[..brackets.len() - 1].to_vec();
    let mut sum_lo = sums[grid.iter().position(|&p| p == lo).unwrap()];
    let mut sum_hi = sums[grid.iter().position(|&p| p == hi).unwrap()];
    // orient: positive side at lo
    if sum_lo <= 0.0 {
        std::mem::swap(&mut lo, &mut hi);
        std::mem::swap(&mut sum_lo, &mut sum_hi);
    }
    while (hi - lo).abs() > tol {
        let mid = 0.5 * (lo + hi);
        let s = eval(mid)?;
        if s > 0.0 {
            lo = mid;
            sum_lo = s;
        } else {
            hi = mid;
            sum_hi = s;
        }
    }
    samples.sort_by(|a, b| a.p.partial_cmp(&b.p).unwrap());
    let (p_lo, p_hi) = (lo.min(hi), lo.max(hi));
    Ok(ThresholdOutcome::Bracketed(Box::new(ThresholdResult {
        n_dim,
        lambda1,
        p0: 0.5 * (lo + hi),
        bracket: (p_lo, p_hi),
        sum_at_lo: if p_lo == lo { sum_lo } else { sum_hi },
        sum_at_hi: if p_lo == lo { sum_hi } else { sum_lo },
        extra_brackets,
        samples,
        tol,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cap::{cap_neumann_eigenvalues, load_spectrum, CapDomain, CapEntry, CapSpectrum};
    use crate::singular::{SingularEigenvalue, SingularSpectrum};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn synthetic_radial(n_dim: u32, values: &[f64]) -> SingularSpectrum {
        SingularSpectrum {
            n_dim,
            exponent: None,
            eigenvalues: values
                .iter()
                .enumerate()
                .map(|(i, &v)| SingularEigenvalue {
                    k: i + 1,
                    value: v,
                    zeros: i,
                    psi: Vec::new(),
                    dpsi: Vec::new(),
                })
                .collect(),
            grid: Vec::new(),
            tol: 1e-9,
        }
    }

    fn synthetic_angular(n_dim: u32, levels: &[(f64, u32)], up_to: f64) -> CapSpectrum {
        CapSpectrum {
            n_dim,
            domain: CapDomain::External,
            entries: levels
                .iter()
                .map(|&(lambda, multiplicity)| CapEntry {
                    lambda,
                    ell: None,
                    mode: None,
                    multiplicity,
                })
                .collect(),
            enumerated_to: up_to,
        }
    }

    #[test]
    fn empty_radial_spectrum_means_stable() {
        let radial = synthetic_radial(3, &[]);
        let angular = synthetic_angular(3, &[(0.0, 1), (2.0, 2)], 5.0);
        let rep = morse_index_direct(&radial, &angular).unwrap();
        assert_eq!(rep.m, 0);
        assert_eq!(rep.m_rad, 0);
        assert_eq!(rep.formula_m, 0);
    }

    #[test]
    fn single_radial_eigenvalue_instance() {
        // Λ̂ = -1.5 against 0, 1.0 (x2), 3.0 (x2): pairs with 0 and both
        // copies of 1.0 -> m = 3
        let radial = synthetic_radial(3, &[-1.5]);
        let angular = synthetic_angular(3, &[(0.0, 1), (1.0, 2), (3.0, 2)], 5.0);
        let rep = morse_index_direct(&radial, &angular).unwrap();
        assert_eq!(rep.m, 3);
        assert_eq!(rep.formula_m, 3);
        assert_eq!(rep.m_rad, 1);
        assert_eq!(rep.pairs.len(), 2);
    }

    #[test]
    fn two_radial_eigenvalues_bucket_arithmetic() {
        // Λ̂ = -2.5, -0.5 against 0, 1, 2 (simple): direct pairs:
        // k=1: 0, 1, 2 all below 2.5; k=2: only 0 -> m = 4
        let radial = synthetic_radial(3, &[-2.5, -0.5]);
        let angular = synthetic_angular(3, &[(0.0, 1), (1.0, 1), (2.0, 1)], 5.0);
        let rep = morse_index_direct(&radial, &angular).unwrap();
        assert_eq!(rep.m, 4);
        assert_eq!(rep.formula_m, 4);
    }

    proptest::proptest! {
        // the closed-form count must agree with direct enumeration on
        // arbitrary spectra, multiplicities included
        #[test]
        fn direct_equals_formula(
            raw_radial in proptest::collection::vec(1e-3..3.0f64, 1..5),
            raw_levels in proptest::collection::vec((1e-3..4.0f64, 1u32..4), 0..8),
        ) {
            let mut vals: Vec<f64> = raw_radial.iter().map(|v| -v).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            vals.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
            let radial = synthetic_radial(3, &vals);
            let mut levels = vec![(0.0, 1u32)];
            let mut lam = 0.0;
            for (step, mult) in raw_levels {
                lam += step;
                levels.push((lam, mult));
            }
            let angular = synthetic_angular(3, &levels, 100.0);
            let rep = morse_index_direct(&radial, &angular).unwrap();
            proptest::prop_assert_eq!(rep.m, rep.formula_m);
            proptest::prop_assert!(rep.m >= rep.m_rad);
        }
    }

    #[test]
    fn near_tie_reported_but_not_counted() {
        let radial = synthetic_radial(3, &[-1.0]);
        // level exactly at the boundary -Λ̂₁: not a negative pair, flagged
        let angular = synthetic_angular(3, &[(0.0, 1), (1.0, 2), (3.0, 1)], 5.0);
        let rep = morse_index_direct(&radial, &angular).unwrap();
        assert_eq!(rep.m, 1, "only the zero-mode pair is strictly negative");
        assert_eq!(rep.ties.len(), 1);
        assert_eq!(rep.m_including_ties, 3);
        assert_eq!(rep.formula_m, 1);
    }

    #[test]
    fn cutoff_too_low_rejected() {
        let radial = synthetic_radial(3, &[-1.8]);
        let angular = synthetic_angular(3, &[(0.0, 1), (1.0, 2)], 1.2);
        assert!(matches!(
            morse_index_direct(&radial, &angular),
            Err(Error::CutoffTooLow { .. })
        ));
    }

    #[test]
    fn bubble_morse_dichotomy() {
        // half sphere: λ₁ = N-1 exactly, not < N-1 -> m(U) = 1
        let half = cap_neumann_eigenvalues(3, PI / 2.0, 5.0).unwrap();
        assert_eq!(bubble_morse(&half, 3).unwrap(), 1);
        // wide cap: λ₁ < 2 with multiplicity 2 -> m(U) = 3
        let wide = cap_neumann_eigenvalues(3, 2.0 * PI / 3.0, 5.0).unwrap();
        assert_eq!(bubble_morse(&wide, 3).unwrap(), 3);
        // genuine full-sphere prefix for N=4 (levels ℓ(ℓ+2)): stable bubble
        let sphere = load_spectrum(
            r#"{"N":4,"entries":[
                {"lambda":0.0,"multiplicity":1},
                {"lambda":3.0,"multiplicity":4},
                {"lambda":8.0,"multiplicity":9}]}"#,
        )
        .unwrap();
        assert_eq!(bubble_morse(&sphere, 4).unwrap(), 1);
        // cutoff below N-1 rejected
        let short = synthetic_angular(3, &[(0.0, 1)], 1.0);
        assert!(matches!(
            bubble_morse(&short, 3),
            Err(Error::CutoffTooLow { .. })
        ));
    }

    #[test]
    fn count_equality_on_narrow_cap() {
        let sol = solve_lane_emden(3, 2.5, 1e-10).unwrap();
        let a = sol.linearization();
        let angular = cap_neumann_eigenvalues(3, PI / 3.0, a.sup_norm() * 1.02).unwrap();
        let (k_std, k_hat) = verify_count_equality(3, &a, &angular).unwrap();
        assert_eq!(k_std, k_hat);
        assert!(k_hat >= 1);
    }

    #[test]
    fn per_level_sign_agreement() {
        // for each angular level, the standard negative count equals the
        // number of singular eigenvalues below -λ
        let sol = solve_lane_emden(3, 3.0, 1e-10).unwrap();
        let a = sol.linearization();
        let radial = negative_singular_eigenvalues(3, &a, 8, 1e-9).unwrap();
        let angular = cap_neumann_eigenvalues(3, PI / 2.0, 8.0).unwrap();
        for e in &angular.entries {
            let std_count = standard_negative_count(3, &a, e.lambda).unwrap();
            let sing_count = radial
                .values()
                .iter()
                .filter(|&&v| v + e.lambda < 0.0)
                .count();
            assert_eq!(std_count, sing_count, "at shift {}", e.lambda);
        }
    }

    #[test]
    fn product_eigenfunction_solves_weak_form() {
        // pair (k=1, j: first nontrivial): Ψ = ψ(r) Y(θ) must satisfy the
        // separated weak form with eigenvalue Λ̂₁ + λ₁. The radial defect at
        // Λ̂₁ and the angular defect at λ₁ combine linearly, so both are
        // checked against smooth separated test functions.
        use crate::cap::angular_eigenfunction;
        use crate::quad::simpson_nonuniform;
        let sol = solve_lane_emden(3, 3.0, 1e-10).unwrap();
        let a = sol.linearization();
        let radial = negative_singular_eigenvalues(3, &a, 2, 1e-10).unwrap();
        let theta0 = PI / 2.0;
        let angular = cap_neumann_eigenvalues(3, theta0, 5.0).unwrap();
        let ent = angular.entries.iter().find(|e| e.lambda > 0.0).unwrap();

        // radial part: weak residual of the eigenpair
        let w_rad = radial.weak_residual(&a, 1, |r| r * (1.0 - r), |r| 1.0 - 2.0 * r);
        // angular part: defect of the Rayleigh identity for Y against itself
        let (th, g, dg) = angular_eigenfunction(3, ent.ell.unwrap(), theta0, ent.lambda, 2000).unwrap();
        let q = (ent.ell.unwrap() * (ent.ell.unwrap() + 3 - 3)) as f64;
        let sinp = |t: f64| t.sin();
        let en: Vec<f64> = (0..th.len())
            .map(|i| {
                sinp(th[i]) * dg[i] * dg[i] + q / sinp(th[i]) * g[i] * g[i]
                    - ent.lambda * sinp(th[i]) * g[i] * g[i]
            })
            .collect();
        let nn: Vec<f64> = (0..th.len()).map(|i| sinp(th[i]) * g[i] * g[i]).collect();
        let w_ang = simpson_nonuniform(&th, &en).abs() / simpson_nonuniform(&th, &nn);
        assert!(w_rad < 1e-6, "radial weak residual {w_rad}");
        assert!(w_ang < 1e-6, "angular Rayleigh defect {w_ang}");
    }

    #[test]
    fn no_breaking_for_convex_caps() {
        let half = cap_neumann_eigenvalues(3, PI / 2.0, 5.0).unwrap();
        match symmetry_breaking_threshold(3, &half, 1e-3).unwrap() {
            ThresholdOutcome::NoBreakingDetected { lambda1, bound } => {
                assert_abs_diff_eq!(lambda1, 2.0, epsilon = 1e-8);
                assert_abs_diff_eq!(bound, 2.0);
            }
            ThresholdOutcome::Bracketed(_) => panic!("half sphere must not break"),
        }
    }

    #[test]
    fn threshold_bracket_for_wide_cap() {
        let wide = cap_neumann_eigenvalues(3, 2.5, 5.0).unwrap();
        assert!(wide.lambda1().unwrap() < 2.0);
        match symmetry_breaking_threshold(3, &wide, 5e-3).unwrap() {
            ThresholdOutcome::Bracketed(res) => {
                assert!(res.sum_at_lo > 0.0 && res.sum_at_hi < 0.0);
                assert!(res.bracket.0 < res.p0 && res.p0 < res.bracket.1);
                assert!(res.p0 > 1.0 && res.p0 < 5.0);
                assert!(res.bracket.1 - res.bracket.0 <= 5e-3 * 1.001);
                // sample table covers the sweep
                assert!(res.samples.len() >= 9);
                // observed (not assumed): -Λ̂₁(p) grows toward N-1 along p,
                // so the sums decrease monotonically on the table
                for w in res.samples.windows(2) {
                    assert!(
                        w[1].lambda_hat_1 <= w[0].lambda_hat_1 + 1e-9,
                        "Λ̂₁ not decreasing: {:?} -> {:?}",
                        w[0],
                        w[1]
                    );
                }
            }
            other => panic!("expected a bracket, got {other:?}"),
        }
    }
}
