//! Spectral analysis of radial solutions in spherical sectors and cones.
//!
//! The crate computes, for the Lane-Emden problem in a spherical sector:
//! the positive radial solution and its linearization potential
//! ([`radial`]), the negative singular radial eigenvalues of the linearized
//! operator ([`singular`]), the Neumann Laplace-Beltrami spectrum of a
//! geodesic cap ([`cap`]), and assembles Morse indices and
//! symmetry-breaking thresholds from the two spectra ([`morse`]). The
//! [`bubble`] module covers the critical-exponent limit objects: the
//! standard bubble, the explicit extremal of the singular Rayleigh quotient,
//! and the associated quadratic-form tests.

// NaN-rejecting comparisons of the form !(x > 0.0) are deliberate, and the
// quadrature node tables carry more digits than f64 resolves.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod bubble;
pub mod cap;
pub mod error;
pub mod fd;
pub mod grid;
pub mod morse;
pub mod ode;
pub mod quad;
pub mod radial;
pub mod singular;
pub mod sl;
pub mod tridiag;

pub use error::{Error, Result};
pub use radial::{LinearizedPotential, RadialSolution};

/// Critical Sobolev exponent p_S = (N+2)/(N-2).
pub fn critical_exponent(n_dim: u32) -> f64 {
    (n_dim as f64 + 2.0) / (n_dim as f64 - 2.0)
}

/// Surface measure of the unit sphere S^m ⊂ R^{m+1}.
pub fn unit_sphere_area(m: u32) -> f64 {
    // |S^m| = 2 π^{(m+1)/2} / Γ((m+1)/2), Γ evaluated at integer or
    // half-integer arguments.
    let pi = std::f64::consts::PI;
    if m % 2 == 1 {
        // (m+1)/2 integer
        let k = m.div_ceil(2) as usize;
        let mut gamma = 1.0; // Γ(k) = (k-1)!
        for i in 1..k {
            gamma *= i as f64;
        }
        2.0 * pi.powi(k as i32) / gamma
    } else {
        // (m+1)/2 = k + 1/2 with k = m/2; Γ(k + 1/2) = (2k)! √π / (4^k k!)
        let k = (m / 2) as usize;
        let mut gamma = pi.sqrt();
        for i in 0..k {
            gamma *= i as f64 + 0.5;
        }
        2.0 * pi.powf((m as f64 + 1.0) / 2.0) / gamma
    }
}
