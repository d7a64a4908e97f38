//! Finite-volume discretization of Sturm-Liouville forms
//! -(p u')' + q u = λ w u as generalized symmetric-definite tridiagonal
//! pencils A x = λ B x with diagonal B.
//!
//! These pencils are the dense verification oracles for the shooting
//! eigensolvers: an entirely independent route (conservative finite volumes
//! plus Sturm bisection) to the same spectra, accurate to O(h²).

use crate::error::{Error, Result};
use crate::quad::gauss16;
use crate::tridiag;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    /// Value pinned to zero; the node is removed from the unknowns.
    Dirichlet,
    /// Free endpoint (natural/Neumann or a singular end carrying a half cell).
    Natural,
}

/// Assembled pencil: tridiagonal stiffness (diag, off) and diagonal mass.
pub struct SlPencil {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    pub mass: Vec<f64>,
}

/// Assemble the pencil on the strictly increasing `nodes` (endpoints
/// included). Cell integrals of q and w use 16-point Gauss per cell, so
/// integrable endpoint singularities of the coefficients are handled as
/// long as the affected node is Dirichlet.
pub fn assemble_pencil(
    nodes: &[f64],
    p: &dyn Fn(f64) -> f64,
    q: &dyn Fn(f64) -> f64,
    w: &dyn Fn(f64) -> f64,
    left: Endpoint,
    right: Endpoint,
) -> Result<SlPencil> {
    let n = nodes.len();
    if n < 3 {
        return Err(Error::InvalidParameter("pencil needs at least 3 nodes".into()));
    }
    let first = if left == Endpoint::Dirichlet { 1 } else { 0 };
    let last = if right == Endpoint::Dirichlet { n - 2 } else { n - 1 };
    let dof = last + 1 - first;

    // flux coefficients between consecutive nodes
    let kappa: Vec<f64> = (0..n - 1)
        .map(|i| p(0.5 * (nodes[i] + nodes[i + 1])) / (nodes[i + 1] - nodes[i]))
        .collect();

    let cell = |i: usize| -> (f64, f64) {
        let lo = if i == 0 {
            nodes[0]
        } else {
            0.5 * (nodes[i - 1] + nodes[i])
        };
        let hi = if i == n - 1 {
            nodes[n - 1]
        } else {
            0.5 * (nodes[i] + nodes[i + 1])
        };
        (lo, hi)
    };

    let mut diag = vec![0.0; dof];
    let mut off = vec![0.0; dof.saturating_sub(1)];
    let mut mass = vec![0.0; dof];
    for (idx, i) in (first..=last).enumerate() {
        let mut d = 0.0;
        if i > 0 {
            d += kappa[i - 1];
        }
        if i < n - 1 {
            d += kappa[i];
        }
        let (lo, hi) = cell(i);
        d += gauss16(q, lo, hi);
        diag[idx] = d;
        mass[idx] = gauss16(w, lo, hi);
        if i < last {
            off[idx] = -kappa[i];
        }
    }

    if mass.iter().any(|&m| !(m > 0.0) || !m.is_finite())
        || diag.iter().any(|d| !d.is_finite())
        || off.iter().any(|e| !e.is_finite())
    {
        return Err(Error::DegenerateInput("non-finite or non-positive pencil entry".into()));
    }
    Ok(SlPencil { diag, off, mass })
}

impl SlPencil {
    /// Symmetric reduction B^{-1/2} A B^{-1/2}.
    fn to_standard(&self) -> (Vec<f64>, Vec<f64>) {
        let d: Vec<f64> = self
            .diag
            .iter()
            .zip(&self.mass)
            .map(|(&a, &m)| a / m)
            .collect();
        let e: Vec<f64> = self
            .off
            .iter()
            .enumerate()
            .map(|(i, &o)| o / (self.mass[i] * self.mass[i + 1]).sqrt())
            .collect();
        (d, e)
    }

    /// Generalized eigenvalues strictly below `bound`, increasing.
    pub fn eigenvalues_below(&self, bound: f64) -> Vec<f64> {
        let (d, e) = self.to_standard();
        tridiag::eigenvalues_below(&d, &e, bound)
    }

    /// The k smallest generalized eigenvalues, increasing.
    pub fn smallest_eigenvalues(&self, k: usize) -> Vec<f64> {
        let (d, e) = self.to_standard();
        tridiag::smallest_eigenvalues(&d, &e, k)
    }

    pub fn count_below(&self, bound: f64) -> usize {
        let (d, e) = self.to_standard();
        tridiag::count_below(&d, &e, bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::uniform_nodes;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn laplace_dirichlet(n: usize) -> Vec<f64> {
        let nodes = uniform_nodes(0.0, 1.0, n);
        let pencil = assemble_pencil(
            &nodes,
            &|_| 1.0,
            &|_| 0.0,
            &|_| 1.0,
            Endpoint::Dirichlet,
            Endpoint::Dirichlet,
        )
        .unwrap();
        pencil.smallest_eigenvalues(3)
    }

    #[test]
    fn dirichlet_laplacian_eigenvalues() {
        let ev = laplace_dirichlet(800);
        for (k, &v) in ev.iter().enumerate() {
            let exact = ((k + 1) as f64 * PI).powi(2);
            assert_abs_diff_eq!(v, exact, epsilon = 2e-4 * exact);
        }
    }

    #[test]
    fn richardson_order_two() {
        let exact = PI * PI;
        let e1 = (laplace_dirichlet(400)[0] - exact).abs();
        let e2 = (laplace_dirichlet(800)[0] - exact).abs();
        let rate = e1 / e2;
        assert!((3.0..5.0).contains(&rate), "rate {rate}");
    }

    #[test]
    fn mixed_neumann_end() {
        // -u'' = λu, u(0)=0, u'(1)=0: λ_k = ((k - 1/2) π)^2
        let nodes = uniform_nodes(0.0, 1.0, 1000);
        let pencil = assemble_pencil(
            &nodes,
            &|_| 1.0,
            &|_| 0.0,
            &|_| 1.0,
            Endpoint::Dirichlet,
            Endpoint::Natural,
        )
        .unwrap();
        let ev = pencil.smallest_eigenvalues(2);
        assert_abs_diff_eq!(ev[0], (0.5 * PI).powi(2), epsilon = 1e-4);
        assert_abs_diff_eq!(ev[1], (1.5 * PI).powi(2), epsilon = 1e-3);
    }

    #[test]
    fn radial_ball_laplacian_natural_origin() {
        // -(r² ψ')' = Λ r² ψ, ψ(1)=0, free at r=0. Eigenfunctions
        // sin(kπr)/r, so Λ_k = (kπ)².
        let nodes = uniform_nodes(0.0, 1.0, 1200);
        let pencil = assemble_pencil(
            &nodes,
            &|r| r * r,
            &|_| 0.0,
            &|r| r * r,
            Endpoint::Natural,
            Endpoint::Dirichlet,
        )
        .unwrap();
        let ev = pencil.smallest_eigenvalues(2);
        assert_abs_diff_eq!(ev[0], PI * PI, epsilon = 3e-4 * PI / PI);
        assert_abs_diff_eq!(ev[1], 4.0 * PI * PI, epsilon = 2e-3 * 4.0 * PI * PI);
    }

    #[test]
    fn rejects_bad_mass() {
        let nodes = uniform_nodes(0.0, 1.0, 10);
        let r = assemble_pencil(
            &nodes,
            &|_| 1.0,
            &|_| 0.0,
            &|_| -1.0,
            Endpoint::Dirichlet,
            Endpoint::Dirichlet,
        );
        assert!(r.is_err());
    }
}
