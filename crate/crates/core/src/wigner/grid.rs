use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math::acos;
use crate::specfun::gauss_legendre;
use crate::{Error, Result};

/// Product quadrature on the sphere: Gauss-Legendre in `cos θ` times the
/// uniform rule in `φ`.
///
/// With `n_θ` and `n_φ` points it integrates `Y_KQ conj(Y_K'Q')` exactly when
/// `K + K' <= min(2 n_θ - 1, n_φ - 1)`. Nodes are stored with `θ` increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereGrid {
    theta: Vec<f64>,
    theta_weights: Vec<f64>,
    phi: Vec<f64>,
}

/// Builds the `n_θ × n_φ` product grid.
pub fn sphere_grid(n_theta: usize, n_phi: usize) -> Result<SphereGrid> {
    if n_theta == 0 || n_phi == 0 {
        return Err(Error::Domain("sphere grid needs at least one node in each direction".into()));
    }
    let (x, w) = gauss_legendre(n_theta);
    // x increasing means θ decreasing; flip so θ increases.
    let theta = x.iter().rev().map(|&x| acos(x)).collect();
    let theta_weights = w.into_iter().rev().collect();
    let phi = (0..n_phi).map(|k| 2.0 * PI * k as f64 / n_phi as f64).collect();
    Ok(SphereGrid { theta, theta_weights, phi })
}

impl SphereGrid {
    /// Smallest grid on which a product of two degree-`N` fields of `N` atoms
    /// integrates exactly: `(N + 1) × (2N + 1)`.
    pub fn for_product_rule(n_atoms: usize) -> Self {
        sphere_grid(n_atoms + 1, 2 * n_atoms + 1).expect("nonzero sizes")
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi.len()
    }

    pub fn len(&self) -> usize {
        self.n_theta() * self.n_phi()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// Gauss-Legendre weight of the `i`-th `θ` node.
    pub fn theta_weights(&self) -> &[f64] {
        &self.theta_weights
    }

    /// Quadrature weight of node `(i, k)`.
    #[inline]
    pub fn weight(&self, i: usize, k: usize) -> f64 {
        debug_assert!(k < self.n_phi());
        self.theta_weights[i] * 2.0 * PI / self.n_phi() as f64
    }

    /// `(θ, φ, weight)` in θ-major order.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let dphi = 2.0 * PI / self.n_phi() as f64;
        self.theta
            .iter()
            .zip(&self.theta_weights)
            .flat_map(move |(&t, &w)| self.phi.iter().map(move |&p| (t, p, w * dphi)))
    }

    /// `Σ w f(θ, φ)` over all nodes.
    pub fn integrate(&self, mut f: impl FnMut(f64, f64) -> f64) -> f64 {
        self.nodes().map(|(t, p, w)| w * f(t, p)).sum()
    }

    pub(crate) fn same_nodes(&self, other: &SphereGrid) -> bool {
        self.n_theta() == other.n_theta() && self.n_phi() == other.n_phi()
    }
}

/// Real field values on a [`SphereGrid`], θ-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereField {
    n_atoms: usize,
    grid: SphereGrid,
    values: Vec<f64>,
}

impl SphereField {
    pub fn new(n_atoms: usize, grid: SphereGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        Ok(SphereField { n_atoms, grid, values })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.grid.n_phi() + k]
    }

    /// Quadrature of the field over the sphere.
    pub fn integral(&self) -> f64 {
        self.grid.nodes().zip(&self.values).map(|((_, _, w), v)| w * v).sum()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::spherical_harmonic;

    #[test]
    fn weights_sum_to_4pi() {
        for (nt, np) in [(1, 1), (2, 3), (7, 13), (40, 81)] {
            let g = sphere_grid(nt, np).unwrap();
            let s: f64 = g.nodes().map(|(_, _, w)| w).sum();
            assert!((s - 4.0 * PI).abs() < 1e-12);
        }
        assert!(sphere_grid(0, 3).is_err());
    }

    #[test]
    fn small_grid_integrals() {
        let g = sphere_grid(2, 3).unwrap();
        let y00 = g.integrate(|t, p| spherical_harmonic(0, 0, t, p).unwrap().re);
        assert!((y00 - (4.0 * PI).sqrt()).abs() < 1e-13);
        let y11 = g.integrate(|t, p| spherical_harmonic(1, 1, t, p).unwrap().norm_sqr());
        assert!((y11 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn orthonormality_up_to_rank_10() {
        let g = sphere_grid(11, 21).unwrap();
        let pairs: Vec<(i64, i64)> = (0..=10i64).flat_map(|k| (-k..=k).map(move |q| (k, q))).collect();
        // tabulate Y on the nodes once
        let table: Vec<Vec<num_complex::Complex64>> = pairs
            .iter()
            .map(|&(k, q)| g.nodes().map(|(t, p, _)| spherical_harmonic(k, q, t, p).unwrap()).collect())
            .collect();
        let weights: Vec<f64> = g.nodes().map(|(_, _, w)| w).collect();
        for (a, ya) in table.iter().enumerate() {
            for (b, yb) in table.iter().enumerate() {
                let ip: num_complex::Complex64 =
                    ya.iter().zip(yb).zip(&weights).map(|((x, y), w)| x * y.conj() * *w).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ip.re - want).abs() < 1e-10 && ip.im.abs() < 1e-10, "{:?} {:?}", pairs[a], pairs[b]);
            }
        }
    }
}
