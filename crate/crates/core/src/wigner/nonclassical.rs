//! The non-classicality measure `ν` and the `φ = π/N` section minimum.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::field::{state_prefactor, wigner_field};
use super::grid::{sphere_grid, SphereField};
use super::tensor::CharacteristicMatrix;
use crate::math::{acos, cos, sin};
use crate::optimize::golden_min;
use crate::specfun::{gauss_legendre, sectoral_legendre, zonal_legendre};
use crate::{Error, Result};

/// A field counts as non-negative when `min W > -NEGATIVITY_THRESHOLD · max|W|`.
pub const NEGATIVITY_THRESHOLD: f64 = 1e-9;

/// Convergence target for [`nonclassicality_adaptive`].
const NU_TOLERANCE: f64 = 1e-6;
const MAX_OVERSAMPLE: usize = 64;

#[inline]
fn nu_from_negative_volume(i_minus: f64) -> f64 {
    2.0 * i_minus / (2.0 * i_minus + 1.0)
}

/// `ν = 2I₋/(2I₋ + 1)` from the quadrature of the negative part of a
/// unit-trace Wigner field.
///
/// Fields whose minimum lies above the relative noise floor give exactly 0.
pub fn nonclassicality(field: &SphereField) -> f64 {
    if field.min() > -NEGATIVITY_THRESHOLD * field.max_abs() {
        return 0.0;
    }
    let grid = field.grid();
    let i_minus: f64 = grid.nodes().zip(field.values()).map(|((_, _, w), v)| w * (-v).max(0.0)).sum();
    nu_from_negative_volume(i_minus)
}

/// Result of [`nonclassicality_adaptive`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NuEstimate {
    pub nu: f64,
    /// `|ν(last) - ν(previous)|` between the last two refinements.
    pub change: f64,
    pub converged: bool,
    /// Number of `θ` nodes of the final quadrature.
    pub n_theta: usize,
    /// Number of `φ` nodes; `None` when the azimuthal integral was done in
    /// closed form (polar-cat structure).
    pub n_phi: Option<usize>,
}

/// `ν` with an error check.
///
/// States with polar-cat structure (only `ρ_K0` and `ρ_{N,±N}`) are
/// integrated exactly in `φ` and with panel Gauss-Legendre in `cos θ`.
/// Otherwise the field is sampled on the product grid oversampled 4×, 8×, …
/// relative to `(N+1) × (2N+1)` until two successive values differ by less
/// than 1e-6 (at most 64×).
pub fn nonclassicality_adaptive(chi: &CharacteristicMatrix) -> Result<NuEstimate> {
    if has_polar_structure(chi) {
        return Ok(azimuthal_nu(chi));
    }
    let n = chi.n_atoms();
    let at = |factor: usize| -> Result<f64> {
        let grid = sphere_grid(factor * (n + 1), factor * (2 * n + 1))?;
        Ok(nonclassicality(&wigner_field(chi, &grid)?))
    };
    let mut factor = 4;
    let mut prev = at(factor)?;
    loop {
        factor *= 2;
        let nu = at(factor)?;
        let change = (nu - prev).abs();
        let converged = change < NU_TOLERANCE;
        if converged || factor >= MAX_OVERSAMPLE {
            return Ok(NuEstimate {
                nu,
                change,
                converged,
                n_theta: factor * (n + 1),
                n_phi: Some(factor * (2 * n + 1)),
            });
        }
        prev = nu;
    }
}

fn has_polar_structure(chi: &CharacteristicMatrix) -> bool {
    let n = chi.max_rank() as i64;
    let floor = 1e-14 * chi.max_abs();
    chi.iter().all(|(k, q, v)| q == 0 || (k as i64 == n && q.abs() == n) || v.norm() <= floor)
}

/// `W(θ, φ) = A(θ) + B(θ) cos(Nφ + δ)` for a polar-structured state.
struct PolarProfile {
    n: usize,
    pref: f64,
    zonal: Vec<f64>,
    /// `2|ρ_NN|`, and the phase `δ` of `ρ_NN` with the sign of `P̄_N^N`.
    fringe: f64,
    phase: f64,
}

impl PolarProfile {
    fn new(chi: &CharacteristicMatrix) -> Self {
        let n = chi.max_rank();
        let c = chi.get(n, n as i64);
        PolarProfile {
            n,
            pref: state_prefactor(chi.n_atoms()),
            zonal: (0..=n).map(|k| chi.get(k, 0).re).collect(),
            fringe: 2.0 * c.norm(),
            phase: c.arg(),
        }
    }

    /// `(A(θ), B(θ))` with `B` signed.
    fn at(&self, theta: f64) -> (f64, f64) {
        let p = zonal_legendre(self.n, theta);
        let a: f64 = self.zonal.iter().zip(&p).map(|(c, y)| c * y).sum();
        let b = if self.n == 0 { 0.0 } else { self.fringe * sectoral_legendre(self.n, theta) };
        (self.pref * a, self.pref * b)
    }

    fn value(&self, theta: f64, phi: f64) -> f64 {
        let (a, b) = self.at(theta);
        a + b * cos(self.n as f64 * phi + self.phase)
    }
}

/// `∫_0^{2π} max(-(A + B cos u), 0) du`.
fn negative_arc(a: f64, b: f64) -> f64 {
    let b = b.abs();
    if b == 0.0 {
        return 2.0 * PI * (-a).max(0.0);
    }
    let c = -a / b;
    if c >= 1.0 {
        2.0 * PI * -a
    } else if c <= -1.0 {
        0.0
    } else {
        let u0 = acos(c);
        -a * (2.0 * PI - 2.0 * u0) + 2.0 * b * sin(u0)
    }
}

fn azimuthal_nu(chi: &CharacteristicMatrix) -> NuEstimate {
    let profile = PolarProfile::new(chi);
    let (x16, w16) = gauss_legendre(16);
    let panel_rule = |panels: usize| -> (f64, f64, f64) {
        // (I₋, min W, max|W|) over the nodes
        let (mut i_minus, mut min_w, mut max_abs) = (0.0, f64::INFINITY, 0.0f64);
        let h = 2.0 / panels as f64;
        for p in 0..panels {
            let lo = -1.0 + p as f64 * h;
            for (x, w) in x16.iter().zip(&w16) {
                let theta = acos((lo + 0.5 * h * (x + 1.0)).clamp(-1.0, 1.0));
                let (a, b) = profile.at(theta);
                i_minus += 0.5 * h * w * negative_arc(a, b);
                min_w = min_w.min(a - b.abs());
                max_abs = max_abs.max(a.abs() + b.abs());
            }
        }
        (i_minus, min_w, max_abs)
    };
    let nu_of = |(i_minus, min_w, max_abs): (f64, f64, f64)| {
        if min_w > -NEGATIVITY_THRESHOLD * max_abs {
            0.0
        } else {
            nu_from_negative_volume(i_minus)
        }
    };
    let mut panels = 8;
    let mut prev = nu_of(panel_rule(panels));
    loop {
        panels *= 2;
        let nu = nu_of(panel_rule(panels));
        let change = (nu - prev).abs();
        let converged = change < 1e-10;
        if converged || panels >= 4096 {
            return NuEstimate { nu, change, converged, n_theta: 16 * panels, n_phi: None };
        }
        prev = nu;
    }
}

/// Minimum of the Wigner function on the meridian `φ = π/N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectionMinimum {
    pub theta: f64,
    pub value: f64,
    /// Largest `|W|` seen while sampling the section.
    pub max_abs: f64,
}

impl SectionMinimum {
    /// Whether the minimum clears the relative negativity threshold.
    pub fn is_nonnegative(&self) -> bool {
        self.value > -NEGATIVITY_THRESHOLD * self.max_abs
    }
}

/// Minimum over `θ` of `W(θ, π/N)` for a state with polar-cat structure.
///
/// Samples `max(32N, 64)` points, then refines the best bracket by
/// golden-section search. Characteristic matrices with any other nonzero
/// entries are rejected; use the full field minimum for those.
pub fn min_section(chi: &CharacteristicMatrix) -> Result<SectionMinimum> {
    if !has_polar_structure(chi) {
        return Err(Error::Precondition(
            "min_section needs polar-cat structure (only ρ_K0 and ρ_{N,±N} nonzero)".into(),
        ));
    }
    let profile = PolarProfile::new(chi);
    let n = chi.n_atoms();
    let phi = PI / n as f64;
    let samples = (32 * n).max(64);
    let h = PI / samples as f64;
    let mut best = (0, f64::INFINITY);
    let mut max_abs = 0.0f64;
    for i in 0..=samples {
        let w = profile.value(i as f64 * h, phi);
        max_abs = max_abs.max(w.abs());
        if w < best.1 {
            best = (i, w);
        }
    }
    let f = |t: f64| profile.value(t, phi);
    let lo = (best.0 as f64 - 1.0).max(0.0) * h;
    let hi = ((best.0 + 1) as f64 * h).min(PI);
    let (theta, value) = golden_min(f, lo, hi, 1e-12);
    let (theta, value) = if value < best.1 { (theta, value) } else { (best.0 as f64 * h, best.1) };
    Ok(SectionMinimum { theta, value, max_abs })
}
