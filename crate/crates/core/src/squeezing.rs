//! Dipole variances and the squeezing measure of the nonpolar cat
//! `|β, 0> + |β, π>`.
//!
//! With `j = N/2` and `c = cos β`:
//!
//! ```text
//! (ΔJx)² = (j/2) (1 + (2j-1) sin²β / (1 + c^{2j}))
//! (ΔJy)² = (j/2) (1 - (2j-1) c^{2j-2} sin²β / (1 + c^{2j}))  = j (1 - S) / 2
//! ```
//!
//! `Jy` is squeezed and `Jx` stretched, except for one atom, at `β = 0`, and
//! at `β = π/2` for `N >= 3`. For `N = 2` the state at `β = π/2` is the
//! `m_x = ±1` cat, whose `Jy` variance is exactly 0.

use core::f64::consts::FRAC_PI_2;

use crate::linalg::ComplexMatrix;
use crate::math::{cos, powi, sin};
use crate::states::{spin_operators, PureState};
use crate::optimize::golden_min;
use crate::{Error, Result};

fn cos_pow(beta: f64, e: usize) -> f64 {
    if e == 0 {
        1.0
    } else {
        powi(cos(beta), e as i32)
    }
}

/// `(ΔJx)²` of the nonpolar cat with `N >= 1` atoms.
pub fn variance_jx(n_atoms: usize, beta: f64) -> f64 {
    let j = n_atoms as f64 / 2.0;
    if n_atoms <= 1 {
        return 0.5 * j;
    }
    let s = sin(beta);
    0.5 * j * (1.0 + (2.0 * j - 1.0) * s * s / (1.0 + cos_pow(beta, n_atoms)))
}

/// `(ΔJy)²` of the nonpolar cat with `N >= 1` atoms.
///
/// For `N = 1` the `2j - 1 = 0` prefactor is applied first, so the
/// `(cos β)^{-1}` factor is never evaluated.
pub fn variance_jy(n_atoms: usize, beta: f64) -> f64 {
    let j = n_atoms as f64 / 2.0;
    if n_atoms <= 1 {
        return 0.5 * j;
    }
    let s = sin(beta);
    0.5 * j * (1.0 - (2.0 * j - 1.0) * cos_pow(beta, n_atoms - 2) * s * s / (1.0 + cos_pow(beta, n_atoms)))
}

/// `S = 1 - 2 (ΔJy)² / j`.
pub fn squeezing_measure(n_atoms: usize, beta: f64) -> f64 {
    if n_atoms <= 1 {
        return 0.0;
    }
    let j = n_atoms as f64 / 2.0;
    1.0 - 2.0 * variance_jy(n_atoms, beta) / j
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezingReport {
    pub n_atoms: usize,
    pub beta: f64,
    pub var_jx: f64,
    pub var_jy: f64,
    pub s_measure: f64,
}

pub fn squeezing_report(n_atoms: usize, beta: f64) -> SqueezingReport {
    SqueezingReport {
        n_atoms,
        beta,
        var_jx: variance_jx(n_atoms, beta),
        var_jy: variance_jy(n_atoms, beta),
        s_measure: squeezing_measure(n_atoms, beta),
    }
}

/// Number of scan points used by [`max_squeezing`] before refinement.
const SCAN_POINTS: usize = 1000;

/// The angle `β_m ∈ (0, π/2]` maximizing `S` and the maximum `S_max`.
///
/// A uniform scan locates the best bracket, which golden-section search then
/// narrows to `1e-10`. One atom never squeezes.
pub fn max_squeezing(n_atoms: usize) -> Result<(f64, f64)> {
    if n_atoms < 2 {
        return Err(Error::NoSqueezing);
    }
    let h = FRAC_PI_2 / SCAN_POINTS as f64;
    let (best, _) = (1..=SCAN_POINTS)
        .map(|k| (k, squeezing_measure(n_atoms, k as f64 * h)))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let lo = (best - 1) as f64 * h;
    let hi = ((best + 1) as f64 * h).min(FRAC_PI_2);
    let (beta, neg) = golden_min(|b| -squeezing_measure(n_atoms, b), lo, hi, 1e-10);
    let end = squeezing_measure(n_atoms, hi);
    if end >= -neg {
        return Ok((hi, end));
    }
    Ok((beta, -neg))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// `<J_a²> - <J_a>²` by direct matrix algebra on the Dicke amplitudes.
pub fn variance_oracle(state: &PureState, axis: Axis) -> Result<f64> {
    let ops = spin_operators(state.n_atoms())?;
    let op: &ComplexMatrix = match axis {
        Axis::X => &ops.jx,
        Axis::Y => &ops.jy,
        Axis::Z => &ops.jz,
    };
    let psi = state.amplitudes();
    let v = op.apply(psi);
    let mean: f64 = psi.iter().zip(&v).map(|(a, b)| (a.conj() * b).re).sum();
    let second: f64 = v.iter().map(|b| b.norm_sqr()).sum();
    Ok(second - mean * mean)
}
