//! Closed-form Wigner functions of the polar and nonpolar cat states.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::field::{harmonic_sum, state_prefactor};
use super::grid::{SphereField, SphereGrid};
use super::tensor::CharacteristicMatrix;
use crate::math::{cos, exp, ln, parity, powi, sin, sqrt};
use crate::specfun::{ln_factorial_unchecked as lf, wigner3j_unchecked, zonal_legendre, HalfInt};
use crate::{Error, Result};

fn check_atoms(n_atoms: usize) -> Result<()> {
    if n_atoms < 1 {
        return Err(Error::Domain("the number of atoms must be at least 1".into()));
    }
    Ok(())
}

/// Weights `sqrt(2l+1) N! / sqrt((N-l)! (N+l+1)!)` of the two polar lobes.
fn lobe_weights(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|l| {
            let lg = lf(n as u64) - 0.5 * (lf((n - l) as u64) + lf((n + l + 1) as u64));
            sqrt((2 * l + 1) as f64) * exp(lg)
        })
        .collect()
}

/// `2 sqrt((2N+1)!/4π) (sin θ)^N / (2^N N!)`, in log space.
fn interference_envelope(n: usize, theta: f64) -> f64 {
    let s = sin(theta).abs();
    if s == 0.0 {
        return 0.0;
    }
    let lg = 0.5 * (lf(2 * n as u64 + 1) - ln(4.0 * PI)) + n as f64 * (ln(s) - core::f64::consts::LN_2) - lf(n as u64);
    2.0 * exp(lg)
}

fn polar_point(n: usize, lobes: &[f64], theta: f64, phi: f64) -> f64 {
    let north = zonal_legendre(n, theta);
    let south = zonal_legendre(n, PI - theta);
    let lobe: f64 = lobes.iter().zip(north.iter().zip(&south)).map(|(w, (a, b))| w * (a + b)).sum();
    let fringe = interference_envelope(n, theta) * cos(n as f64 * phi);
    0.5 * state_prefactor(n) * (lobe + fringe)
}

/// Wigner function of the polar cat `(|j,j> + |j,-j>)/sqrt(2)` at `(θ, φ)`.
///
/// Two coherent lobes at the poles plus the interference fringe
/// `∝ (sin θ)^N cos(Nφ)`, which has `N` negative wings along the equator.
pub fn polar_cat_wigner(n_atoms: usize, theta: f64, phi: f64) -> Result<f64> {
    check_atoms(n_atoms)?;
    Ok(polar_point(n_atoms, &lobe_weights(n_atoms), theta, phi))
}

/// [`polar_cat_wigner`] on every node of `grid`.
pub fn polar_cat_field(n_atoms: usize, grid: &SphereGrid) -> Result<SphereField> {
    check_atoms(n_atoms)?;
    let lobes = lobe_weights(n_atoms);
    let values = grid.nodes().map(|(t, p, _)| polar_point(n_atoms, &lobes, t, p)).collect();
    SphereField::new(n_atoms, grid.clone(), values)
}

/// `x^e` for a nonnegative base, with `0^0 = 1`.
fn pow_nonneg(x: f64, e: i64) -> f64 {
    if e == 0 {
        1.0
    } else if x == 0.0 {
        0.0
    } else if e < 64 {
        powi(x, e as i32)
    } else {
        exp(e as f64 * ln(x))
    }
}

/// Harmonic coefficients of the nonpolar cat `|β, 0> + |β, π>`, built term by
/// term from the parity bracket
/// `(-1)^{j-Q-m} + (-1)^{3j+m} + (-1)^{2j} + (-1)^{2j-Q}`.
///
/// Fails when the state is degenerate (`β = π` with odd `N`).
pub fn nonpolar_cat_coefficients(n_atoms: usize, beta: f64) -> Result<CharacteristicMatrix> {
    check_atoms(n_atoms)?;
    if !(0.0..=PI).contains(&beta) {
        return Err(Error::Domain(alloc::format!("β = {beta} outside [0, π]")));
    }
    let n = n_atoms as i64;
    let overlap = pow_nonneg(cos(beta).abs(), n) * if cos(beta) < 0.0 { parity(n) } else { 1.0 };
    let norm = 2.0 * (1.0 + overlap);
    if norm < 1e-14 {
        return Err(Error::DegenerateSuperposition { norm_sqr: norm });
    }
    let (s, c) = (sin(beta / 2.0), cos(beta / 2.0));
    let j = HalfInt::from_twice(n);
    let mut chi = CharacteristicMatrix::zeros(n_atoms);
    for k in 0..=n_atoms {
        let kk = k as i64;
        for q in -kk..=kk {
            let mut sum = 0.0;
            // i = j + m; need 0 <= i + Q <= N
            for i in 0..=n {
                if i + q < 0 || i + q > n {
                    continue;
                }
                let bracket = parity(n - i - q) + parity(n + i) + parity(n) + parity(n - q);
                if bracket == 0.0 {
                    continue;
                }
                let tm = 2 * i - n;
                let three_j = wigner3j_unchecked(
                    j,
                    HalfInt::from_int(kk),
                    j,
                    HalfInt::from_twice(-tm - 2 * q),
                    HalfInt::from_int(q),
                    HalfInt::from_twice(tm),
                );
                if three_j == 0.0 {
                    continue;
                }
                let lg = lf(n as u64)
                    - 0.5 * (lf(i as u64) + lf((n - i) as u64) + lf((i + q) as u64) + lf((n - i - q) as u64));
                sum += bracket * exp(lg) * three_j * pow_nonneg(s, 2 * i + q) * pow_nonneg(c, 2 * (n - i) - q);
            }
            chi.set(k, q, Complex64::new(sqrt((2 * k + 1) as f64) * sum / norm, 0.0));
        }
    }
    Ok(chi)
}

/// Wigner function of the nonpolar cat at `(θ, φ)`.
pub fn nonpolar_cat_wigner(n_atoms: usize, beta: f64, theta: f64, phi: f64) -> Result<f64> {
    let chi = nonpolar_cat_coefficients(n_atoms, beta)?;
    Ok(super::field::wigner_at(&chi, theta, phi))
}

/// [`nonpolar_cat_wigner`] on every node of `grid`.
pub fn nonpolar_cat_field(n_atoms: usize, beta: f64, grid: &SphereGrid) -> Result<SphereField> {
    let chi = nonpolar_cat_coefficients(n_atoms, beta)?;
    let pref = state_prefactor(n_atoms);
    let values = harmonic_sum(&chi, grid).into_iter().map(|z| pref * z.re).collect();
    SphereField::new(n_atoms, grid.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{coherent_state, density_of, nonpolar_cat, polar_cat};
    use crate::wigner::{characteristic_matrix, sphere_grid, wigner_at, wigner_field};

    #[test]
    fn polar_matches_pipeline() {
        for n in 1..=8 {
            let chi = characteristic_matrix(&density_of(&polar_cat(n).unwrap()));
            let g = sphere_grid(n + 2, 2 * n + 3).unwrap();
            let f = polar_cat_field(n, &g).unwrap();
            let generic = wigner_field(&chi, &g).unwrap();
            for (a, b) in f.values().iter().zip(generic.values()) {
                assert!((a - b).abs() < 1e-12, "N = {n}: {a} vs {b}");
            }
            assert!((f.integral() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn polar_has_n_negative_wings() {
        for n in 2..=9usize {
            let samples = 720;
            let signs: Vec<bool> = (0..samples)
                .map(|k| polar_cat_wigner(n, PI / 2.0, 2.0 * PI * (k as f64 + 0.5) / samples as f64).unwrap() < 0.0)
                .collect();
            let wings = (0..samples).filter(|&k| signs[k] && !signs[(k + samples - 1) % samples]).count();
            assert_eq!(wings, n);
        }
    }

    #[test]
    fn nonpolar_matches_pipeline() {
        for n in [1usize, 2, 5] {
            for deg in [0.0f64, 20.0, 45.0, 55.0, 70.0, 90.0, 180.0] {
                let beta = deg.to_radians();
                let Ok(chi) = nonpolar_cat_coefficients(n, beta) else {
                    assert!(n % 2 == 1 && deg == 180.0);
                    continue;
                };
                let generic = characteristic_matrix(&density_of(&nonpolar_cat(n, beta).unwrap()));
                for (k, q, v) in chi.iter() {
                    assert!((v - generic.get(k, q)).norm() < 1e-12, "N={n} β={deg} K={k} Q={q}");
                }
            }
        }
    }

    #[test]
    fn nonpolar_at_zero_is_coherent() {
        let n = 5;
        let a = nonpolar_cat_coefficients(n, 0.0).unwrap();
        let b = characteristic_matrix(&density_of(&coherent_state(n, 0.0, 0.0).unwrap()));
        for (t, p) in [(0.1, 0.2), (1.5, 3.0), (3.0, 5.0)] {
            assert!((wigner_at(&a, t, p) - wigner_at(&b, t, p)).abs() < 1e-13);
        }
    }

    #[test]
    fn nonpolar_at_right_angle_is_rotated_polar() {
        // rotating by π/2 about y maps the z axis onto x: (θ, φ) of the point
        // n' = R n with R(x, y, z) = (z, y, -x) ... checked in Cartesian form
        let n = 5;
        for (t, p) in [(0.4, 0.3), (1.2, 2.0), (2.5, 4.4), (1.0, 5.9)] {
            let (x, y, z) = (sin(t) * cos(p), sin(t) * sin(p), cos(t));
            // inverse rotation applied to the evaluation point
            let (xr, yr, zr) = (-z, y, x);
            let tr = libm::acos(zr.clamp(-1.0, 1.0));
            let pr = libm::atan2(yr, xr);
            let rotated = polar_cat_wigner(n, tr, pr).unwrap();
            let direct = nonpolar_cat_wigner(n, PI / 2.0, t, p).unwrap();
            let flipped = polar_cat_wigner(n, PI - tr, -pr).unwrap();
            assert!(
                (direct - rotated).abs() < 1e-12 || (direct - flipped).abs() < 1e-12,
                "{direct} {rotated} {flipped}"
            );
        }
    }

    #[test]
    fn degenerate_nonpolar_rejected() {
        assert!(matches!(nonpolar_cat_coefficients(3, PI), Err(Error::DegenerateSuperposition { .. })));
        assert!(nonpolar_cat_coefficients(4, PI).is_ok());
        assert!(polar_cat_wigner(0, 0.0, 0.0).is_err());
    }
}
