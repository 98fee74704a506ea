use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::grid::{SphereField, SphereGrid};
use super::tensor::{operator_characteristic, CharacteristicMatrix};
use crate::linalg::ComplexMatrix;
use crate::math::{cos, sin, sqrt};
use crate::specfun::LegendreTable;
use crate::{Error, Result};

/// `sqrt((2j+1)/4π)`.
#[inline]
pub(crate) fn state_prefactor(n_atoms: usize) -> f64 {
    sqrt((n_atoms + 1) as f64 / (4.0 * PI))
}

/// `Σ_KQ c_KQ Y_KQ(θ, φ)` on every node of `grid`, θ-major.
pub(crate) fn harmonic_sum(chi: &CharacteristicMatrix, grid: &SphereGrid) -> Vec<Complex64> {
    let n = chi.max_rank();
    let n_phi = grid.n_phi();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    // e^{iQφ} for Q = -N..=N on every φ node
    let phases: Vec<Complex64> = grid
        .phi()
        .iter()
        .flat_map(|&p| (-(n as i64)..=n as i64).map(move |q| Complex64::new(cos(q as f64 * p), sin(q as f64 * p))))
        .collect();
    let width = 2 * n + 1;
    let mut radial = vec![Complex64::new(0.0, 0.0); width];
    for (i, &theta) in grid.theta().iter().enumerate() {
        let table = LegendreTable::new(n, theta);
        fill_radial(chi, &table, &mut radial);
        for k in 0..n_phi {
            let ph = &phases[k * width..(k + 1) * width];
            out[i * n_phi + k] = radial.iter().zip(ph).map(|(g, e)| g * e).sum();
        }
    }
    out
}

/// `g_Q(θ) = Σ_K c_KQ P̄_K^Q(cos θ)` with the sign of negative `Q` folded in.
fn fill_radial(chi: &CharacteristicMatrix, table: &LegendreTable, radial: &mut [Complex64]) {
    let n = chi.max_rank() as i64;
    for q in -n..=n {
        let mut g = Complex64::new(0.0, 0.0);
        for k in q.unsigned_abs() as usize..=n as usize {
            g += chi.get(k, q) * table.signed(k, q);
        }
        radial[(q + n) as usize] = g;
    }
}

fn point_sum(chi: &CharacteristicMatrix, theta: f64, phi: f64) -> Complex64 {
    let n = chi.max_rank();
    let table = LegendreTable::new(n, theta);
    let mut radial = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    fill_radial(chi, &table, &mut radial);
    radial
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let q = i as f64 - n as f64;
            g * Complex64::new(cos(q * phi), sin(q * phi))
        })
        .sum()
}

fn check_resolution(n_atoms: usize, grid: &SphereGrid) -> Result<()> {
    // degree 2j: n_θ >= j + 1, n_φ >= 2j + 1
    let min_theta = (n_atoms + 2).div_ceil(2);
    let min_phi = n_atoms + 1;
    if grid.n_theta() < min_theta || grid.n_phi() < min_phi {
        return Err(Error::Resolution { n_theta: grid.n_theta(), n_phi: grid.n_phi(), min_theta, min_phi });
    }
    Ok(())
}

/// Wigner function of a state on the nodes of `grid`.
///
/// The imaginary residue of the harmonic sum must stay below
/// `1e-10 (1 + max|W|)`, which holds for every Hermitian `ρ`.
pub fn wigner_field(chi: &CharacteristicMatrix, grid: &SphereGrid) -> Result<SphereField> {
    let n = chi.n_atoms();
    check_resolution(n, grid)?;
    let pref = state_prefactor(n);
    let sums = harmonic_sum(chi, grid);
    let scale = 1.0 + sums.iter().map(|z| pref * z.re.abs()).fold(0.0, f64::max);
    let residue = sums.iter().map(|z| pref * z.im.abs()).fold(0.0, f64::max);
    if residue > 1e-10 * scale {
        return Err(Error::InvalidState(alloc::format!(
            "Wigner sum has imaginary residue {residue:e}; characteristic matrix is not Hermitian"
        )));
    }
    SphereField::new(n, grid.clone(), sums.into_iter().map(|z| pref * z.re).collect())
}

/// Wigner function of a state at a single point.
pub fn wigner_at(chi: &CharacteristicMatrix, theta: f64, phi: f64) -> f64 {
    state_prefactor(chi.n_atoms()) * point_sum(chi, theta, phi).re
}

/// Real and imaginary parts of an operator's Wigner function.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorField {
    pub re: SphereField,
    pub im: SphereField,
}

/// Wigner function `W_A = Σ_KQ A_KQ Y_KQ` of an arbitrary operator.
///
/// Hermitian operators give a vanishing imaginary part.
pub fn operator_wigner(op: &ComplexMatrix, grid: &SphereGrid) -> Result<OperatorField> {
    let chi = operator_characteristic(op)?;
    let n = chi.n_atoms();
    check_resolution(n, grid)?;
    let sums = harmonic_sum(&chi, grid);
    Ok(OperatorField {
        re: SphereField::new(n, grid.clone(), sums.iter().map(|z| z.re).collect())?,
        im: SphereField::new(n, grid.clone(), sums.iter().map(|z| z.im).collect())?,
    })
}

/// `Tr(ρA) = sqrt(4π/(2j+1)) ∫ W_ρ W_A dΩ`.
///
/// Both fields must share a grid exact to degree `4j`
/// (`n_θ >= 2j + 1`, `n_φ >= 4j + 1`).
pub fn product_rule_expectation(w_rho: &SphereField, w_op: &SphereField) -> Result<f64> {
    if w_rho.n_atoms() != w_op.n_atoms() || !w_rho.grid().same_nodes(w_op.grid()) {
        return Err(Error::GridMismatch);
    }
    let n = w_rho.n_atoms();
    let grid = w_rho.grid();
    if grid.n_theta() < n + 1 || grid.n_phi() < 2 * n + 1 {
        return Err(Error::Resolution {
            n_theta: grid.n_theta(),
            n_phi: grid.n_phi(),
            min_theta: n + 1,
            min_phi: 2 * n + 1,
        });
    }
    let s: f64 = grid
        .nodes()
        .zip(w_rho.values().iter().zip(w_op.values()))
        .map(|((_, _, w), (a, b))| w * a * b)
        .sum();
    Ok(sqrt(4.0 * PI / (n + 1) as f64) * s)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{coherent_state, density_of, polar_cat, spin_operators};
    use crate::wigner::grid::sphere_grid;
    use crate::states::DensityMatrix;
    use crate::wigner::characteristic_matrix;

    fn density_field(rho: &DensityMatrix, grid: &SphereGrid) -> Result<SphereField> {
        wigner_field(&characteristic_matrix(rho), grid)
    }

    #[test]
    fn maximally_mixed_is_flat() {
        for n in 1..6 {
            let rho = DensityMatrix::maximally_mixed(n).unwrap();
            let f = density_field(&rho, &SphereGrid::for_product_rule(n)).unwrap();
            for v in f.values() {
                assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-14);
            }
            assert!((f.integral() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn resolution_is_checked() {
        let rho = density_of(&polar_cat(6).unwrap());
        assert!(matches!(density_field(&rho, &sphere_grid(3, 7).unwrap()), Err(Error::Resolution { .. })));
        assert!(density_field(&rho, &sphere_grid(4, 7).unwrap()).is_ok());
    }

    #[test]
    fn identity_and_jz_fields() {
        let g = SphereGrid::for_product_rule(1);
        let w = operator_wigner(&ComplexMatrix::identity(2), &g).unwrap();
        for v in w.re.values() {
            assert!((v - sqrt(2.0 / (4.0 * PI))).abs() < 1e-15);
        }
        let jz = spin_operators(1).unwrap().jz;
        let w = operator_wigner(&jz, &g).unwrap();
        // proportional to cos θ
        let ratio = w.re.value(0, 0) / cos(g.theta()[0]);
        for (i, &t) in g.theta().iter().enumerate() {
            for k in 0..g.n_phi() {
                assert!((w.re.value(i, k) - ratio * cos(t)).abs() < 1e-14);
                assert!(w.im.value(i, k).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn product_rule_examples() {
        let n = 4;
        let g = SphereGrid::for_product_rule(n);
        let ops = spin_operators(n).unwrap();
        let rho = density_of(&coherent_state(n, PI / 3.0, 0.0).unwrap());
        let wr = density_field(&rho, &g).unwrap();
        let wx = operator_wigner(&ops.jx, &g).unwrap().re;
        let got = product_rule_expectation(&wr, &wx).unwrap();
        assert!((got - 2.0 * sin(PI / 3.0)).abs() < 1e-9, "{got}");
        let wz = operator_wigner(&ops.jz, &g).unwrap().re;
        let got = product_rule_expectation(&wr, &wz).unwrap();
        assert!((got + 2.0 * cos(PI / 3.0)).abs() < 1e-9);
        let wi = operator_wigner(&ComplexMatrix::identity(n + 1), &g).unwrap().re;
        assert!((product_rule_expectation(&wr, &wi).unwrap() - 1.0).abs() < 1e-12);

        let cat = density_of(&polar_cat(5).unwrap());
        let g5 = SphereGrid::for_product_rule(5);
        let wc = density_field(&cat, &g5).unwrap();
        let wz5 = operator_wigner(&spin_operators(5).unwrap().jz, &g5).unwrap().re;
        assert!(product_rule_expectation(&wc, &wz5).unwrap().abs() < 1e-12);

        assert!(matches!(product_rule_expectation(&wc, &wz), Err(Error::GridMismatch)));
        let coarse = sphere_grid(4, 9).unwrap();
        let a = density_field(&rho, &coarse).unwrap();
        let b = operator_wigner(&ops.jz, &coarse).unwrap().re;
        assert!(matches!(product_rule_expectation(&a, &b), Err(Error::Resolution { .. })));
    }

    #[test]
    fn point_and_grid_evaluation_agree() {
        let rho = density_of(&coherent_state(3, 1.1, 0.4).unwrap());
        let chi = characteristic_matrix(&rho);
        let g = sphere_grid(5, 9).unwrap();
        let f = wigner_field(&chi, &g).unwrap();
        for (i, &t) in g.theta().iter().enumerate() {
            for (k, &p) in g.phi().iter().enumerate() {
                assert!((f.value(i, k) - wigner_at(&chi, t, p)).abs() < 1e-14);
            }
        }
    }
}
