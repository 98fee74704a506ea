use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::math::{cos, parity, sin, sqrt};
use crate::{Error, Result};

/// Fully normalized associated Legendre functions `P̄_l^m(cos θ)` for
/// `0 <= m <= l <= l_max`, including the Condon-Shortley phase and the
/// `1/sqrt(4π)` factor, so that `Y_lm(θ, φ) = P̄_l^m(cos θ) e^{imφ}`.
///
/// Built with the three-term upward recurrence in degree, which stays finite
/// for `l_max` in the thousands.
#[derive(Clone, Debug)]
pub struct LegendreTable {
    l_max: usize,
    values: Vec<f64>,
}

impl LegendreTable {
    pub fn new(l_max: usize, theta: f64) -> Self {
        let x = cos(theta);
        let s = sin(theta);
        let mut values = vec![0.0; (l_max + 1) * (l_max + 2) / 2];
        let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;

        let mut pmm = 1.0 / sqrt(4.0 * PI);
        for m in 0..=l_max {
            if m > 0 {
                pmm *= -sqrt((2 * m + 1) as f64 / (2 * m) as f64) * s;
            }
            values[idx(m, m)] = pmm;
            if m == l_max {
                break;
            }
            let mut prev2 = pmm;
            let mut prev1 = sqrt((2 * m + 3) as f64) * x * pmm;
            values[idx(m + 1, m)] = prev1;
            let mut a_prev = sqrt((2 * m + 3) as f64);
            for l in (m + 2)..=l_max {
                let (lf, mf) = (l as f64, m as f64);
                let a = sqrt((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf));
                let p = a * (x * prev1 - prev2 / a_prev);
                values[idx(l, m)] = p;
                prev2 = prev1;
                prev1 = p;
                a_prev = a;
            }
        }
        LegendreTable { l_max, values }
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// `P̄_l^m`; requires `m <= l <= l_max`.
    #[inline]
    pub fn get(&self, l: usize, m: usize) -> f64 {
        debug_assert!(m <= l && l <= self.l_max);
        self.values[l * (l + 1) / 2 + m]
    }

    /// `Y_lq(θ, 0)` for signed `q`, using `Y_{l,-q} = (-1)^q conj(Y_{lq})`.
    #[inline]
    pub fn signed(&self, l: usize, q: i64) -> f64 {
        let m = q.unsigned_abs() as usize;
        let v = self.get(l, m);
        if q < 0 {
            parity(q) * v
        } else {
            v
        }
    }
}

/// Zonal column `P̄_l^0(cos θ)` for `l = 0..=l_max`, in `O(l_max)` work.
pub fn zonal_legendre(l_max: usize, theta: f64) -> Vec<f64> {
    let x = cos(theta);
    let mut out = Vec::with_capacity(l_max + 1);
    out.push(1.0 / sqrt(4.0 * PI));
    if l_max == 0 {
        return out;
    }
    out.push(sqrt(3.0) * x * out[0]);
    let mut a_prev = sqrt(3.0);
    for l in 2..=l_max {
        let lf = l as f64;
        let a = sqrt((4.0 * lf * lf - 1.0) / (lf * lf));
        let p = a * (x * out[l - 1] - out[l - 2] / a_prev);
        out.push(p);
        a_prev = a;
    }
    out
}

/// Sectoral value `P̄_l^l(cos θ)`.
pub fn sectoral_legendre(l: usize, theta: f64) -> f64 {
    let s = sin(theta);
    let mut p = 1.0 / sqrt(4.0 * PI);
    for m in 1..=l {
        p *= -sqrt((2 * m + 1) as f64 / (2 * m) as f64) * s;
    }
    p
}

/// Single normalized associated Legendre value `P̄_l^m(cos θ)`.
pub fn normalized_legendre(l: usize, m: usize, theta: f64) -> f64 {
    LegendreTable::new(l, theta).get(l, m)
}

/// Orthonormal spherical harmonic `Y_KQ(θ, φ)` with the Condon-Shortley phase.
pub fn spherical_harmonic(k: i64, q: i64, theta: f64, phi: f64) -> Result<Complex64> {
    if k < 0 || q.abs() > k {
        return Err(Error::Domain(format!("spherical harmonic needs |Q| <= K, got K = {k}, Q = {q}")));
    }
    let table = LegendreTable::new(k as usize, theta);
    let r = table.signed(k as usize, q);
    let arg = q as f64 * phi;
    Ok(Complex64::new(r * cos(arg), r * sin(arg)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zonal_and_sectoral_match_table() {
        for &t in &[0.0, 0.3, 1.2, PI / 2.0, 2.9, PI] {
            let table = LegendreTable::new(40, t);
            let z = zonal_legendre(40, t);
            for l in 0..=40 {
                assert!((z[l] - table.get(l, 0)).abs() < 1e-13);
                assert!((sectoral_legendre(l, t) - table.get(l, l)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn low_order_values() {
        let y00 = spherical_harmonic(0, 0, 1.1, 0.3).unwrap();
        assert!((y00.re - 0.28209479177387814).abs() < 1e-16 && y00.im == 0.0);
        let y10 = spherical_harmonic(1, 0, 0.0, 0.0).unwrap();
        assert!((y10.re - 0.4886025119029199).abs() < 1e-15);
        // Y_11 = -sqrt(3/8π) sinθ e^{iφ}
        let (t, p) = (0.7, 1.3);
        let y11 = spherical_harmonic(1, 1, t, p).unwrap();
        let want = -sqrt(3.0 / (8.0 * PI)) * sin(t);
        assert!((y11.re - want * cos(p)).abs() < 1e-15);
        assert!((y11.im - want * sin(p)).abs() < 1e-15);
        // Y_20 = sqrt(5/16π)(3cos²θ − 1)
        let y20 = spherical_harmonic(2, 0, t, p).unwrap();
        assert!((y20.re - sqrt(5.0 / (16.0 * PI)) * (3.0 * cos(t) * cos(t) - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn y55_on_the_equator() {
        // Y_55(π/2, π/5) = (3/32) sqrt(77/π), frozen from a 50-digit evaluation
        // of -(3/32) sqrt(77/π) sin^5θ e^{5iφ}.
        let y = spherical_harmonic(5, 5, PI / 2.0, PI / 5.0).unwrap();
        assert!((y.re - 0.46413220344085816).abs() < 1e-12, "{y}");
        assert!(y.im.abs() < 1e-12);
    }

    #[test]
    fn domain_error() {
        assert!(spherical_harmonic(2, 3, 0.1, 0.1).is_err());
        assert!(spherical_harmonic(-1, 0, 0.1, 0.1).is_err());
    }

    #[test]
    fn high_degree_stays_finite() {
        let t = LegendreTable::new(2000, 0.3);
        for l in (0..=2000).step_by(97) {
            for m in (0..=l).step_by(31) {
                assert!(t.get(l, m).is_finite());
            }
        }
        // sum_m |Y_lm|^2 = (2l+1)/4π (addition theorem)
        let l = 1000;
        let s: f64 = t.get(l, 0).powi(2) + 2.0 * (1..=l).map(|m| t.get(l, m).powi(2)).sum::<f64>();
        assert!((s - (2 * l + 1) as f64 / (4.0 * PI)).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn conjugation_symmetry(k in 0i64..=20, qf in 0.0f64..1.0, theta in 0.0..PI, phi in 0.0..(2.0 * PI)) {
            let q = (qf * (k as f64 + 1.0)) as i64;
            let q = q.min(k);
            let plus = spherical_harmonic(k, q, theta, phi).unwrap();
            let minus = spherical_harmonic(k, -q, theta, phi).unwrap();
            let want = plus.conj() * parity(q);
            prop_assert!((minus - want).norm() < 1e-13);
        }
    }
}
