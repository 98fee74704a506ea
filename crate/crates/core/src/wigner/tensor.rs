use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::ComplexMatrix;
use crate::math::{parity, sqrt};
use crate::specfun::{wigner3j_unchecked, HalfInt};
use crate::states::DensityMatrix;
use crate::{Error, Result};

/// Coefficients `ρ_KQ`, `K = 0..=2j`, `Q = -K..=K`, of an operator in the
/// spherical tensor basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicMatrix {
    n_atoms: usize,
    coeffs: Vec<Complex64>,
}

impl CharacteristicMatrix {
    pub fn zeros(n_atoms: usize) -> Self {
        CharacteristicMatrix { n_atoms, coeffs: vec![Complex64::new(0.0, 0.0); (n_atoms + 1) * (n_atoms + 1)] }
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Largest rank `K = 2j = N`.
    pub fn max_rank(&self) -> usize {
        self.n_atoms
    }

    #[inline]
    fn index(k: usize, q: i64) -> usize {
        ((k * k + k) as i64 + q) as usize
    }

    /// `ρ_KQ`; zero outside `|Q| <= K <= N`.
    #[inline]
    pub fn get(&self, k: usize, q: i64) -> Complex64 {
        if k > self.n_atoms || q.unsigned_abs() as usize > k {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[Self::index(k, q)]
    }

    /// Sets `ρ_KQ`; panics outside `|Q| <= K <= N`.
    pub fn set(&mut self, k: usize, q: i64, value: Complex64) {
        assert!(k <= self.n_atoms && q.unsigned_abs() as usize <= k, "rank/projection out of range");
        self.coeffs[Self::index(k, q)] = value;
    }

    /// `(K, Q, ρ_KQ)` in order of increasing `K`, then `Q`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, Complex64)> + '_ {
        (0..=self.n_atoms).flat_map(move |k| (-(k as i64)..=k as i64).map(move |q| (k, q, self.get(k, q))))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Matrix element `<j,m|T_KQ|j,m-Q> = (-1)^{j-m} sqrt(2K+1) (j K j; -m Q m-Q)`
/// for row index `row = m + j`. Returns 0 when `m - Q` is out of range.
pub fn tensor_coefficient(n_atoms: usize, k: usize, q: i64, row: usize) -> f64 {
    let tj = n_atoms as i64;
    let tm = 2 * row as i64 - tj;
    let tm2 = tm - 2 * q;
    if tm2.abs() > tj || q.unsigned_abs() as usize > k {
        return 0.0;
    }
    let j = HalfInt::from_twice(tj);
    let three_j = wigner3j_unchecked(
        j,
        HalfInt::from_int(k as i64),
        j,
        HalfInt::from_twice(-tm),
        HalfInt::from_int(q),
        HalfInt::from_twice(tm2),
    );
    parity((tj - tm) / 2) * sqrt((2 * k + 1) as f64) * three_j
}

/// Spherical tensor operator `T_KQ` for `N` atoms.
pub fn tensor_operator(n_atoms: usize, k: usize, q: i64) -> Result<ComplexMatrix> {
    if n_atoms < 1 {
        return Err(Error::Domain("the number of atoms must be at least 1".into()));
    }
    if k > n_atoms || q.unsigned_abs() as usize > k {
        return Err(Error::Domain(format!("T_KQ needs |Q| <= K <= 2j = {n_atoms}, got K = {k}, Q = {q}")));
    }
    let mut t = ComplexMatrix::zeros(n_atoms + 1);
    for row in 0..=n_atoms {
        let col = row as i64 - q;
        if (0..=n_atoms as i64).contains(&col) {
            t[(row, col as usize)] = Complex64::new(tensor_coefficient(n_atoms, k, q, row), 0.0);
        }
    }
    Ok(t)
}

/// `A_KQ = Tr(A T†_KQ) = Σ_m <j,m|T_KQ|j,m-Q> A_{m,m-Q}` for any operator.
pub fn operator_characteristic(op: &ComplexMatrix) -> Result<CharacteristicMatrix> {
    let dim = op.dim();
    if dim < 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: dim });
    }
    let n_atoms = dim - 1;
    let mut chi = CharacteristicMatrix::zeros(n_atoms);
    for k in 0..=n_atoms {
        for q in -(k as i64)..=k as i64 {
            let mut s = Complex64::new(0.0, 0.0);
            for row in 0..=n_atoms {
                let col = row as i64 - q;
                if !(0..=n_atoms as i64).contains(&col) {
                    continue;
                }
                let a = op[(row, col as usize)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                s += a * tensor_coefficient(n_atoms, k, q, row);
            }
            chi.set(k, q, s);
        }
    }
    Ok(chi)
}

/// Characteristic matrix `ρ_KQ = Tr(ρ T†_KQ)` of a density matrix.
pub fn characteristic_matrix(rho: &DensityMatrix) -> CharacteristicMatrix {
    operator_characteristic(rho.matrix()).expect("density matrices have dimension N + 1 >= 2")
}

/// Diagonals of `T_K0` for `K = 0..=N` (K-major, `N + 1` entries each).
///
/// `<j,m|T_K0|j,m>` is the degree-`K` polynomial in `m` orthonormal on
/// `m = -j..=j` with positive value at `m = j` (a discrete Chebyshev
/// polynomial), so it obeys `b_{K+1} p_{K+1} = m p_K - b_K p_{K-1}` with
/// `b_K² = K² ((N+1)² - K²) / (4 (4K² - 1))`. For each `m` the recurrence is
/// run upward while `p_K(m)` oscillates (`K <= sqrt((N+1)² - 4m²)`) and
/// downward from `K = N` where it decays, the two pieces joined at the
/// turning point. `O(N²)` work instead of `N²` separate 3j symbols.
pub(crate) fn zonal_diagonals(n_atoms: usize) -> Vec<f64> {
    let dim = n_atoms + 1;
    let j = n_atoms as f64 / 2.0;
    let big = (dim * dim) as f64;
    let b: Vec<f64> = (0..=dim)
        .map(|k| {
            let k = k as f64;
            if k == 0.0 {
                0.0
            } else {
                sqrt(k * k * (big - k * k) / (4.0 * (4.0 * k * k - 1.0)))
            }
        })
        .collect();
    let mut table = vec![0.0; dim * dim];
    let mut col = vec![0.0; dim];
    for i in 0..dim {
        let m = i as f64 - j;
        let turn = (sqrt((big - 4.0 * m * m).max(0.0)) as usize).clamp(1, n_atoms);
        // upward from p_0 = 1/sqrt(N+1)
        col[0] = 1.0 / sqrt(dim as f64);
        if n_atoms >= 1 {
            col[1] = m * col[0] / b[1];
        }
        for k in 1..turn {
            col[k + 1] = (m * col[k] - b[k] * col[k - 1]) / b[k + 1];
        }
        if turn < n_atoms {
            // downward from an unnormalized p_N; b_{N+1} = 0
            let mut down = vec![0.0; dim];
            down[n_atoms] = 1.0;
            down[n_atoms - 1] = m * down[n_atoms] / b[n_atoms];
            for k in (turn..n_atoms).rev() {
                if k == 0 {
                    break;
                }
                down[k - 1] = (m * down[k] - b[k + 1] * down[k + 1]) / b[k];
                // keep the downward values bounded
                if down[k - 1].abs() > 1e150 {
                    down[k - 1..].iter_mut().for_each(|x| *x *= 1e-150);
                }
            }
            // match on whichever of the two overlap points is larger
            let at = if down[turn].abs() >= down[turn - 1].abs() { turn } else { turn - 1 };
            let scale = col[at] / down[at];
            for k in turn + 1..dim {
                col[k] = scale * down[k];
            }
        }
        for k in 0..dim {
            table[k * dim + i] = col[k];
        }
    }
    table
}

/// Characteristic matrix of a state with polar-cat structure: populations
/// `ρ_mm` plus the corner coherence `ρ_{-j,j}`, all other entries zero.
///
/// Only `ρ_{K,0}` and `ρ_{N,±N}` can be nonzero, with
/// `ρ_{N,N} = (-1)^N ρ_{j,-j}`. The coefficient table is built once.
#[derive(Clone, Debug)]
pub struct PolarCatProjector {
    n_atoms: usize,
    diagonal: Vec<f64>,
    top: f64,
    bottom: f64,
}

impl PolarCatProjector {
    pub fn new(n_atoms: usize) -> Result<Self> {
        if n_atoms < 1 {
            return Err(Error::Domain("the number of atoms must be at least 1".into()));
        }
        let diagonal = zonal_diagonals(n_atoms);
        let n = n_atoms as i64;
        Ok(PolarCatProjector {
            n_atoms,
            diagonal,
            top: tensor_coefficient(n_atoms, n_atoms, n, n_atoms),
            bottom: tensor_coefficient(n_atoms, n_atoms, -n, 0),
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// `populations[i] = ρ_mm` for `m = i - j`; `corner = ρ_{-j,j}`.
    pub fn project(&self, populations: &[f64], corner: Complex64) -> CharacteristicMatrix {
        let n = self.n_atoms;
        let dim = n + 1;
        assert_eq!(populations.len(), dim, "population vector length");
        let mut chi = CharacteristicMatrix::zeros(n);
        for k in 0..=n {
            let s: f64 = self.diagonal[k * dim..(k + 1) * dim].iter().zip(populations).map(|(c, p)| c * p).sum();
            chi.set(k, 0, Complex64::new(s, 0.0));
        }
        let nn = n as i64;
        chi.set(n, nn, chi.get(n, nn) + corner.conj() * self.top);
        chi.set(n, -nn, chi.get(n, -nn) + corner * self.bottom);
        chi
    }
}
