//! Dicke-space states and operators.
//!
//! Amplitudes and matrix entries are indexed by `m + j`: index 0 is the
//! ground state `|j, -j>` and index `N` the fully excited `|j, j>`.
//!
//! Coherent states are parametrized by the polar angle `β` of their Bloch
//! vector **measured from the south pole** and the azimuth `α`, so `β = 0` is
//! the ground state `|j, -j>` and `β = π` is `|j, j>`. The Bloch vector is
//! `n = (sinβ cosα, sinβ sinα, -cosβ)` and the state satisfies
//! `(n·J)|β, α> = j |β, α>`. The stereographic label `τ = tan(β/2) e^{-iα}` is
//! never used internally, so the north pole is regular.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::ComplexMatrix;
use crate::math::{cos, exp, ln, parity, sin, sqrt};
use crate::specfun::{ln_factorial_unchecked as lf, HalfInt};
use crate::{Error, Result};

/// Normalization tolerance of [`PureState`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Below this squared normalization `2(1 + Re<1|2>)` a cat is ill-defined.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A normalized pure state of `N` atoms in the Dicke basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_atoms: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wraps amplitudes `c_m`, `m = -j..=j`, that are already normalized.
    pub fn new(n_atoms: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_atoms(n_atoms)?;
        if amplitudes.len() != n_atoms + 1 {
            return Err(Error::DimensionMismatch { expected: n_atoms + 1, found: amplitudes.len() });
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("norm {norm} differs from 1")));
        }
        Ok(PureState { n_atoms, amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(n_atoms: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        check_atoms(n_atoms)?;
        if amplitudes.len() != n_atoms + 1 {
            return Err(Error::DimensionMismatch { expected: n_atoms + 1, found: amplitudes.len() });
        }
        let norm = sqrt(amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>());
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState(format!("cannot normalize a vector of norm {norm}")));
        }
        for c in &mut amplitudes {
            *c /= norm;
        }
        Ok(PureState { n_atoms, amplitudes })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// `j = N/2`.
    pub fn j(&self) -> HalfInt {
        HalfInt::from_twice(self.n_atoms as i64)
    }

    pub fn dim(&self) -> usize {
        self.n_atoms + 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude of `|j, m>`, or `None` if `m` is out of range.
    pub fn amplitude(&self, m: HalfInt) -> Option<Complex64> {
        let i = (m.twice() + self.n_atoms as i64).checked_div(2)?;
        if (m.twice() + self.n_atoms as i64) % 2 != 0 || i < 0 {
            return None;
        }
        self.amplitudes.get(i as usize).copied()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }
}

fn check_atoms(n_atoms: usize) -> Result<()> {
    if n_atoms < 1 {
        return Err(Error::Domain("the number of atoms must be at least 1".into()));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(-1e-12..=PI + 1e-12).contains(&beta) {
        return Err(Error::Domain(format!("polar angle {beta} outside [0, π]")));
    }
    Ok(())
}

/// Real coherent-state amplitudes `sqrt(C(N,k)) sin^k(β/2) cos^{N-k}(β/2)`,
/// `k = j + m`.
fn coherent_moduli(n_atoms: usize, beta: f64) -> Vec<f64> {
    let s = sin(0.5 * beta);
    let c = cos(0.5 * beta);
    let (ls, lc) = (ln(s.abs()), ln(c.abs()));
    let lfn = lf(n_atoms as u64);
    (0..=n_atoms)
        .map(|k| {
            if (k > 0 && s == 0.0) || (k < n_atoms && c == 0.0) {
                return 0.0;
            }
            let up = if k > 0 { k as f64 * ls } else { 0.0 };
            let down = if k < n_atoms { (n_atoms - k) as f64 * lc } else { 0.0 };
            let l = 0.5 * (lfn - lf(k as u64) - lf((n_atoms - k) as u64)) + up + down;
            // signs of sin/cos only matter outside [0, π]
            let sign = if s < 0.0 { parity(k as i64) } else { 1.0 } * if c < 0.0 { parity((n_atoms - k) as i64) } else { 1.0 };
            sign * exp(l)
        })
        .collect()
}

/// Atomic coherent state `|β, α>`:
/// `c_m = sqrt(C(2j, j+m)) sin^{j+m}(β/2) cos^{j-m}(β/2) e^{-i(j+m)α}`.
pub fn coherent_state(n_atoms: usize, beta: f64, alpha: f64) -> Result<PureState> {
    check_atoms(n_atoms)?;
    check_beta(beta)?;
    let amplitudes = coherent_moduli(n_atoms, beta)
        .into_iter()
        .enumerate()
        .map(|(k, r)| {
            let phase = -(k as f64) * alpha;
            Complex64::new(r * cos(phase), r * sin(phase))
        })
        .collect();
    PureState::normalized(n_atoms, amplitudes)
}

/// `<β1, α1|β2, α2>` in closed form: the single-atom overlap raised to `N`.
pub fn coherent_overlap(n_atoms: usize, beta1: f64, alpha1: f64, beta2: f64, alpha2: f64) -> Result<Complex64> {
    check_atoms(n_atoms)?;
    check_beta(beta1)?;
    check_beta(beta2)?;
    let dphi = alpha1 - alpha2;
    let single = Complex64::new(cos(0.5 * beta1) * cos(0.5 * beta2), 0.0)
        + Complex64::new(cos(dphi), sin(dphi)) * (sin(0.5 * beta1) * sin(0.5 * beta2));
    Ok(single.powu(n_atoms as u32))
}

/// Equal-weight superposition `(|1> + |2>) / sqrt(2(1 + Re<1|2>))` of two
/// coherent states.
pub fn general_cat(n_atoms: usize, beta1: f64, alpha1: f64, beta2: f64, alpha2: f64) -> Result<PureState> {
    let overlap = coherent_overlap(n_atoms, beta1, alpha1, beta2, alpha2)?;
    let norm_sqr = 2.0 * (1.0 + overlap.re);
    if norm_sqr < DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateSuperposition { norm_sqr });
    }
    let a = coherent_state(n_atoms, beta1, alpha1)?;
    let b = coherent_state(n_atoms, beta2, alpha2)?;
    let amplitudes = a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x + y).collect();
    PureState::normalized(n_atoms, amplitudes)
}

/// Nonpolar cat: the superposition of `|β, 0>` and `|β, π>` (`τ2 = -τ1`).
///
/// The two components differ by the phase `(-1)^{j+m}`, so amplitudes with
/// odd `j + m` vanish exactly.
pub fn nonpolar_cat(n_atoms: usize, beta: f64) -> Result<PureState> {
    check_atoms(n_atoms)?;
    check_beta(beta)?;
    let norm_sqr = 2.0 * (1.0 + crate::math::powi(cos(beta), n_atoms as i32));
    if norm_sqr < DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateSuperposition { norm_sqr });
    }
    let amplitudes = coherent_moduli(n_atoms, beta)
        .into_iter()
        .enumerate()
        .map(|(k, r)| if k % 2 == 0 { Complex64::new(2.0 * r, 0.0) } else { ZERO })
        .collect();
    PureState::normalized(n_atoms, amplitudes)
}

/// Polar cat `(|j, j> + |j, -j>)/sqrt(2)`.
pub fn polar_cat(n_atoms: usize) -> Result<PureState> {
    check_atoms(n_atoms)?;
    let mut amplitudes = vec![ZERO; n_atoms + 1];
    let a = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    amplitudes[0] = a;
    amplitudes[n_atoms] = a;
    Ok(PureState { n_atoms, amplitudes })
}

/// Collective angular-momentum matrices in the Dicke basis.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub jx: ComplexMatrix,
    pub jy: ComplexMatrix,
    pub jz: ComplexMatrix,
    pub jplus: ComplexMatrix,
    pub jminus: ComplexMatrix,
}

/// `<j, m±1|J±|j, m> = sqrt(j(j+1) - m(m±1))`.
pub fn spin_operators(n_atoms: usize) -> Result<SpinOperators> {
    check_atoms(n_atoms)?;
    let dim = n_atoms + 1;
    let j = n_atoms as f64 / 2.0;
    let mut jz = ComplexMatrix::zeros(dim);
    let mut jplus = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        let m = i as f64 - j;
        jz[(i, i)] = Complex64::new(m, 0.0);
        if i + 1 < dim {
            jplus[(i + 1, i)] = Complex64::new(sqrt(j * (j + 1.0) - m * (m + 1.0)), 0.0);
        }
    }
    let jminus = jplus.adjoint();
    let jx = (&jplus + &jminus).scale(Complex64::new(0.5, 0.0));
    let jy = (&jplus - &jminus).scale(Complex64::new(0.0, -0.5));
    Ok(SpinOperators { jx, jy, jz, jplus, jminus })
}

/// Density operator in the Dicke basis, `ρ_{m,l} = <j,m|ρ|j,l>`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_atoms: usize,
    elements: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace (1e-12) and positivity (-1e-10).
    pub fn new(n_atoms: usize, elements: ComplexMatrix) -> Result<Self> {
        check_atoms(n_atoms)?;
        if elements.dim() != n_atoms + 1 {
            return Err(Error::DimensionMismatch { expected: n_atoms + 1, found: elements.dim() });
        }
        let defect = elements.hermiticity_defect();
        if defect > 1e-12 {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:e})")));
        }
        let tr = elements.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        if !elements.is_positive_semidefinite(1e-10) {
            return Err(Error::InvalidState("negative eigenvalue below -1e-10".into()));
        }
        Ok(DensityMatrix { n_atoms, elements })
    }

    pub(crate) fn new_unchecked(n_atoms: usize, elements: ComplexMatrix) -> Self {
        DensityMatrix { n_atoms, elements }
    }

    /// `I / (N + 1)`.
    pub fn maximally_mixed(n_atoms: usize) -> Result<Self> {
        check_atoms(n_atoms)?;
        let w = Complex64::new(1.0 / (n_atoms + 1) as f64, 0.0);
        Ok(DensityMatrix { n_atoms, elements: ComplexMatrix::from_diagonal(&vec![w; n_atoms + 1]) })
    }

    /// Diagonal density matrix from populations `ρ_mm` (must sum to 1).
    pub fn from_populations(n_atoms: usize, populations: &[f64]) -> Result<Self> {
        let diag: Vec<Complex64> = populations.iter().map(|&p| Complex64::new(p, 0.0)).collect();
        Self::new(n_atoms, ComplexMatrix::from_diagonal(&diag))
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn j(&self) -> HalfInt {
        HalfInt::from_twice(self.n_atoms as i64)
    }

    pub fn dim(&self) -> usize {
        self.n_atoms + 1
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.elements
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.elements
    }

    /// `ρ_{m,l}` by array index (`m + j`, `l + j`).
    #[inline]
    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.elements[(row, col)]
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.elements[(i, i)].re).collect()
    }
}

/// `|ψ><ψ|`.
pub fn density_of(state: &PureState) -> DensityMatrix {
    DensityMatrix { n_atoms: state.n_atoms, elements: ComplexMatrix::outer(&state.amplitudes, &state.amplitudes) }
}

/// `Tr(ρ A)`.
pub fn expectation(op: &ComplexMatrix, rho: &DensityMatrix) -> Result<Complex64> {
    if op.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: op.dim() });
    }
    Ok(rho.elements.trace_product(op))
}
