//! The master equation in the Dicke basis and its integration.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::analytic::{corner_rate, energy};
use super::ode::{Dopri5, EvolveOptions, OdeSystem};
use super::BathParams;
use crate::linalg::ComplexMatrix;
use crate::math::{exp, sqrt};
use crate::states::DensityMatrix;
use crate::wigner::{
    characteristic_matrix, nonclassicality_adaptive, CharacteristicMatrix, PolarCatProjector,
};
use crate::{Error, Result};

/// Tolerated drift of `Σ ρ_mm` from 1 at any sample.
const TRACE_TOLERANCE: f64 = 1e-9;
/// Most negative population accepted at a sample.
const POPULATION_FLOOR: f64 = -1e-10;

/// `dρ_{m,l}/dt` for every matrix element:
///
/// ```text
/// -½ [n̄ (2J - m(m+1) - l(l+1)) + (n̄+1)(2J - m(m-1) - l(l-1))] ρ_{m,l}
///   + n̄ sqrt((J - m(m-1))(J - l(l-1))) ρ_{m-1,l-1}
///   + (n̄+1) sqrt((J - m(m+1))(J - l(l+1))) ρ_{m+1,l+1}
/// ```
///
/// with `J = j(j+1)` and `γ = 1`. Each diagonal `m - l = const` is closed
/// under this map.
pub fn master_rhs(rho: &DensityMatrix, bath: BathParams) -> ComplexMatrix {
    let n = rho.n_atoms();
    let dim = n + 1;
    let (nb, j) = (bath.nbar(), n as f64 / 2.0);
    let jj = j * (j + 1.0);
    let mut out = ComplexMatrix::zeros(dim);
    for r in 0..dim {
        let m = r as f64 - j;
        for c in 0..dim {
            let l = c as f64 - j;
            let rate = 0.5
                * (nb * (2.0 * jj - m * (m + 1.0) - l * (l + 1.0))
                    + (nb + 1.0) * (2.0 * jj - m * (m - 1.0) - l * (l - 1.0)));
            let mut v = -rate * rho.at(r, c);
            if r > 0 && c > 0 {
                v += nb * sqrt((jj - m * (m - 1.0)) * (jj - l * (l - 1.0))) * rho.at(r - 1, c - 1);
            }
            if r + 1 < dim && c + 1 < dim {
                v += (nb + 1.0) * sqrt((jj - m * (m + 1.0)) * (jj - l * (l + 1.0))) * rho.at(r + 1, c + 1);
            }
            out[(r, c)] = v;
        }
    }
    out
}

/// The generator restricted to the diagonal `r - c = d >= 0`, a tridiagonal
/// matrix in the position `k = c` along the diagonal.
#[derive(Clone, Debug)]
pub(crate) struct DiagonalGenerator {
    rate: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl DiagonalGenerator {
    pub(crate) fn new(n_atoms: usize, bath: BathParams, d: usize) -> Self {
        let (nb, j) = (bath.nbar(), n_atoms as f64 / 2.0);
        let jj = j * (j + 1.0);
        let len = n_atoms + 1 - d;
        let mut rate = Vec::with_capacity(len);
        let mut lower = Vec::with_capacity(len);
        let mut upper = Vec::with_capacity(len);
        for k in 0..len {
            let l = k as f64 - j;
            let m = l + d as f64;
            rate.push(
                -0.5 * (nb * (2.0 * jj - m * (m + 1.0) - l * (l + 1.0))
                    + (nb + 1.0) * (2.0 * jj - m * (m - 1.0) - l * (l - 1.0))),
            );
            lower.push(if k > 0 { nb * sqrt((jj - m * (m - 1.0)) * (jj - l * (l - 1.0))) } else { 0.0 });
            upper.push(if k + 1 < len {
                (nb + 1.0) * sqrt((jj - m * (m + 1.0)) * (jj - l * (l + 1.0)))
            } else {
                0.0
            });
        }
        DiagonalGenerator { rate, lower, upper }
    }

    fn len(&self) -> usize {
        self.rate.len()
    }

    /// Slowest decay rate `-λ_max`. The off-diagonal products are
    /// nonnegative, so the generator is similar to a symmetric tridiagonal
    /// matrix and `λ_max` follows from Sturm-sequence bisection. The returned
    /// rate is never above the true one, by up to a relative 1e-14.
    fn slowest_rate(&self) -> f64 {
        let n = self.len();
        if n == 1 {
            return -self.rate[0];
        }
        let off2: Vec<f64> = (1..n).map(|k| self.lower[k] * self.upper[k - 1]).collect();
        // Number of eigenvalues below x.
        let below = |x: f64| {
            let mut count = 0;
            let mut q = 1.0;
            for k in 0..n {
                q = self.rate[k] - x - if k > 0 { off2[k - 1] / q } else { 0.0 };
                if q == 0.0 {
                    q = -f64::EPSILON * (self.rate[k].abs() + x.abs()).max(f64::MIN_POSITIVE);
                }
                if q < 0.0 {
                    count += 1;
                }
            }
            count
        };
        let radius = |k: usize| {
            sqrt(if k > 0 { off2[k - 1] } else { 0.0 }) + sqrt(if k + 1 < n { off2[k] } else { 0.0 })
        };
        let mut hi = (0..n).map(|k| self.rate[k] + radius(k)).fold(f64::NEG_INFINITY, f64::max);
        let mut lo = (0..n).map(|k| self.rate[k] - radius(k)).fold(f64::INFINITY, f64::min);
        let scale = hi.abs().max(lo.abs());
        while hi - lo > 1e-14 * scale {
            let mid = 0.5 * (lo + hi);
            if below(mid) == n {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        -hi
    }

    #[inline]
    fn apply(&self, y: &[f64], dy: &mut [f64]) {
        let n = self.len();
        for k in 0..n {
            let mut v = self.rate[k] * y[k];
            if k > 0 {
                v += self.lower[k] * y[k - 1];
            }
            if k + 1 < n {
                v += self.upper[k] * y[k + 1];
            }
            dy[k] = v;
        }
    }
}

impl OdeSystem for DiagonalGenerator {
    fn rhs(&self, y: &[f64], dy: &mut [f64]) {
        self.apply(y, dy);
    }
}

/// The nonzero diagonals `d >= 0` of a density matrix, stacked as one real
/// vector (`[re | im]` per diagonal; the main diagonal is real).
///
/// Blocks never read each other; they are integrated together only so they
/// share one step sequence, set by the main diagonal. Each coherence block is
/// carried in a frame decaying at its slowest rate `σ_d` (integrating
/// factor, `ρ_d(t) = e^{-σ_d t} u_d(t)`), so the step-size control acts on
/// the relative error of the coherences rather than on their vanishing
/// absolute size, and `u_d` never grows. The one-element corner block is
/// constant in its frame.
#[derive(Clone, Debug)]
struct DiagonalBlocks {
    n_atoms: usize,
    blocks: Vec<Block>,
    dim: usize,
}

#[derive(Clone, Debug)]
struct Block {
    d: usize,
    gen: DiagonalGenerator,
    offset: usize,
    shift: f64,
}

impl DiagonalBlocks {
    fn new(n_atoms: usize, bath: BathParams, active: &[usize]) -> Self {
        let mut offset = 0;
        let mut blocks = Vec::with_capacity(active.len());
        for &d in active {
            let gen = DiagonalGenerator::new(n_atoms, bath, d);
            let len = gen.len();
            let (width, shift) =
                if d == 0 { (len, 0.0) } else { (2 * len, gen.slowest_rate().max(0.0)) };
            blocks.push(Block { d, gen, offset, shift });
            offset += width;
        }
        DiagonalBlocks { n_atoms, blocks, dim: offset }
    }

    /// State vector at the start of an integration (frame time zero).
    fn pack(&self, rho: &ComplexMatrix) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        for b in &self.blocks {
            let (d, off, len) = (b.d, b.offset, b.gen.len());
            for k in 0..len {
                let z = rho[(k + d, k)];
                y[off + k] = z.re;
                if d > 0 {
                    y[off + len + k] = z.im;
                }
            }
        }
        y
    }

    /// Density matrix from the state vector `elapsed` after [`Self::pack`].
    fn unpack(&self, y: &[f64], elapsed: f64) -> ComplexMatrix {
        let mut rho = ComplexMatrix::zeros(self.n_atoms + 1);
        for b in &self.blocks {
            let (d, off, len) = (b.d, b.offset, b.gen.len());
            let scale = if d == 0 { 1.0 } else { exp(-b.shift * elapsed) };
            for k in 0..len {
                let z = if d == 0 {
                    Complex64::new(y[off + k], 0.0)
                } else {
                    Complex64::new(y[off + k], y[off + len + k]) * scale
                };
                rho[(k + d, k)] = z;
                rho[(k, k + d)] = z.conj();
            }
        }
        rho
    }
}

impl OdeSystem for DiagonalBlocks {
    fn rhs(&self, y: &[f64], dy: &mut [f64]) {
        for b in &self.blocks {
            let (off, len) = (b.offset, b.gen.len());
            let parts = if b.d == 0 { 1 } else { 2 };
            for p in 0..parts {
                let r = off + p * len..off + (p + 1) * len;
                b.gen.apply(&y[r.clone()], &mut dy[r.clone()]);
                if b.shift != 0.0 {
                    for (dv, v) in dy[r.clone()].iter_mut().zip(&y[r]) {
                        *dv += b.shift * v;
                    }
                }
            }
        }
    }
}

/// Time series of a damped state.
///
/// Always holds the populations `ρ_mm` (indexed by `m + j`), the corner
/// coherence `ρ_{-j,j}` and the energy at every sample. Traces from
/// [`evolve`] also keep the full density matrices.
#[derive(Clone, Debug)]
pub struct EvolutionTrace {
    n_atoms: usize,
    bath: BathParams,
    options: EvolveOptions,
    times: Vec<f64>,
    populations: Vec<Vec<f64>>,
    corner: Vec<Complex64>,
    energy: Vec<f64>,
    nu: Option<Vec<f64>>,
    states: Option<Vec<DensityMatrix>>,
    polar: bool,
}

fn sample_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| if k + 1 == n { t1 } else { t0 + (t1 - t0) * k as f64 / (n - 1) as f64 }).collect()
}

fn check_span(horizon: f64, n_samples: usize) -> Result<()> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
    }
    if n_samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {n_samples}")));
    }
    Ok(())
}

fn check_populations(t: f64, p: &[f64]) -> Result<()> {
    let total: f64 = p.iter().sum();
    let low = p.iter().copied().fold(f64::INFINITY, f64::min);
    if (total - 1.0).abs() > TRACE_TOLERANCE || low < POPULATION_FLOOR {
        return Err(Error::InvalidState(format!(
            "integration lost probability at t = {t}: trace {total}, smallest population {low}"
        )));
    }
    Ok(())
}

/// Integrates the master equation from `rho0` over `[0, horizon]`, sampling
/// at `n_samples` equally spaced times (both ends included).
///
/// Diagonals that start at zero stay zero and are skipped.
pub fn evolve(rho0: &DensityMatrix, bath: BathParams, horizon: f64, n_samples: usize) -> Result<EvolutionTrace> {
    evolve_with(rho0, bath, horizon, n_samples, EvolveOptions::default())
}

/// [`evolve`] with explicit tolerances.
pub fn evolve_with(
    rho0: &DensityMatrix,
    bath: BathParams,
    horizon: f64,
    n_samples: usize,
    options: EvolveOptions,
) -> Result<EvolutionTrace> {
    check_span(horizon, n_samples)?;
    let n = rho0.n_atoms();
    let m = rho0.matrix();
    let active: Vec<usize> =
        (0..=n).filter(|&d| d == 0 || (0..=n - d).any(|k| m[(k + d, k)] != Complex64::new(0.0, 0.0))).collect();
    let polar = active.iter().all(|&d| d == 0 || d == n);
    let mut trace = EvolutionTrace {
        n_atoms: n,
        bath,
        options,
        times: Vec::new(),
        populations: Vec::new(),
        corner: Vec::new(),
        energy: Vec::new(),
        nu: None,
        states: Some(Vec::new()),
        polar,
    };
    trace.push_state(0.0, rho0.clone())?;
    trace.run_general(&sample_times(0.0, horizon, n_samples)[1..])?;
    Ok(trace)
}

/// Damped polar cat `(|j,j> + |j,-j>)/sqrt(2)`: integrates only the main
/// diagonal and takes the corner from its exact exponential decay.
pub fn evolve_polar_cat(n_atoms: usize, bath: BathParams, horizon: f64, n_samples: usize) -> Result<EvolutionTrace> {
    evolve_polar_cat_with(n_atoms, bath, horizon, n_samples, EvolveOptions::default())
}

/// [`evolve_polar_cat`] with explicit tolerances.
pub fn evolve_polar_cat_with(
    n_atoms: usize,
    bath: BathParams,
    horizon: f64,
    n_samples: usize,
    options: EvolveOptions,
) -> Result<EvolutionTrace> {
    if n_atoms < 1 {
        return Err(Error::Domain("the number of atoms must be at least 1".into()));
    }
    check_span(horizon, n_samples)?;
    let mut p0 = vec![0.0; n_atoms + 1];
    p0[0] += 0.5;
    p0[n_atoms] += 0.5;
    let mut trace = EvolutionTrace {
        n_atoms,
        bath,
        options,
        times: Vec::new(),
        populations: Vec::new(),
        corner: Vec::new(),
        energy: Vec::new(),
        nu: None,
        states: None,
        polar: true,
    };
    trace.push_polar(0.0, p0, Complex64::new(0.5, 0.0))?;
    trace.run_polar(&sample_times(0.0, horizon, n_samples)[1..])?;
    Ok(trace)
}

impl EvolutionTrace {
    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn bath(&self) -> BathParams {
        self.bath
    }

    pub fn options(&self) -> EvolveOptions {
        self.options
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("traces hold at least the initial sample")
    }

    /// `ρ_mm` at sample `k`, indexed by `m + j`.
    pub fn populations(&self, k: usize) -> &[f64] {
        &self.populations[k]
    }

    /// `ρ_{-j,j}` at every sample.
    pub fn corner(&self) -> &[Complex64] {
        &self.corner
    }

    /// `E = Σ m ρ_mm` at every sample.
    pub fn energy(&self) -> &[f64] {
        &self.energy
    }

    /// `ν` at every sample, once [`compute_nu`](Self::compute_nu) has run.
    pub fn nu(&self) -> Option<&[f64]> {
        self.nu.as_deref()
    }

    /// Full density matrices (traces from [`evolve`] only).
    pub fn states(&self) -> Option<&[DensityMatrix]> {
        self.states.as_deref()
    }

    /// Whether only populations and the corner can be nonzero.
    pub fn is_polar(&self) -> bool {
        self.polar
    }

    fn push_polar(&mut self, t: f64, p: Vec<f64>, corner: Complex64) -> Result<()> {
        check_populations(t, &p)?;
        self.times.push(t);
        self.energy.push(energy(&p));
        self.populations.push(p);
        self.corner.push(corner);
        Ok(())
    }

    fn push_state(&mut self, t: f64, rho: DensityMatrix) -> Result<()> {
        let n = self.n_atoms;
        self.push_polar(t, rho.populations(), rho.at(0, n))?;
        self.states.as_mut().expect("general trace").push(rho);
        Ok(())
    }

    fn run_polar(&mut self, times: &[f64]) -> Result<()> {
        let g = DiagonalGenerator::new(self.n_atoms, self.bath, 0);
        let mut y = self.populations.last().expect("initial sample").clone();
        let mut t = self.horizon();
        let (t_start, c_start) = (t, *self.corner.last().expect("initial sample"));
        let rate = corner_rate(self.n_atoms, self.bath);
        let mut solver = Dopri5::new(y.len(), self.options);
        for &te in times {
            solver.advance(&g, &mut t, &mut y, te)?;
            self.push_polar(te, y.clone(), c_start * exp(-rate * (te - t_start)))?;
        }
        Ok(())
    }

    fn blocks_from(&self, rho: &DensityMatrix) -> DiagonalBlocks {
        let n = self.n_atoms;
        let m = rho.matrix();
        let active: Vec<usize> =
            (0..=n).filter(|&d| d == 0 || (0..=n - d).any(|k| m[(k + d, k)] != Complex64::new(0.0, 0.0))).collect();
        DiagonalBlocks::new(n, self.bath, &active)
    }

    fn run_general(&mut self, times: &[f64]) -> Result<()> {
        let last = self.states.as_ref().and_then(|s| s.last()).expect("general trace").clone();
        let system = self.blocks_from(&last);
        let mut y = system.pack(last.matrix());
        let t_start = self.horizon();
        let mut t = t_start;
        let mut solver = Dopri5::new(y.len(), self.options);
        for &te in times {
            solver.advance(&system, &mut t, &mut y, te)?;
            self.push_state(te, DensityMatrix::new_unchecked(self.n_atoms, system.unpack(&y, te - t_start)))?;
        }
        Ok(())
    }

    /// Extends the trace to `new_horizon` with `n_samples` further equally
    /// spaced samples.
    pub fn extend(&mut self, new_horizon: f64, n_samples: usize) -> Result<()> {
        let t0 = self.horizon();
        if new_horizon <= t0 || n_samples == 0 {
            return Ok(());
        }
        let times: Vec<f64> =
            (1..=n_samples).map(|k| if k == n_samples { new_horizon } else { t0 + (new_horizon - t0) * k as f64 / n_samples as f64 }).collect();
        if self.states.is_some() {
            self.run_general(&times)
        } else {
            self.run_polar(&times)
        }
    }

    /// Index of the last sample at or before `t`.
    fn anchor(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s <= t).saturating_sub(1)
    }

    /// Populations at any `t >= 0`, re-integrated from the nearest earlier
    /// sample.
    pub fn populations_at(&self, t: f64) -> Result<Vec<f64>> {
        let k = self.anchor(t);
        let mut y = self.populations[k].clone();
        let mut t0 = self.times[k];
        if t > t0 {
            let g = DiagonalGenerator::new(self.n_atoms, self.bath, 0);
            Dopri5::new(y.len(), self.options).advance(&g, &mut t0, &mut y, t)?;
        }
        Ok(y)
    }

    /// `ρ_{-j,j}(t)` from the exact decay law starting at the nearest sample.
    pub fn corner_at(&self, t: f64) -> Complex64 {
        let k = self.anchor(t);
        self.corner[k] * exp(-corner_rate(self.n_atoms, self.bath) * (t - self.times[k]))
    }

    /// Full density matrix at `t` (traces from [`evolve`] only).
    pub fn state_at(&self, t: f64) -> Result<Option<DensityMatrix>> {
        let Some(states) = &self.states else { return Ok(None) };
        let k = self.anchor(t);
        let start = &states[k];
        let system = self.blocks_from(start);
        let mut y = system.pack(start.matrix());
        let mut t0 = self.times[k];
        Dopri5::new(y.len(), self.options).advance(&system, &mut t0, &mut y, t)?;
        Ok(Some(DensityMatrix::new_unchecked(self.n_atoms, system.unpack(&y, t - self.times[k]))))
    }

    /// `ρ_KQ(t)` through `projector` for polar-structured traces.
    pub fn polar_characteristic_at(&self, projector: &PolarCatProjector, t: f64) -> Result<CharacteristicMatrix> {
        if !self.polar {
            return Err(Error::Precondition("trace does not have polar-cat structure".into()));
        }
        Ok(projector.project(&self.populations_at(t)?, self.corner_at(t)))
    }

    /// `ρ_KQ` at sample `k`.
    pub fn characteristic(&self, k: usize, projector: Option<&PolarCatProjector>) -> CharacteristicMatrix {
        match (projector, &self.states) {
            (Some(p), _) if self.polar => p.project(&self.populations[k], self.corner[k]),
            (_, Some(states)) => characteristic_matrix(&states[k]),
            _ => PolarCatProjector::new(self.n_atoms)
                .expect("n_atoms >= 1")
                .project(&self.populations[k], self.corner[k]),
        }
    }

    /// Adds a sample at `t` (re-integrated), keeping the times sorted.
    pub fn insert_sample(&mut self, t: f64) -> Result<()> {
        let pos = self.times.partition_point(|&s| s < t);
        if pos < self.times.len() && self.times[pos] == t {
            return Ok(());
        }
        if pos == self.times.len() {
            return self.extend(t, 1);
        }
        let (p, c, state) = match self.state_at(t)? {
            Some(rho) => (rho.populations(), rho.at(0, self.n_atoms), Some(rho)),
            None => (self.populations_at(t)?, self.corner_at(t), None),
        };
        check_populations(t, &p)?;
        self.times.insert(pos, t);
        self.energy.insert(pos, energy(&p));
        self.populations.insert(pos, p);
        self.corner.insert(pos, c);
        if let (Some(states), Some(rho)) = (self.states.as_mut(), state) {
            states.insert(pos, rho);
        }
        self.nu = None;
        Ok(())
    }

    /// Fills `ν(t)` at every sample.
    pub fn compute_nu(&mut self) -> Result<&[f64]> {
        let projector = if self.polar { Some(PolarCatProjector::new(self.n_atoms)?) } else { None };
        let mut nu = Vec::with_capacity(self.len());
        for k in 0..self.len() {
            nu.push(nonclassicality_adaptive(&self.characteristic(k, projector.as_ref()))?.nu);
        }
        self.nu = Some(nu);
        Ok(self.nu.as_deref().expect("just set"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{coherence_analytic, stationary_state};
    use crate::states::{density_of, polar_cat, spin_operators};

    fn bath(n: f64) -> BathParams {
        BathParams::new(n).unwrap()
    }

    /// Lindblad form built from `J±` products.
    fn lindblad_oracle(rho: &ComplexMatrix, n_atoms: usize, nbar: f64) -> ComplexMatrix {
        let ops = spin_operators(n_atoms).unwrap();
        let (jp, jm) = (&ops.jplus, &ops.jminus);
        let pm = jp.matmul(jm);
        let mp = jm.matmul(jp);
        let term = |a: &ComplexMatrix, l: &ComplexMatrix, r: &ComplexMatrix| {
            let anti = &a.matmul(rho) + &rho.matmul(a);
            let sand = l.matmul(rho).matmul(r).scale(Complex64::new(2.0, 0.0));
            &anti - &sand
        };
        let down = term(&pm, jm, jp).scale(Complex64::new(-0.5 * (nbar + 1.0), 0.0));
        let up = term(&mp, jp, jm).scale(Complex64::new(-0.5 * nbar, 0.0));
        &down + &up
    }

    fn random_density(n: usize, seed: u64) -> DensityMatrix {
        // deterministic LCG, A A† / Tr
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let dim = n + 1;
        let data: Vec<Complex64> = (0..dim * dim).map(|_| Complex64::new(next(), next())).collect();
        let a = ComplexMatrix::from_rows(dim, data).unwrap();
        let m = a.matmul(&a.adjoint());
        let tr = m.trace();
        DensityMatrix::new(n, m.scale(Complex64::new(1.0 / tr.re, 0.0))).unwrap()
    }

    #[test]
    fn rhs_matches_lindblad_form() {
        for n in 1..=6 {
            for nbar in [0.0, 0.7, 3.0] {
                let rho = random_density(n, 11 + n as u64);
                let a = master_rhs(&rho, bath(nbar));
                let b = lindblad_oracle(rho.matrix(), n, nbar);
                assert!((&a - &b).max_abs() < 1e-12, "N={n} n̄={nbar}");
                assert!(a.trace().norm() < 1e-13);
            }
        }
    }

    #[test]
    fn stationary_state_is_fixed_point() {
        for n in [1, 2, 5, 17, 50] {
            for nbar in [0.0, 0.5, 1.0, 10.0, 100.0] {
                let p = stationary_state(n, bath(nbar));
                let rho = DensityMatrix::from_populations(n, &p).unwrap();
                assert!(master_rhs(&rho, bath(nbar)).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn corner_equation() {
        let n = 5;
        let rho = density_of(&polar_cat(n).unwrap());
        for nbar in [0.0, 1.0, 10.0] {
            let d = master_rhs(&rho, bath(nbar));
            let want = -(n as f64 / 2.0) * (2.0 * nbar + 1.0) * rho.at(0, n);
            assert!((d[(0, n)] - want).norm() < 1e-13);
        }
    }

    #[test]
    fn slowest_rates() {
        for n in [1usize, 4, 9, 30] {
            for nbar in [0.0, 0.7, 10.0] {
                let b = bath(nbar);
                // Populations have a stationary state: λ_max = 0.
                let g0 = DiagonalGenerator::new(n, b, 0);
                assert!(g0.slowest_rate().abs() < 1e-12 * (1.0 + g0.rate[0].abs() * n as f64));
                assert_eq!(DiagonalGenerator::new(n, b, n).slowest_rate(), corner_rate(n, b));
                for d in 1..n {
                    let g = DiagonalGenerator::new(n, b, d);
                    let sigma = g.slowest_rate();
                    // Continuant p_k(x) = (a_k - x) p_{k-1} - l_k u_{k-1} p_{k-2}
                    // changes sign at -σ and nowhere above it.
                    let det = |x: f64| {
                        let (mut p2, mut p1) = (1.0, g.rate[0] - x);
                        for k in 1..g.len() {
                            let p = (g.rate[k] - x) * p1 - g.lower[k] * g.upper[k - 1] * p2;
                            (p2, p1) = (p1, p);
                        }
                        p1
                    };
                    let delta = 1e-9 * (1.0 + sigma);
                    assert!(det(-sigma - delta) * det(-sigma + delta) < 0.0, "N={n} n̄={nbar} d={d}");
                    let top = g.rate.iter().map(|r| r.abs()).fold(0.0, f64::max);
                    let sign = det(-sigma + delta).signum();
                    for s in 1..=200 {
                        assert_eq!(det(-sigma + delta + top * s as f64 / 100.0).signum(), sign);
                    }
                }
            }
        }
    }

    #[test]
    fn generator_matches_rhs() {
        let n = 6;
        let rho = random_density(n, 5);
        let b = bath(2.5);
        let full = master_rhs(&rho, b);
        let active: Vec<usize> = (0..=n).collect();
        let blocks = DiagonalBlocks::new(n, b, &active);
        let y = blocks.pack(rho.matrix());
        let mut dy = vec![0.0; y.len()];
        blocks.rhs(&y, &mut dy);
        // d/dt of e^{-σt} u at t = 0 is u' - σ u.
        for blk in &blocks.blocks {
            let width = if blk.d == 0 { blk.gen.len() } else { 2 * blk.gen.len() };
            for i in blk.offset..blk.offset + width {
                dy[i] -= blk.shift * y[i];
            }
        }
        assert!((&blocks.unpack(&dy, 0.0) - &full).max_abs() < 1e-13);
        assert!((&blocks.unpack(&y, 0.0) - rho.matrix()).max_abs() == 0.0);
    }

    #[test]
    fn polar_cat_paths_agree() {
        for (n, nbar) in [(1, 0.0), (5, 0.0), (5, 1.0), (8, 10.0)] {
            let a = evolve_polar_cat(n, bath(nbar), 1.0, 11).unwrap();
            let b = evolve(&density_of(&polar_cat(n).unwrap()), bath(nbar), 1.0, 11).unwrap();
            assert!(b.is_polar());
            for k in 0..11 {
                for (x, y) in a.populations(k).iter().zip(b.populations(k)) {
                    assert!((x - y).abs() < 1e-9);
                }
                assert!((a.corner()[k] - b.corner()[k]).norm() < 1e-12);
                let t = a.times()[k];
                assert!((a.corner()[k].re - coherence_analytic(n, bath(nbar), t)).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn zero_temperature_top_level() {
        let tr = evolve_polar_cat(5, bath(0.0), 2.0, 21).unwrap();
        for (k, &t) in tr.times().iter().enumerate() {
            assert!((tr.populations(k)[5] - 0.5 * libm::exp(-5.0 * t)).abs() < 1e-11);
        }
    }

    #[test]
    fn reintegration_and_insertion() {
        let mut tr = evolve_polar_cat(5, bath(1.0), 1.0, 11).unwrap();
        let direct = evolve_polar_cat(5, bath(1.0), 0.437, 2).unwrap();
        let p = tr.populations_at(0.437).unwrap();
        for (a, b) in p.iter().zip(direct.populations(1)) {
            assert!((a - b).abs() < 1e-10);
        }
        tr.insert_sample(0.437).unwrap();
        assert_eq!(tr.len(), 12);
        assert!(tr.times().windows(2).all(|w| w[0] < w[1]));
        tr.extend(2.0, 5).unwrap();
        assert_eq!(tr.len(), 17);
        assert_eq!(tr.horizon(), 2.0);
    }

    #[test]
    fn domain_errors() {
        assert!(evolve_polar_cat(5, bath(0.0), 0.0, 10).is_err());
        assert!(evolve_polar_cat(5, bath(0.0), 1.0, 1).is_err());
        assert!(evolve_polar_cat(0, bath(0.0), 1.0, 10).is_err());
        assert!(BathParams::new(-1.0).is_err());
    }
}
