#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_chacha::ChaCha8Rng;
use spincat_core::linalg::ComplexMatrix;
use spincat_core::states::{DensityMatrix, PureState};
use spincat_core::Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Amplitudes with independent Gaussian real and imaginary parts, normalized:
/// uniformly distributed on the unit sphere of C^{N+1}.
pub fn random_pure(n_atoms: usize, rng: &mut ChaCha8Rng) -> PureState {
    let amps = (0..=n_atoms).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    PureState::normalized(n_atoms, amps).unwrap()
}

/// Convex mixture of three random pure states.
pub fn random_density(n_atoms: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let dim = n_atoms + 1;
    let w: Vec<f64> = (0..3).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    let mut m = ComplexMatrix::zeros(dim);
    for wk in w {
        let psi = random_pure(n_atoms, rng);
        let a = psi.amplitudes();
        m = &m + &ComplexMatrix::outer(a, a).scale(Complex64::new(wk / total, 0.0));
    }
    DensityMatrix::new(n_atoms, m).unwrap()
}
