mod common;

use spincat_core::dynamics::{
    characteristic_times, evolve, evolve_polar_cat, evolve_with, stationary_energy, t_diss,
    BathParams, EvolveOptions, TimesOptions,
};
use spincat_core::linalg::ComplexMatrix;
use spincat_core::states::{density_of, polar_cat, spin_operators, DensityMatrix};
use spincat_core::{Complex64, Error};

fn bath(nbar: f64) -> BathParams {
    BathParams::new(nbar).unwrap()
}

/// `(n̄+1) D[J-] ρ + n̄ D[J+] ρ` from matrix products, with
/// `D[A] ρ = A ρ A† - ½ {A†A, ρ}`.
fn lindblad(rho: &ComplexMatrix, n: usize, nbar: f64) -> ComplexMatrix {
    let ops = spin_operators(n).unwrap();
    let dissipator = |a: &ComplexMatrix, w: f64| {
        let ad = a.adjoint();
        let ada = ad.matmul(a);
        let jump = a.matmul(rho).matmul(&ad);
        let anti = &ada.matmul(rho) + &rho.matmul(&ada);
        (&jump - &anti.scale(Complex64::new(0.5, 0.0))).scale(Complex64::new(w, 0.0))
    };
    &dissipator(&ops.jminus, nbar + 1.0) + &dissipator(&ops.jplus, nbar)
}

/// Classical fixed-step RK4 on the full matrix, sharing no code with the
/// library's generator or integrator.
fn rk4_full(rho0: &DensityMatrix, nbar: f64, t_end: f64, steps: usize) -> ComplexMatrix {
    let n = rho0.n_atoms();
    let h = t_end / steps as f64;
    let f = |m: &ComplexMatrix| lindblad(m, n, nbar);
    let c = |x: f64| Complex64::new(x, 0.0);
    let mut y = rho0.matrix().clone();
    for _ in 0..steps {
        let k1 = f(&y);
        let k2 = f(&(&y + &k1.scale(c(h / 2.0))));
        let k3 = f(&(&y + &k2.scale(c(h / 2.0))));
        let k4 = f(&(&y + &k3.scale(c(h))));
        let sum = &(&k1 + &k2.scale(c(2.0))) + &(&k3.scale(c(2.0)) + &k4);
        y = &y + &sum.scale(c(h / 6.0));
    }
    y
}

#[test]
fn diagonal_decoupling_matches_full_matrix_integration() {
    let mut rng = common::rng(11);
    for (n, nbar) in [(3, 0.0), (4, 2.0), (6, 0.5)] {
        let rho0 = common::random_density(n, &mut rng);
        let b = bath(nbar);
        let trace = evolve(&rho0, b, 0.4, 5).unwrap();
        let oracle = rk4_full(&rho0, nbar, 0.4, 8000);
        let last = &trace.states().unwrap()[4];
        let diff = (last.matrix() - &oracle).max_abs();
        assert!(diff < 1e-10, "N={n} n̄={nbar}: {diff:e}");
    }
}

#[test]
fn polar_cat_never_develops_inner_coherences() {
    let n = 4;
    let oracle = rk4_full(&density_of(&polar_cat(n).unwrap()), 3.0, 0.3, 6000);
    for r in 0..=n {
        for c in 0..=n {
            if r != c && !(r == 0 && c == n) && !(r == n && c == 0) {
                assert!(oracle[(r, c)].norm() < 1e-12);
            }
        }
    }
}

#[test]
fn step_halving_convergence() {
    let mut rng = common::rng(12);
    for (n, nbar) in [(5, 0.0), (8, 4.0), (20, 10.0)] {
        let rho0 = common::random_density(n, &mut rng);
        let b = bath(nbar);
        let base = evolve(&rho0, b, 1.0, 11).unwrap();
        let tight = evolve_with(&rho0, b, 1.0, 11, EvolveOptions::default().tightened(10.0)).unwrap();
        for (x, y) in base.states().unwrap().iter().zip(tight.states().unwrap()) {
            assert!((x.matrix() - y.matrix()).max_abs() < 1e-8, "N={n} n̄={nbar}");
        }
    }
}

#[test]
fn trace_and_positivity_over_long_horizons() {
    for n in [1usize, 5, 20, 50] {
        for nbar in [0.0, 1.0, 10.0] {
            let b = bath(nbar);
            let (times, _) = characteristic_times(n, b, TimesOptions { ncl: false, ..Default::default() }).unwrap();
            let trace = evolve_polar_cat(n, b, 10.0 * times.t_diss, 101).unwrap();
            for k in 0..trace.len() {
                let p = trace.populations(k);
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                assert!(p.iter().all(|&x| x >= -1e-10));
                assert!(trace.corner()[k].norm() <= 0.5);
            }
        }
    }
}

#[test]
fn generic_and_polar_paths_agree() {
    for (n, nbar) in [(5, 0.0), (12, 1.0), (50, 10.0)] {
        let b = bath(nbar);
        let generic = evolve(&density_of(&polar_cat(n).unwrap()), b, 0.2, 21).unwrap();
        let polar = evolve_polar_cat(n, b, 0.2, 21).unwrap();
        assert!(generic.is_polar());
        for k in 0..generic.len() {
            for (x, y) in generic.populations(k).iter().zip(polar.populations(k)) {
                assert!((x - y).abs() < 1e-9);
            }
            assert!((generic.corner()[k] - polar.corner()[k]).norm() < 1e-9);
        }
    }
}

#[test]
fn energy_relaxes_to_stationary_value() {
    let b = bath(2.0);
    let trace = evolve_polar_cat(6, b, 5.0, 11).unwrap();
    let e = trace.energy();
    assert_eq!(e[0], 0.0);
    assert!((e[e.len() - 1] - stationary_energy(6, b)).abs() < 1e-8);
}

#[test]
fn short_horizon_is_reported() {
    let trace = evolve_polar_cat(2, bath(0.0), 0.01, 5).unwrap();
    assert!(matches!(t_diss(&trace), Err(Error::InsufficientHorizon { .. })));
}

#[test]
fn deterministic_evolution() {
    let a = evolve_polar_cat(7, bath(0.3), 1.0, 17).unwrap();
    let b = evolve_polar_cat(7, bath(0.3), 1.0, 17).unwrap();
    for k in 0..a.len() {
        assert_eq!(a.populations(k), b.populations(k));
    }
}
