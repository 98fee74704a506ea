//! Decoherence, dissipation and classicalization times.

use core::f64::consts::E;

use super::analytic::{stationary_energy, t_dec};
use super::master::{evolve_polar_cat_with, EvolutionTrace};
use super::ode::EvolveOptions;
use super::{energy, BathParams};
use crate::optimize::brent_root;
use crate::wigner::{min_section, PolarCatProjector};
use crate::{Error, Result};

/// Relative accuracy of the refined `t_diss`.
const T_DISS_RTOL: f64 = 1e-9;
/// Relative width of the final `t_ncl` bisection bracket.
const T_NCL_RTOL: f64 = 1e-6;
/// Horizon doublings tried before giving up on a `t_diss` bracket.
const MAX_DOUBLINGS: usize = 40;

/// `t_dec`, `t_diss`, `t_ncl` and `r = t_diss / t_dec`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharacteristicTimes {
    pub t_dec: f64,
    pub t_diss: f64,
    /// `None` when `ν` never reaches 0 on the horizon (always at `n̄ = 0`).
    pub t_ncl: Option<f64>,
    pub ratio_r: f64,
}

/// First time with `|E(t) - E(∞)| = |E(0) - E(∞)|/e`.
///
/// `E(∞)` is the stationary (Boltzmann) energy, never a long-time estimate.
/// The crossing is bracketed on the samples and refined by root finding on
/// re-integrated populations.
pub fn t_diss(trace: &EvolutionTrace) -> Result<f64> {
    let e_inf = stationary_energy(trace.n_atoms(), trace.bath());
    let e = trace.energy();
    let target = (e[0] - e_inf).abs() / E;
    if target == 0.0 {
        return Err(Error::Precondition("initial energy already equals the stationary energy".into()));
    }
    let gap = |energy: f64| (energy - e_inf).abs() - target;
    let Some(k) = e.iter().position(|&x| gap(x) <= 0.0) else {
        return Err(Error::InsufficientHorizon { horizon: trace.horizon(), what: "t_diss" });
    };
    let times = trace.times();
    let (lo, hi) = (times[k - 1], times[k]);
    let mut failure = None;
    let root = brent_root(
        |t| match trace.populations_at(t) {
            Ok(p) => gap(energy(&p)),
            Err(err) => {
                failure.get_or_insert(err);
                0.0
            }
        },
        lo,
        hi,
        T_DISS_RTOL * hi,
    );
    match failure {
        Some(err) => Err(err),
        None => Ok(root),
    }
}

/// First time at which the Wigner function of a damped polar cat becomes
/// non-negative everywhere.
///
/// Because the state keeps its polar structure, the global minimum lies on
/// the meridian `φ = π/N`, so only that section is checked. Samples are
/// scanned for the first non-negative one and the crossing is bisected
/// with re-integrated states. At `n̄ = 0` the state stays non-classical
/// and `None` is returned without scanning.
pub fn t_ncl(trace: &EvolutionTrace) -> Result<Option<f64>> {
    if !trace.is_polar() {
        return Err(Error::Precondition("t_ncl needs a trace with polar-cat structure".into()));
    }
    if trace.bath().nbar() == 0.0 {
        return Ok(None);
    }
    let projector = PolarCatProjector::new(trace.n_atoms())?;
    let classical_at = |t: f64| -> Result<bool> {
        Ok(min_section(&trace.polar_characteristic_at(&projector, t)?)?.is_nonnegative())
    };
    let mut previous = None;
    for (k, &t) in trace.times().iter().enumerate() {
        if min_section(&trace.characteristic(k, Some(&projector)))?.is_nonnegative() {
            let Some(mut lo) = previous else { return Ok(Some(t)) };
            let mut hi = t;
            while hi - lo > T_NCL_RTOL * hi {
                let mid = 0.5 * (lo + hi);
                if classical_at(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(hi));
        }
        previous = Some(t);
    }
    Ok(None)
}

/// Settings for [`characteristic_times`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimesOptions {
    /// Samples per horizon segment.
    pub n_samples: usize,
    /// Whether to search for `t_ncl`.
    pub ncl: bool,
    pub evolve: EvolveOptions,
}

impl Default for TimesOptions {
    fn default() -> Self {
        TimesOptions { n_samples: 200, ncl: true, evolve: EvolveOptions::default() }
    }
}

/// Evolves the polar cat until the `t_diss` crossing is on the horizon and
/// extracts all characteristic times.
///
/// The horizon starts at `5 t_dec` and doubles until `t_diss` is bracketed.
/// The returned trace has extra samples at `t_dec`, `t_diss` and `t_ncl`.
pub fn characteristic_times(
    n_atoms: usize,
    bath: BathParams,
    options: TimesOptions,
) -> Result<(CharacteristicTimes, EvolutionTrace)> {
    let t_dec = t_dec(n_atoms, bath);
    let mut horizon = 5.0 * t_dec;
    let mut trace = evolve_polar_cat_with(n_atoms, bath, horizon, options.n_samples, options.evolve)?;
    let mut doublings = 0;
    let t_diss = loop {
        match t_diss(&trace) {
            Ok(t) => break t,
            Err(Error::InsufficientHorizon { .. }) if doublings < MAX_DOUBLINGS => {
                horizon *= 2.0;
                doublings += 1;
                trace.extend(horizon, options.n_samples)?;
            }
            Err(err) => return Err(err),
        }
    };
    let t_ncl = if options.ncl { t_ncl(&trace)? } else { None };
    for t in [Some(t_dec), Some(t_diss), t_ncl].into_iter().flatten() {
        if t <= trace.horizon() {
            trace.insert_sample(t)?;
        }
    }
    Ok((CharacteristicTimes { t_dec, t_diss, t_ncl, ratio_r: t_diss / t_dec }, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve_polar_cat;

    #[test]
    fn short_horizon_is_reported() {
        let tr = evolve_polar_cat(2, BathParams::new(0.0).unwrap(), 0.01, 5).unwrap();
        assert!(matches!(t_diss(&tr), Err(Error::InsufficientHorizon { .. })));
    }

    #[test]
    fn five_atoms() {
        let (t, _) = characteristic_times(5, BathParams::new(0.0).unwrap(), TimesOptions::default()).unwrap();
        assert_eq!(t.t_dec, 0.4);
        assert!((t.t_diss - 0.506).abs() < 0.005, "{}", t.t_diss);
        assert_eq!(t.t_ncl, None);
        let (t, tr) = characteristic_times(5, BathParams::new(10.0).unwrap(), TimesOptions::default()).unwrap();
        assert!((t.t_dec - 0.019).abs() < 0.001);
        assert!((t.t_diss - 0.058).abs() < 0.003, "{}", t.t_diss);
        let ncl = t.t_ncl.unwrap();
        assert!((ncl - 0.031).abs() < 0.002, "{ncl}");
        assert!(tr.times().contains(&ncl));
    }
}
