//! Damping of a collective spin by a thermal bath.
//!
//! The master equation (interaction picture, Born-Markov)
//!
//! ```text
//! dρ/dt = -(γ/2)(n̄+1)(J+J-ρ + ρJ+J- - 2J-ρJ+) - (γ/2) n̄ (J-J+ρ + ρJ-J+ - 2J+ρJ-)
//! ```
//!
//! couples each matrix element `ρ_{m,l}` only to its neighbours on the same
//! diagonal. Time is measured in units of `1/γ` (`γ = 1`) and energies in
//! units of `ħω_a`.

mod analytic;
mod master;
mod ode;
mod times;

use alloc::format;

pub use analytic::{
    coherence_analytic, corner_rate, energy, stationary_energy, stationary_state, t_dec, zero_temp_cascade,
};
pub use master::{evolve, evolve_polar_cat, evolve_polar_cat_with, evolve_with, master_rhs, EvolutionTrace};
pub use ode::EvolveOptions;
pub use times::{characteristic_times, t_diss, t_ncl, CharacteristicTimes, TimesOptions};

use crate::{Error, Result};

/// Thermal environment: mean photon number `n̄` at the atomic frequency.
/// The damping rate is fixed to `γ = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathParams {
    nbar: f64,
}

impl BathParams {
    pub const GAMMA: f64 = 1.0;

    pub fn new(nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::Domain(format!("mean photon number must be finite and >= 0, got {nbar}")));
        }
        Ok(BathParams { nbar })
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }
}
