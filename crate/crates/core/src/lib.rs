//! Numerics for atomic Schrödinger-cat states of `N` two-level atoms.
//!
//! The crate works in the symmetric (Dicke) subspace of dimension `N + 1`,
//! spanned by `|j, m>` with `j = N/2` and `m = -j..=j`. Every vector and matrix
//! is indexed by `m + j`, so index 0 is the ground state `m = -j`.
//!
//! Modules:
//!
//! - [`specfun`]: log-factorials, Wigner 3j symbols, normalized associated
//!   Legendre functions, spherical harmonics and Gauss-Legendre nodes.
//! - [`states`]: coherent states, polar and nonpolar cats, spin matrices.
//! - [`wigner`]: spherical tensor operators, characteristic matrices, the
//!   spherical Wigner map, closed-form cat fields and the non-classicality
//!   measure.
//! - [`squeezing`]: dipole variances of nonpolar cats and the squeezing
//!   measure.
//! - [`dynamics`]: the thermal master equation in the Dicke basis and the
//!   decoherence / dissipation / non-classicality timescales.
//!
//! Units: `ħ = 1`, damping rate `γ = 1` (time is measured in `1/γ`) and
//! energies are in units of `ħω_a`.
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod math;
mod optimize;

pub mod dynamics;
pub mod linalg;
pub mod specfun;
pub mod squeezing;
pub mod states;
pub mod wigner;

pub use error::{Error, Result};
pub use num_complex::Complex64;
