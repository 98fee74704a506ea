//! Special functions: log-factorials, Wigner 3j symbols, normalized associated
//! Legendre functions, spherical harmonics and Gauss-Legendre quadrature.
//!
//! Everything here is a pure function of its arguments.

mod factorial;
mod half_int;
mod legendre;
mod quadrature;
mod three_j;

pub use factorial::{ln_factorial, ln_factorial_unchecked};
pub use half_int::HalfInt;
pub use legendre::{normalized_legendre, sectoral_legendre, spherical_harmonic, zonal_legendre, LegendreTable};
pub use quadrature::gauss_legendre;
pub use three_j::{wigner3j, wigner3j_unchecked};
