use alloc::format;

use crate::math::ln;
use crate::{Error, Result};

/// `ln(n!)`.
///
/// Small arguments use the exact integer product; larger ones go through
/// `lgamma`, which keeps the relative error near machine precision.
pub fn ln_factorial(n: i64) -> Result<f64> {
    if n < 0 {
        return Err(Error::Domain(format!("ln_factorial of negative argument {n}")));
    }
    Ok(ln_factorial_unchecked(n as u64))
}

/// `ln(n!)` without the sign check.
#[inline]
pub fn ln_factorial_unchecked(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 20 {
        let mut p: u64 = 1;
        for k in 2..=n {
            p *= k;
        }
        return ln(p as f64);
    }
    libm::lgamma(n as f64 + 1.0)
}
