//! Wigner 3j symbols from the Racah single-sum formula.
//!
//! The sum alternates in sign and cancels badly for large angular momenta
//! (the largest term exceeds the result by ~10^17 at j = 100). Terms are first
//! summed in floating point from log-factorials; when the cancellation
//! estimate exceeds the error budget the symbol is recomputed exactly with
//! big integers over a prime-exponent representation of the factorials.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::factorial::ln_factorial_unchecked as lf;
use super::HalfInt;
use crate::math::{abs, exp, parity, sqrt};
use crate::{Error, Result};

/// Absolute error budget of the floating-point path.
const FLOAT_BUDGET: f64 = 1e-13;

/// The Wigner 3j symbol `(j1 j2 j3; m1 m2 m3)`.
///
/// Returns 0 when the selection rules fail (`m1 + m2 + m3 != 0` or the
/// triangle condition is violated). Inputs where some `|m| > j`, `j < 0`, or
/// `j ± m` is not an integer are domain errors.
pub fn wigner3j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> Result<f64> {
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        if j.twice() < 0 {
            return Err(Error::Domain(format!("negative angular momentum {j}")));
        }
        if m.abs() > j {
            return Err(Error::Domain(format!("|m| = {} exceeds j = {j}", m.abs())));
        }
        if !(j + m).is_integer() {
            return Err(Error::Domain(format!("j = {j} and m = {m} mix integer and half-integer")));
        }
    }
    Ok(wigner3j_unchecked(j1, j2, j3, m1, m2, m3))
}

/// [`wigner3j`] without argument validation; callers guarantee `|m_i| <= j_i`
/// and integer `j_i ± m_i`.
pub fn wigner3j_unchecked(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> f64 {
    match RacahSum::new(j1, j2, j3, m1, m2, m3) {
        Some(sum) => sum.evaluate(),
        None => 0.0,
    }
}

/// Integer data of the Racah formula
///
/// ```text
/// (-1)^(j1-j2-m3) sqrt(Δ · Π(j±m)!) Σ_k (-1)^k / [k! (α+k)! (β+k)! (a-k)! (g1-k)! (f2-k)!]
/// ```
///
/// with `Δ = a! b! c! / (j1+j2+j3+1)!`.
#[derive(Debug)]
struct RacahSum {
    a: u64,
    b: u64,
    c: u64,
    s: u64,
    plus_minus: [u64; 6],
    alpha: i64,
    beta: i64,
    g1: u64,
    f2: u64,
    kmin: u64,
    kmax: u64,
    sign: f64,
}

impl RacahSum {
    fn new(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> Option<Self> {
        if (m1 + m2 + m3).twice() != 0 {
            return None;
        }
        let a = (j1 + j2 - j3).to_int()?;
        let b = (j1 - j2 + j3).to_int()?;
        let c = (-j1 + j2 + j3).to_int()?;
        if a < 0 || b < 0 || c < 0 {
            return None;
        }
        let s = (j1 + j2 + j3).to_int()? + 1;
        let int = |h: HalfInt| h.to_int().expect("j ± m is an integer");
        let f1 = int(j1 + m1);
        let g1 = int(j1 - m1);
        let f2 = int(j2 + m2);
        let g2 = int(j2 - m2);
        let f3 = int(j3 + m3);
        let g3 = int(j3 - m3);
        let alpha = int(j3 - j2 + m1);
        let beta = int(j3 - j1 - m2);
        let kmin = 0.max(-alpha).max(-beta);
        let kmax = a.min(g1).min(f2);
        if kmin > kmax {
            return None;
        }
        Some(RacahSum {
            a: a as u64,
            b: b as u64,
            c: c as u64,
            s: s as u64,
            plus_minus: [f1, g1, f2, g2, f3, g3].map(|x| x as u64),
            alpha,
            beta,
            g1: g1 as u64,
            f2: f2 as u64,
            kmin: kmin as u64,
            kmax: kmax as u64,
            sign: parity(int(j1 - j2 - m3)),
        })
    }

    /// Factorial arguments of the k-th denominator.
    #[inline]
    fn denominator(&self, k: u64) -> [u64; 6] {
        [
            k,
            (self.alpha + k as i64) as u64,
            (self.beta + k as i64) as u64,
            self.a - k,
            self.g1 - k,
            self.f2 - k,
        ]
    }

    fn evaluate(&self) -> f64 {
        let (value, error) = self.evaluate_float();
        if error <= FLOAT_BUDGET {
            value
        } else {
            self.evaluate_exact()
        }
    }

    /// Log-factorial evaluation with an estimate of its absolute error.
    fn evaluate_float(&self) -> (f64, f64) {
        let ln_pre = 0.5
            * (lf(self.a) + lf(self.b) + lf(self.c) - lf(self.s)
                + self.plus_minus.iter().map(|&x| lf(x)).sum::<f64>());
        let n_terms = (self.kmax - self.kmin + 1) as usize;
        let mut logs = Vec::with_capacity(n_terms);
        let mut l_max = f64::NEG_INFINITY;
        for k in self.kmin..=self.kmax {
            let l = -self.denominator(k).iter().map(|&x| lf(x)).sum::<f64>();
            l_max = l_max.max(l);
            logs.push(l);
        }
        // Neumaier summation of the scaled terms.
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        let mut l_scale = 0.0f64;
        for (i, &l) in logs.iter().enumerate() {
            let k = self.kmin + i as u64;
            let t = parity(k as i64) * exp(l - l_max);
            let s = sum + t;
            if abs(sum) >= abs(t) {
                comp += (sum - s) + t;
            } else {
                comp += (t - s) + sum;
            }
            sum = s;
            l_scale = l_scale.max(abs(l));
        }
        sum += comp;
        let magnitude = exp(ln_pre + l_max);
        let value = self.sign * magnitude * sum;
        let eps = f64::EPSILON;
        let error = magnitude * eps * n_terms as f64 * (4.0 + 2.0 * l_scale + abs(ln_pre))
            + abs(value) * eps * (1.0 + abs(ln_pre + l_max));
        (value, error)
    }

    /// Exact evaluation: the sum is put over the least common multiple of its
    /// denominators and accumulated in big integers.
    fn evaluate_exact(&self) -> f64 {
        let primes = primes_up_to(self.s);
        let n_primes = primes.len();

        let mut pre = vec![0i64; n_primes];
        for (i, &p) in primes.iter().enumerate() {
            let mut e = legendre_exponent(self.a, p) as i64
                + legendre_exponent(self.b, p) as i64
                + legendre_exponent(self.c, p) as i64
                - legendre_exponent(self.s, p) as i64;
            for &x in &self.plus_minus {
                e += legendre_exponent(x, p) as i64;
            }
            pre[i] = e;
        }

        let mut d_max = vec![0u64; n_primes];
        let mut d_first = vec![0u64; n_primes];
        for k in self.kmin..=self.kmax {
            let den = self.denominator(k);
            for (i, &p) in primes.iter().enumerate() {
                let e: u64 = den.iter().map(|&x| legendre_exponent(x, p)).sum();
                if k == self.kmin {
                    d_first[i] = e;
                }
                d_max[i] = d_max[i].max(e);
            }
        }

        // n_k = lcm / D_k, starting from k = kmin and stepping by the ratio
        // D_k / D_{k+1}, which keeps every n_k an exact integer.
        let mut term = BigUint::from(1u32);
        for (i, &p) in primes.iter().enumerate() {
            let e = d_max[i] - d_first[i];
            if e > 0 {
                term *= BigUint::from(p).pow(e as u32);
            }
        }
        let mut positive = BigUint::zero();
        let mut negative = BigUint::zero();
        for k in self.kmin..=self.kmax {
            if k % 2 == 0 {
                positive += &term;
            } else {
                negative += &term;
            }
            if k < self.kmax {
                term *= (self.a - k) * (self.g1 - k);
                term *= self.f2 - k;
                term /= (k + 1) * (self.alpha + k as i64 + 1) as u64;
                term /= (self.beta + k as i64 + 1) as u64;
            }
        }
        let (sum, sum_sign) = if positive >= negative {
            (positive - negative, 1.0)
        } else {
            (negative - positive, -1.0)
        };
        if sum.is_zero() {
            return 0.0;
        }

        // value = sign · sum · sqrt(Π p^E), E = pre − 2 d_max, split E = 2h + r.
        let mut numer = sum;
        let mut denom = BigUint::from(1u32);
        let mut radicand = BigUint::from(1u32);
        for (i, &p) in primes.iter().enumerate() {
            let e = pre[i] - 2 * d_max[i] as i64;
            let h = e.div_euclid(2);
            if h > 0 {
                numer *= BigUint::from(p).pow(h as u32);
            } else if h < 0 {
                denom *= BigUint::from(p).pow((-h) as u32);
            }
            if e.rem_euclid(2) == 1 {
                radicand *= p;
            }
        }
        let (mn, en) = scaled(&numer);
        let (md, ed) = scaled(&denom);
        let (mut mr, mut er) = scaled(&radicand);
        if er % 2 != 0 {
            mr *= 2.0;
            er -= 1;
        }
        let mantissa = mn / md * sqrt(mr);
        let exponent = en - ed + er / 2;
        self.sign * sum_sign * libm::scalbn(mantissa, exponent as i32)
    }
}

/// `x ≈ m · 2^e` with `m` holding the top 64 bits of `x`.
fn scaled(x: &BigUint) -> (f64, i64) {
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_u64().expect("fits in 64 bits");
    (top as f64, shift as i64)
}

/// Exponent of the prime `p` in `n!`.
fn legendre_exponent(n: u64, p: u64) -> u64 {
    let mut e = 0;
    let mut q = n / p;
    while q > 0 {
        e += q;
        q /= p;
    }
    e
}

fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut k = i * i;
            while k <= n {
                sieve[k] = false;
                k += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &is_prime)| is_prime.then_some(i as u64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i64) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    fn w(t: [i64; 6]) -> f64 {
        wigner3j(h(t[0]), h(t[1]), h(t[2]), h(t[3]), h(t[4]), h(t[5])).unwrap()
    }

    #[test]
    fn closed_form_k_zero() {
        // (1 1 0; 1 -1 0) = 1/sqrt(3)
        assert!((w([2, 2, 0, 2, -2, 0]) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        // (j j 0; m -m 0) = (-1)^(j-m)/sqrt(2j+1)
        for tj in 0..12i64 {
            for tm in (-tj..=tj).step_by(2) {
                let want = parity((tj - tm) / 2) / ((tj + 1) as f64).sqrt();
                assert!((w([tj, tj, 0, tm, -tm, 0]) - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn stretched_and_selection_rules() {
        assert!((w([2, 2, 4, 2, 2, -4]) - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(w([2, 2, 2, 2, 2, -2]), 0.0);
        // triangle violation
        assert_eq!(w([2, 2, 6, 0, 0, 0]), 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(wigner3j(h(2), h(2), h(2), h(4), h(-4), h(0)).is_err());
        assert!(wigner3j(h(1), h(2), h(1), h(0), h(0), h(0)).is_err());
        assert!(wigner3j(h(-2), h(2), h(0), h(0), h(0), h(0)).is_err());
    }

    #[test]
    fn exact_and_float_paths_agree_where_both_are_accurate() {
        for tj in [2i64, 3, 4, 6, 8, 10] {
            for tk in (0..=2 * tj).step_by(2) {
                for tq in (-tk..=tk).step_by(2) {
                    for tm in (-tj..=tj).step_by(2) {
                        let m2 = tm - tq;
                        if m2.abs() > tj {
                            continue;
                        }
                        let Some(sum) = RacahSum::new(h(tj), h(tk), h(tj), h(-tm), h(tq), h(m2)) else {
                            continue;
                        };
                        let (fl, _) = sum.evaluate_float();
                        let ex = sum.evaluate_exact();
                        assert!((fl - ex).abs() < 1e-13, "{tj} {tk} {tq} {tm}: {fl} vs {ex}");
                    }
                }
            }
        }
    }

    #[test]
    fn primes() {
        assert_eq!(primes_up_to(20), [2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(legendre_exponent(10, 2), 8);
    }
}
