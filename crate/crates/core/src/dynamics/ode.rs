//! Dormand-Prince 5(4) with step-size control, landing exactly on requested
//! output times. Systems are autonomous, so stage times are never needed.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;
use crate::{Error, Result};

/// Integration tolerances and limits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Hard cap on accepted plus rejected steps per call.
    pub max_steps: u64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { rtol: 1e-10, atol: 1e-12, max_steps: 50_000_000 }
    }
}

impl EvolveOptions {
    /// Both tolerances divided by `factor`.
    pub fn tightened(self, factor: f64) -> Self {
        EvolveOptions { rtol: self.rtol / factor, atol: self.atol / factor, ..self }
    }
}

pub(crate) trait OdeSystem {
    fn rhs(&self, y: &[f64], dy: &mut [f64]);
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// step-size controller (Hairer & Wanner's DOPRI5 defaults)
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

#[derive(Debug)]
pub(crate) struct Dopri5 {
    opts: EvolveOptions,
    h: f64,
    err_old: f64,
    k: [Vec<f64>; 7],
    y_stage: Vec<f64>,
    y_new: Vec<f64>,
    fsal: bool,
    pub(crate) steps: u64,
}

impl Dopri5 {
    pub(crate) fn new(dim: usize, opts: EvolveOptions) -> Self {
        Dopri5 {
            opts,
            h: 0.0,
            err_old: 1e-4,
            k: core::array::from_fn(|_| vec![0.0; dim]),
            y_stage: vec![0.0; dim],
            y_new: vec![0.0; dim],
            fsal: false,
            steps: 0,
        }
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.opts.atol + self.opts.rtol * a.abs().max(b.abs())
    }

    fn rms(&self, v: &[f64], y: &[f64]) -> f64 {
        let s: f64 = v.iter().zip(y).map(|(v, y)| (v / self.scale(*y, *y)) * (v / self.scale(*y, *y))).sum();
        sqrt(s / v.len().max(1) as f64)
    }

    fn initial_step(&mut self, sys: &impl OdeSystem, y: &[f64], span: f64) -> f64 {
        sys.rhs(y, &mut self.k[0]);
        let d0 = self.rms(y, y);
        let d1 = self.rms(&self.k[0], y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 }.min(span);
        for i in 0..y.len() {
            self.y_stage[i] = y[i] + h0 * self.k[0][i];
        }
        let (k0, rest) = self.k.split_at_mut(1);
        sys.rhs(&self.y_stage, &mut rest[0]);
        let diff: Vec<f64> = rest[0].iter().zip(&k0[0]).map(|(a, b)| a - b).collect();
        let d2 = self.rms(&diff, y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { libm::pow(0.01 / d1.max(d2), 0.2) };
        self.fsal = true;
        (100.0 * h0).min(h1).min(span)
    }

    /// Integrates `y` from `*t` to exactly `t_end`.
    pub(crate) fn advance(&mut self, sys: &impl OdeSystem, t: &mut f64, y: &mut [f64], t_end: f64) -> Result<()> {
        if t_end <= *t {
            return Ok(());
        }
        if self.h <= 0.0 {
            self.h = self.initial_step(sys, y, t_end - *t);
        }
        if !self.fsal {
            sys.rhs(y, &mut self.k[0]);
            self.fsal = true;
        }
        let n = y.len();
        let mut budget = self.opts.max_steps;
        while *t < t_end {
            if budget == 0 {
                return Err(Error::Stiffness { t: *t, step: self.h });
            }
            budget -= 1;
            self.steps += 1;
            let remaining = t_end - *t;
            // land on t_end without leaving a sliver behind
            let last = self.h >= remaining * (1.0 - 1e-12) || remaining - self.h < 1e-3 * self.h;
            let h = if last { remaining } else { self.h };
            if h < 1e-14 * t_end.abs().max(1e-300) {
                return Err(Error::Stiffness { t: *t, step: h });
            }
            self.stages(sys, y, h);
            let mut err = 0.0;
            for i in 0..n {
                let e = h
                    * (E1 * self.k[0][i]
                        + E3 * self.k[2][i]
                        + E4 * self.k[3][i]
                        + E5 * self.k[4][i]
                        + E6 * self.k[5][i]
                        + E7 * self.k[6][i]);
                let sc = self.scale(y[i], self.y_new[i]);
                err += (e / sc) * (e / sc);
            }
            let err = sqrt(err / n.max(1) as f64);
            let fac11 = libm::pow(err, 0.2 - 0.75 * BETA);
            if err <= 1.0 {
                let fac = (fac11 / libm::pow(self.err_old, BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                self.err_old = err.max(1e-4);
                *t = if last { t_end } else { *t + h };
                y.copy_from_slice(&self.y_new);
                self.k.swap(0, 6);
                let h_next = h / fac;
                // a shortened final step says nothing about the natural step
                self.h = if last && h < self.h { self.h.max(h_next) } else { h_next };
            } else {
                self.h = h / (fac11 / SAFETY).min(1.0 / FAC_MIN);
            }
        }
        Ok(())
    }

    fn stages(&mut self, sys: &impl OdeSystem, y: &[f64], h: f64) {
        let n = y.len();
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        let ys = &mut self.y_stage;
        for i in 0..n {
            ys[i] = y[i] + h * A21 * k1[i];
        }
        sys.rhs(ys, k2);
        for i in 0..n {
            ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        sys.rhs(ys, k3);
        for i in 0..n {
            ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        sys.rhs(ys, k4);
        for i in 0..n {
            ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        sys.rhs(ys, k5);
        for i in 0..n {
            ys[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        sys.rhs(ys, k6);
        let yn = &mut self.y_new;
        for i in 0..n {
            yn[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        sys.rhs(yn, k7);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay(f64);
    impl OdeSystem for Decay {
        fn rhs(&self, y: &[f64], dy: &mut [f64]) {
            dy[0] = -self.0 * y[0];
        }
    }

    struct Oscillator;
    impl OdeSystem for Oscillator {
        fn rhs(&self, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[1];
            dy[1] = -y[0];
        }
    }

    #[test]
    fn exponential_decay() {
        let mut solver = Dopri5::new(1, EvolveOptions::default());
        let mut y = [1.0];
        let mut t = 0.0;
        for k in 1..=10 {
            let te = 0.3 * k as f64;
            solver.advance(&Decay(2.0), &mut t, &mut y, te).unwrap();
            assert_eq!(t, te);
            assert!((y[0] - libm::exp(-2.0 * te)).abs() < 1e-10);
        }
    }

    #[test]
    fn harmonic_oscillator_period() {
        let mut solver = Dopri5::new(2, EvolveOptions::default());
        let mut y = [1.0, 0.0];
        let mut t = 0.0;
        solver.advance(&Oscillator, &mut t, &mut y, 2.0 * core::f64::consts::PI).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-9 && y[1].abs() < 1e-9);
    }

    #[test]
    fn step_budget_reports_stiffness() {
        let opts = EvolveOptions { max_steps: 10, ..EvolveOptions::default() };
        let mut solver = Dopri5::new(1, opts);
        let mut y = [1.0];
        let mut t = 0.0;
        let r = solver.advance(&Decay(1e6), &mut t, &mut y, 1.0);
        assert!(matches!(r, Err(Error::Stiffness { .. })));
    }
}
