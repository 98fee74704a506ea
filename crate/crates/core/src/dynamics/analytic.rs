//! Closed-form pieces of the damped polar-cat dynamics.

use alloc::vec;
use alloc::vec::Vec;

use super::BathParams;
use crate::math::exp;
use crate::specfun::gauss_legendre;

/// `ρ_{-j,j}(t) = ½ exp(-j(2n̄+1)t)` for the polar cat.
pub fn coherence_analytic(n_atoms: usize, bath: BathParams, t: f64) -> f64 {
    0.5 * exp(-corner_rate(n_atoms, bath) * t)
}

/// Decay rate `j(2n̄+1)` of the corner element.
pub fn corner_rate(n_atoms: usize, bath: BathParams) -> f64 {
    0.5 * n_atoms as f64 * (2.0 * bath.nbar() + 1.0)
}

/// `t_dec = 2/(N(2n̄+1))`, the 1/e time of the corner coherence.
pub fn t_dec(n_atoms: usize, bath: BathParams) -> f64 {
    2.0 / (n_atoms as f64 * (2.0 * bath.nbar() + 1.0))
}

/// Boltzmann populations `ρ̄_mm ∝ q^{m+j}`, `q = n̄/(n̄+1)`, indexed by
/// `m + j`. At `n̄ = 0` all weight sits at `m = -j`.
pub fn stationary_state(n_atoms: usize, bath: BathParams) -> Vec<f64> {
    let nbar = bath.nbar();
    let mut p = vec![0.0; n_atoms + 1];
    if nbar == 0.0 {
        p[0] = 1.0;
        return p;
    }
    let q = nbar / (nbar + 1.0);
    let mut w = 1.0;
    for x in p.iter_mut() {
        *x = w;
        w *= q;
    }
    let sum: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= sum);
    p
}

/// `E = Σ_m m ρ_mm` (units of `ħω_a`), populations indexed by `m + j`.
pub fn energy(populations: &[f64]) -> f64 {
    let j = (populations.len() as f64 - 1.0) / 2.0;
    populations.iter().enumerate().map(|(i, p)| (i as f64 - j) * p).sum()
}

/// Energy of the stationary state from the geometric-series closed form
/// `n̄ - (N+1) q^{N+1}/(1-q^{N+1}) - j`.
pub fn stationary_energy(n_atoms: usize, bath: BathParams) -> f64 {
    let nbar = bath.nbar();
    let j = n_atoms as f64 / 2.0;
    if nbar == 0.0 {
        return -j;
    }
    let n1 = (n_atoms + 1) as f64;
    // q^{N+1} and 1 - q^{N+1} without cancellation
    let log_q = libm::log1p(-1.0 / (nbar + 1.0));
    let qn = exp(n1 * log_q);
    let one_minus = -libm::expm1(n1 * log_q);
    nbar - n1 * qn / one_minus - j
}

/// Zero-temperature populations at time `t` from the downward cascade
///
/// ```text
/// ρ_jj(t) = ½ e^{-2jt}
/// ρ_mm(t) = e^{-b_m t} (½ δ_{m,-j} + b_{m+1} ∫_0^t e^{b_m t'} ρ_{m+1,m+1}(t') dt')
/// ```
///
/// with `b_m = j(j+1) - m(m-1)`. Each level is tabulated on Gauss-Legendre
/// panels and the next level's convolution integral is done with the same
/// panels; the panel count doubles until successive results agree to 1e-12.
/// Repeated rates (`b_m = b_{1-m}`) need no special treatment.
pub fn zero_temp_cascade(n_atoms: usize, t: f64) -> Vec<f64> {
    if t <= 0.0 {
        let mut p = vec![0.0; n_atoms + 1];
        p[0] += 0.5;
        p[n_atoms] += 0.5;
        return p;
    }
    let mut panels = 4;
    let mut prev = cascade_on_panels(n_atoms, t, panels);
    loop {
        panels *= 2;
        let next = cascade_on_panels(n_atoms, t, panels);
        let change = next.iter().zip(&prev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if change < 1e-12 || panels >= 1 << 14 {
            return next;
        }
        prev = next;
    }
}

const ORDER: usize = 12;

/// Values of every level at the end time, with `panels` equal panels.
fn cascade_on_panels(n_atoms: usize, t_end: f64, panels: usize) -> Vec<f64> {
    let j = n_atoms as f64 / 2.0;
    let b = |i: usize| {
        let m = i as f64 - j;
        j * (j + 1.0) - m * (m - 1.0)
    };
    let (xs, ws) = gauss_legendre(ORDER);
    let h = t_end / panels as f64;
    // node times, panel-major
    let nodes: Vec<f64> =
        (0..panels).flat_map(|p| xs.iter().map(move |x| h * (p as f64 + 0.5 * (x + 1.0)))).collect();
    let mut out = vec![0.0; n_atoms + 1];
    // level m = j: closed form at the nodes
    let mut upper: Vec<f64> = nodes.iter().map(|&s| 0.5 * exp(-2.0 * j * s)).collect();
    out[n_atoms] = 0.5 * exp(-2.0 * j * t_end);
    for i in (0..n_atoms).rev() {
        let (bm, feed) = (b(i), b(i + 1));
        let start = if i == 0 { 0.5 } else { 0.0 };
        let mut level = vec![0.0; nodes.len()];
        // I(a) = ∫_0^a e^{-b_m (a - s)} ρ_{m+1}(s) ds at panel starts
        let mut acc = 0.0;
        for p in 0..panels {
            let a = p as f64 * h;
            let base = &upper[p * ORDER..(p + 1) * ORDER];
            let panel_nodes = &nodes[p * ORDER..(p + 1) * ORDER];
            for (k, &tau) in panel_nodes.iter().enumerate() {
                // ∫_a^τ e^{-b (τ - s)} g(s) ds with g interpolated on the panel
                let part = interval_integral(&xs, &ws, a, h, base, a, tau, bm);
                level[p * ORDER + k] = start * exp(-bm * tau) + feed * (exp(-bm * (tau - a)) * acc + part);
            }
            acc = exp(-bm * h) * acc + interval_integral(&xs, &ws, a, h, base, a, a + h, bm);
        }
        out[i] = start * exp(-bm * t_end) + feed * acc;
        upper = level;
    }
    out
}

/// `∫_lo^hi e^{-b (hi - s)} g(s) ds`, `g` given by its values on the
/// Gauss-Legendre nodes of the panel `[a, a + h]`.
#[allow(clippy::too_many_arguments)]
fn interval_integral(xs: &[f64], ws: &[f64], a: f64, h: f64, g: &[f64], lo: f64, hi: f64, b: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let half = 0.5 * (hi - lo);
    xs.iter()
        .zip(ws)
        .map(|(x, w)| {
            let s = lo + half * (x + 1.0);
            w * half * exp(-b * (hi - s)) * lagrange(xs, g, 2.0 * (s - a) / h - 1.0)
        })
        .sum()
}

/// Lagrange interpolation through `(xs, ys)` at `x` (barycentric form).
fn lagrange(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, (&xk, &yk)) in xs.iter().zip(ys).enumerate() {
        let d = x - xk;
        if d == 0.0 {
            return yk;
        }
        let mut wk = 1.0;
        for (i, &xi) in xs.iter().enumerate() {
            if i != k {
                wk /= xk - xi;
            }
        }
        let c = wk / d;
        num += c * yk;
        den += c;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let b0 = BathParams::new(0.0).unwrap();
        assert_eq!(t_dec(5, b0), 0.4);
        assert!((t_dec(5, BathParams::new(10.0).unwrap()) - 2.0 / 105.0).abs() < 1e-16);
        assert_eq!(t_dec(1000, b0), 0.002);
        assert_eq!(coherence_analytic(7, b0, 0.0), 0.5);
        assert!((coherence_analytic(5, b0, 0.4) - 0.5 * libm::exp(-1.0)).abs() < 1e-16);
    }

    #[test]
    fn boltzmann() {
        let p = stationary_state(6, BathParams::new(0.0).unwrap());
        assert_eq!(p[0], 1.0);
        assert!(p[1..].iter().all(|&x| x == 0.0));
        let p = stationary_state(10, BathParams::new(1e6).unwrap());
        assert!(p.iter().all(|&x| (x - 1.0 / 11.0).abs() < 1e-4));
        for n in [1, 5, 50, 1000] {
            for nbar in [0.0, 0.5, 1.0, 10.0, 100.0] {
                let bath = BathParams::new(nbar).unwrap();
                let p = stationary_state(n, bath);
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
                // geometric (Boltzmann) shape
                if nbar > 0.0 {
                    let q = nbar / (nbar + 1.0);
                    let z = (nbar + 1.0) * (1.0 - libm::pow(q, (n + 1) as f64));
                    for (i, x) in p.iter().enumerate().take(40) {
                        assert!((x - libm::pow(q, i as f64) / z).abs() < 1e-13 * (1.0 + x));
                    }
                }
                let direct = energy(&p);
                assert!((stationary_energy(n, bath) - direct).abs() < 1e-9 * (1.0 + direct.abs()), "{n} {nbar}");
            }
        }
    }

    #[test]
    fn cascade_basics() {
        for n in 1..=10 {
            for &t in &[0.0, 0.05, 0.3, 1.0, 5.0] {
                let p = zero_temp_cascade(n, t);
                let j = n as f64 / 2.0;
                assert!((p[n] - 0.5 * libm::exp(-2.0 * j * t)).abs() < 1e-14);
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10, "N={n} t={t}");
            }
        }
        let p = zero_temp_cascade(4, 0.0);
        assert_eq!(energy(&p), 0.0);
    }
}
