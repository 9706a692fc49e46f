//! Cauchy–Heine coefficients of a cocycle of sectorial differences:
//! `h_n = (1/2πi) Σ_k ∫_0^{c λ_k} (h_k − h_{k−1})(w) w^{−(n+1)} dw`.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{C64, GL10, I, ZERO};

const MAX_DEPTH: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyHeine {
    /// `h_n` for `n = 0..=n_max`.
    pub coeffs: Vec<C64>,
    /// Panels used by the adaptive quadrature, summed over rays and `n`.
    pub panels: usize,
}

/// `difference(k, w)` is `(h_k − h_{k−1})(w)` on the ray `w ∈ [0, c·rays[k]]`;
/// it must vanish to all orders at `0`.
pub fn cauchy_heine<F>(
    rays: &[C64],
    difference: F,
    radius: f64,
    n_max: usize,
    tol: f64,
) -> Result<CauchyHeine>
where
    F: Fn(usize, C64) -> C64,
{
    if radius.is_nan() || radius <= 0.0 || rays.iter().any(|l| (l.norm() - 1.0).abs() > 1e-12) {
        return Err(Error::InvalidInput(
            "rays must be unit directions and the radius positive".into(),
        ));
    }
    let mut out = CauchyHeine {
        coeffs: Vec::with_capacity(n_max + 1),
        panels: 0,
    };
    for n in 0..=n_max {
        let mut acc = ZERO;
        for (k, &dir) in rays.iter().enumerate() {
            let f = |t: f64| integrand(&difference, k, dir, n, t);
            acc += adaptive(&f, 0.0, radius, tol, 0, &mut out.panels)? * dir;
        }
        out.coeffs.push(acc / (TAU * I));
    }
    Ok(out)
}

/// The integrand in the ray parameter `t`; a vanishing difference is
/// returned as zero before `w^{−(n+1)}` can overflow.
fn integrand<F: Fn(usize, C64) -> C64>(
    difference: &F,
    k: usize,
    dir: C64,
    n: usize,
    t: f64,
) -> C64 {
    if t == 0.0 {
        return ZERO;
    }
    let w = dir * t;
    let d = difference(k, w);
    if d == ZERO {
        return ZERO;
    }
    let v = d / w.powi(n as i32 + 1);
    if v.re.is_finite() && v.im.is_finite() {
        v
    } else {
        ZERO
    }
}

fn panel(f: &impl Fn(f64) -> C64, a: f64, b: f64) -> C64 {
    GL10.iter()
        .map(|&(t, w)| f(a + (b - a) * t) * w)
        .sum::<C64>()
        * (b - a)
}

fn adaptive(
    f: &impl Fn(f64) -> C64,
    a: f64,
    b: f64,
    tol: f64,
    depth: usize,
    panels: &mut usize,
) -> Result<C64> {
    let m = 0.5 * (a + b);
    let whole = panel(f, a, b);
    let halves = panel(f, a, m) + panel(f, m, b);
    let err = (whole - halves).norm();
    if err <= tol * (1.0 + halves.norm()) {
        *panels += 2;
        return Ok(halves);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::NoConvergence {
            what: "Cauchy–Heine quadrature",
            residual: err,
        });
    }
    Ok(adaptive(f, a, m, tol, depth + 1, panels)? + adaptive(f, m, b, tol, depth + 1, panels)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{exp, ONE};

    #[test]
    fn zero_differences_give_zero() {
        let ch = cauchy_heine(&[ONE, -ONE], |_, _| ZERO, 1.0, 6, 1e-12).unwrap();
        assert!(ch.coeffs.iter().all(|c| *c == ZERO));
    }

    /// `∫_0^c e^{−1/t²} t^{−(n+1)} dt = Γ(n/2, 1/c²)/2`.
    #[test]
    fn single_ray_is_incomplete_gamma() {
        let c = 0.8;
        let z = 1.0 / (c * c);
        let ch = cauchy_heine(&[ONE], |_, w| (-(w * w).inv()).exp(), c, 6, 1e-13).unwrap();
        for (n, h) in ch.coeffs.iter().enumerate().skip(1) {
            let expected = 0.5 * upper_gamma_half(n, z);
            let got = *h * TAU * I;
            assert!(
                (got - C64::new(expected, 0.0)).norm() < 1e-10 * expected,
                "n = {n}: {got} vs {expected}"
            );
        }
    }

    /// `Γ(n/2, z)` for `n ≥ 1` by upward recurrence from `Γ(1/2, z)`, `Γ(1, z)`.
    fn upper_gamma_half(n: usize, z: f64) -> f64 {
        let mut g = if n % 2 == 1 {
            libm::sqrt(core::f64::consts::PI) * libm::erfc(libm::sqrt(z))
        } else {
            exp(-z)
        };
        let mut a = if n % 2 == 1 { 0.5 } else { 1.0 };
        while a < n as f64 / 2.0 - 1e-9 {
            g = a * g + libm::pow(z, a) * exp(-z);
            a += 1.0;
        }
        g
    }

    /// The Euler series `Σ (−1)^n n! x^n` jumps by `2πi e^{1/x}/x` across the
    /// negative axis. The coefficients come out as `(−1)^n Γ(n+1, 1/c)`,
    /// within `γ(n+1, 1/c)` of the series coefficients.
    #[test]
    fn euler_series_coefficients() {
        let c = 10.0;
        let z = 1.0 / c;
        let ch = cauchy_heine(&[-ONE], |_, w| -TAU * I * w.inv().exp() / w, c, 6, 1e-13).unwrap();
        let (mut factorial, mut partial, mut power) = (1.0, 0.0, 1.0);
        for (n, h) in ch.coeffs.iter().enumerate() {
            if n > 0 {
                factorial *= n as f64;
                power *= z / n as f64;
            }
            partial += power;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let upper = factorial * exp(-z) * partial;
            assert!(
                (*h - C64::new(sign * upper, 0.0)).norm() < 1e-10 * upper,
                "n = {n}: {h}"
            );
            let gap = factorial - upper;
            assert!((*h - C64::new(sign * factorial, 0.0)).norm() <= gap * (1.0 + 1e-8));
            assert!(gap < libm::pow(z, (n + 1) as f64));
        }
    }
}
