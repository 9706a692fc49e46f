//! Translation action of conjugacies on horn-map coefficients:
//! `a^η_{j,l} = a^φ_{j,l} e^{2πiυ l c}`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::horn::HornMap;
use crate::num::{round, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessStatus {
    /// One `c` explains every stored coefficient.
    Consistent,
    Inconsistent,
    /// No stored coefficient with `l ≥ 1` is nonzero on both sides.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyWitness {
    pub x: C64,
    pub c: Option<C64>,
    /// `((j, l), relative residual)` for every coefficient used.
    pub residuals: Vec<((usize, usize), f64)>,
    /// Largest difference of constant terms.
    pub translation_residual: f64,
    pub status: WitnessStatus,
}

impl ConjugacyWitness {
    pub fn max_residual(&self) -> f64 {
        self.residuals
            .iter()
            .map(|r| r.1)
            .fold(self.translation_residual, f64::max)
    }
}

/// `((j, l), relative residual)`.
type Residual = ((usize, usize), f64);

fn predicted(a: C64, upsilon: i32, l: usize, c: C64) -> C64 {
    a * (C64::new(0.0, 2.0 * PI * upsilon as f64 * l as f64) * c).exp()
}

/// Finds `c` from the lowest usable mode and validates it on all others.
/// Both systems should be homogeneous and share petal order.
pub fn conjugacy_translation(
    x: C64,
    phi: &[HornMap],
    eta: &[HornMap],
    tol: f64,
) -> ConjugacyWitness {
    let mut pairs: Vec<(usize, usize, i32, C64, C64)> = Vec::new();
    for (mp, me) in phi.iter().zip(eta) {
        for (cp, ce) in mp.coeffs.iter().zip(&me.coeffs) {
            if cp.l >= 1
                && cp.reliable
                && ce.reliable
                && cp.value.norm() > 0.0
                && ce.value.norm() > 0.0
            {
                pairs.push((mp.petal, cp.l, mp.upsilon, cp.value, ce.value));
            }
        }
    }
    let translation_residual = phi
        .iter()
        .zip(eta)
        .map(|(a, b)| (a.coeffs[0].value - b.coeffs[0].value).norm())
        .fold(0.0, f64::max);
    pairs.sort_by_key(|p| (p.1, p.0));
    let Some(&(_, l0, u0, a0, b0)) = pairs.first() else {
        return ConjugacyWitness {
            x,
            c: None,
            residuals: Vec::new(),
            translation_residual,
            status: WitnessStatus::Undetermined,
        };
    };
    let base = (b0 / a0).ln() / C64::new(0.0, 2.0 * PI * u0 as f64 * l0 as f64);
    let base = C64::new(base.re - round(base.re * l0 as f64) / l0 as f64, base.im);
    let evaluate = |c: C64| -> Vec<Residual> {
        pairs
            .iter()
            .map(|&(j, l, u, a, b)| ((j, l), (b - predicted(a, u, l, c)).norm() / a.norm()))
            .collect()
    };
    // c is fixed by the first mode only modulo 1/l0
    let mut best: Option<(f64, C64, Vec<Residual>)> = None;
    for m in 0..l0 {
        let mut c = base + m as f64 / l0 as f64;
        if c.re > 0.5 {
            c -= 1.0;
        }
        let res = evaluate(c);
        let worst = res.iter().map(|r| r.1).fold(0.0, f64::max);
        let better = match &best {
            None => true,
            Some((w, bc, _)) => worst < *w - 1e-12 || (worst <= *w + 1e-12 && c.norm() < bc.norm()),
        };
        if better {
            best = Some((worst, c, res));
        }
    }
    let (worst, c, residuals) = best.expect("l0 ≥ 1");
    let status = if worst <= tol && translation_residual <= tol {
        WitnessStatus::Consistent
    } else {
        WitnessStatus::Inconsistent
    };
    ConjugacyWitness {
        x,
        c: Some(c),
        residuals,
        translation_residual,
        status,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::HornCoeff;
    use alloc::vec;

    fn map(petal: usize, upsilon: i32, vals: &[C64]) -> HornMap {
        HornMap {
            petal,
            upsilon,
            height: 1.0,
            coeffs: vals
                .iter()
                .enumerate()
                .map(|(l, v)| HornCoeff {
                    l,
                    value: *v,
                    uncertainty: 0.0,
                    reliable: true,
                })
                .collect(),
            noise_floor: 0.0,
            periodicity_residual: 0.0,
        }
    }

    #[test]
    fn recovers_translation() {
        let c = C64::new(0.13, -0.02);
        let a = [C64::new(0.5, 0.0), C64::new(2.0, 1.0), C64::new(-3.0, 0.5)];
        let b = [C64::new(-0.1, 0.3), C64::new(1.0, -1.0), C64::new(0.2, 0.2)];
        let phi = vec![map(0, 1, &a), map(1, -1, &b)];
        let eta: Vec<HornMap> = phi
            .iter()
            .map(|m| {
                let v: Vec<C64> = m
                    .coeffs
                    .iter()
                    .map(|k| {
                        if k.l == 0 {
                            k.value
                        } else {
                            predicted(k.value, m.upsilon, k.l, c)
                        }
                    })
                    .collect();
                map(m.petal, m.upsilon, &v)
            })
            .collect();
        let w = conjugacy_translation(C64::new(0.0, 0.0), &phi, &eta, 1e-10);
        assert_eq!(w.status, WitnessStatus::Consistent);
        assert!((w.c.unwrap() - c).norm() < 1e-12);
        let same = conjugacy_translation(C64::new(0.0, 0.0), &phi, &phi, 1e-10);
        assert!(same.c.unwrap().norm() < 1e-15);
        let mut bad = eta.clone();
        bad[1].coeffs[1].value *= 1.01;
        let w = conjugacy_translation(C64::new(0.0, 0.0), &phi, &bad, 1e-5);
        assert_eq!(w.status, WitnessStatus::Inconsistent);
    }

    #[test]
    fn zero_coefficients_are_undetermined() {
        let z = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let phi = vec![map(0, 1, &z)];
        let w = conjugacy_translation(C64::new(0.0, 0.0), &phi, &phi, 1e-8);
        assert_eq!(w.status, WitnessStatus::Undetermined);
    }
}
