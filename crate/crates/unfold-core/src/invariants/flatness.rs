//! Exponential flatness: fitting `|difference| ≈ C e^{−K/|x|^e}` along a
//! ray of parameters.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fatou::{FatouConfig, FatouFiber, NormalForm, UnfoldingMap};
use crate::num::{ln, powf, C64, ZERO};

/// Differences at or below this are indistinguishable from roundoff.
pub const FLATNESS_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatnessSample {
    pub x: C64,
    pub difference: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub k: f64,
    /// `ln C`.
    pub log_prefactor: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatnessFit {
    /// Best exponent over a continuous search.
    pub best: ExponentFit,
    /// Fits at the predicted levels and `ν`.
    pub candidates: Vec<ExponentFit>,
    pub predicted_level: f64,
    pub samples: Vec<FlatnessSample>,
    /// Every difference was below [`FLATNESS_FLOOR`].
    pub vacuous: bool,
}

/// Least-squares line `ln d = ln C − K |x|^{−e}`.
pub fn fit_exponent(samples: &[FlatnessSample], e: f64) -> ExponentFit {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.difference > FLATNESS_FLOOR)
        .map(|s| (powf(s.x.norm(), -e), ln(s.difference)))
        .collect();
    let n = pts.len() as f64;
    let (mu, mv) = pts
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let (mut suu, mut suv, mut svv) = (0.0, 0.0, 0.0);
    for (u, v) in &pts {
        suu += (u - mu) * (u - mu);
        suv += (u - mu) * (v - mv);
        svv += (v - mv) * (v - mv);
    }
    let slope = if suu > 0.0 { suv / suu } else { 0.0 };
    let r_squared = if suu > 0.0 && svv > 0.0 {
        suv * suv / (suu * svv)
    } else {
        0.0
    };
    ExponentFit {
        exponent: e,
        k: -slope,
        log_prefactor: mv - slope * mu,
        r_squared,
    }
}

/// Golden-section search for the exponent of best `R²` in `[lo, hi]`,
/// plus fits at each candidate exponent.
pub fn fit_flatness(
    samples: Vec<FlatnessSample>,
    candidates: &[f64],
    predicted_level: f64,
) -> Result<FlatnessFit> {
    let usable = samples
        .iter()
        .filter(|s| s.difference > FLATNESS_FLOOR)
        .count();
    if usable == 0 {
        let zero = ExponentFit {
            exponent: predicted_level,
            k: f64::INFINITY,
            log_prefactor: f64::NEG_INFINITY,
            r_squared: 1.0,
        };
        return Ok(FlatnessFit {
            best: zero,
            candidates: Vec::new(),
            predicted_level,
            samples,
            vacuous: true,
        });
    }
    if usable < 3 {
        return Err(Error::InvalidInput(
            "flatness fit needs three resolvable differences".into(),
        ));
    }
    let (mut lo, mut hi) = (0.2f64, 4.0f64);
    let g = 0.5 * (crate::num::sqrt(5.0) - 1.0);
    let score = |e: f64| fit_exponent(&samples, e).r_squared;
    let (mut a, mut b) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut fa, mut fb) = (score(a), score(b));
    for _ in 0..80 {
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = score(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = score(b);
        }
    }
    let best = fit_exponent(&samples, 0.5 * (lo + hi));
    let candidates = candidates
        .iter()
        .map(|&e| fit_exponent(&samples, e))
        .collect();
    Ok(FlatnessFit {
        best,
        candidates,
        predicted_level,
        samples,
        vacuous: false,
    })
}

/// Which fixed point a petal coordinate's orbit sums converge to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Realization {
    /// Iterate along the petal's orientation.
    Forward,
    /// Iterate against it.
    Backward,
}

impl Realization {
    fn sign(self, orientation: i32) -> i32 {
        match self {
            Realization::Forward => orientation,
            Realization::Backward => -orientation,
        }
    }
}

/// Oscillation of `ψ_j^{b} − ψ_j^{a}` along one period of the `ψ̈_j` line
/// through `p`, with the mean offset removed.
pub fn line_difference(
    fiber: &FatouFiber,
    j: usize,
    p: C64,
    configs: (Realization, Realization),
    points: usize,
) -> Result<f64> {
    let orientation = fiber.petal(j)?.orientation;
    let (sa, sb) = (configs.0.sign(orientation), configs.1.sign(orientation));
    let diffs = (0..points)
        .map(|m| {
            let q = fiber.psi_shift(j, p, C64::new(m as f64 / points as f64, 0.0))?;
            if sa == sb {
                return Ok(ZERO);
            }
            Ok(fiber.orbit_sum(q, sb)?.value - fiber.orbit_sum(q, sa)?.value)
        })
        .collect::<Result<Vec<C64>>>()?;
    let mean = diffs.iter().fold(ZERO, |a, d| a + d) / points as f64;
    Ok(diffs.iter().map(|d| (d - mean).norm()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaySamples {
    pub samples: Vec<FlatnessSample>,
    /// Parameters where the line left the common domain of the two
    /// coordinates (some orbit escaped).
    pub outside: Vec<C64>,
}

/// [`line_difference`] at `y = x·w` for `x = r·direction`, `r` in `radii`.
///
/// Fixing `w` fixes the line's height in the overlap band in units of
/// `1/|x|`, which is what makes the difference exponentially flat.
#[allow(clippy::too_many_arguments)]
pub fn ray_differences(
    map: &UnfoldingMap,
    nf: &NormalForm,
    petal: usize,
    configs: (Realization, Realization),
    direction: C64,
    radii: &[f64],
    w: C64,
    points: usize,
    config: FatouConfig,
) -> Result<RaySamples> {
    let mut out = RaySamples {
        samples: Vec::new(),
        outside: Vec::new(),
    };
    for &r in radii {
        let x = direction * r;
        let fiber = FatouFiber::new(map, nf, x, config)?;
        match line_difference(&fiber, petal, x * w, configs, points) {
            Ok(difference) => out.samples.push(FlatnessSample { x, difference }),
            Err(Error::OrbitEscaped { .. } | Error::BudgetExhausted { .. }) => out.outside.push(x),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::exp;

    #[test]
    fn recovers_synthetic_exponent() {
        let samples: Vec<FlatnessSample> = (0..8)
            .map(|m| {
                let r = 0.2 * powf(0.72, m as f64);
                FlatnessSample {
                    x: C64::new(r, 0.0),
                    difference: 3.0 * exp(-0.4 / powf(r, 1.5)),
                }
            })
            .collect();
        let fit = fit_flatness(samples, &[1.0, 2.0], 1.5).unwrap();
        assert!((fit.best.exponent - 1.5).abs() < 1e-3);
        assert!((fit.best.k - 0.4).abs() < 1e-3);
        assert!(fit.best.r_squared > 0.9999);
    }

    #[test]
    fn zero_difference_is_vacuous() {
        let samples = alloc::vec![FlatnessSample {
            x: C64::new(0.1, 0.0),
            difference: 0.0
        }];
        assert!(fit_flatness(samples, &[1.0], 1.0).unwrap().vacuous);
    }
}
