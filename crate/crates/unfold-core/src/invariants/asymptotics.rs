//! Asymptotic coefficients in `x` of quantities sampled along a ray, and
//! their comparison with the formal infinitesimal generator.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fatou::{FatouConfig, FatouFiber, NormalForm, UnfoldingMap};
use crate::num::{C64, ZERO};

/// Value and first derivative at `0` of the interpolating polynomial
/// through `(t_m, v_m)`: polynomial (Richardson) extrapolation to `t = 0`.
pub fn richardson(ts: &[f64], values: &[C64]) -> Result<(C64, C64)> {
    if ts.len() != values.len() || ts.len() < 2 {
        return Err(Error::InvalidInput(
            "extrapolation needs matching samples, at least two".into(),
        ));
    }
    let n = ts.len();
    // Newton divided differences, in place
    let mut d = values.to_vec();
    for k in 1..n {
        for m in (k..n).rev() {
            let gap = ts[m] - ts[m - k];
            if gap == 0.0 {
                return Err(Error::InvalidInput(
                    "extrapolation nodes must be distinct".into(),
                ));
            }
            d[m] = (d[m] - d[m - 1]) / gap;
        }
    }
    let (mut p, mut dp) = (d[n - 1], ZERO);
    for k in (0..n - 1).rev() {
        dp = dp * (-ts[k]) + p;
        p = p * (-ts[k]) + d[k];
    }
    Ok((p, dp))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LavaursCoefficients {
    pub y: C64,
    /// `x⁰` coefficient.
    pub g0: C64,
    /// `x¹` coefficient.
    pub g1: C64,
}

/// `x⁰` and `x¹` coefficients of the Lavaurs field of petal `j` at each
/// `y`, extrapolated from `x = r·direction`, `r` in `radii`.
pub fn lavaurs_asymptotics(
    map: &UnfoldingMap,
    nf: &NormalForm,
    petal: usize,
    direction: C64,
    radii: &[f64],
    ys: &[C64],
    config: FatouConfig,
) -> Result<Vec<LavaursCoefficients>> {
    let mut samples: Vec<Vec<C64>> = alloc::vec![Vec::with_capacity(radii.len()); ys.len()];
    for &r in radii {
        let fiber = FatouFiber::new(map, nf, direction * r, config)?;
        for (col, &y) in samples.iter_mut().zip(ys) {
            col.push(fiber.lavaurs(petal, y)?);
        }
    }
    ys.iter()
        .zip(&samples)
        .map(|(&y, col)| {
            let (g0, d1) = richardson(radii, col)?;
            Ok(LavaursCoefficients {
                y,
                g0,
                g1: d1 / direction,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrapolates_a_polynomial_exactly() {
        let ts = [0.08, 0.04, 0.02, 0.01];
        let f = |t: f64| C64::new(2.0 - 3.0 * t + 5.0 * t * t, t * t * t);
        let vals: Vec<C64> = ts.iter().map(|&t| f(t)).collect();
        let (c0, c1) = richardson(&ts, &vals).unwrap();
        assert!((c0 - C64::new(2.0, 0.0)).norm() < 1e-12);
        assert!((c1 - C64::new(-3.0, 0.0)).norm() < 1e-10);
    }
}
