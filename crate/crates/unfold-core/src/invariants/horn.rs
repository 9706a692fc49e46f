//! Horn maps `ξ_j = ψ_{j+1} ∘ ψ_j^{-1}` and their Fourier coefficients.

use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fatou::{FatouConfig, FatouFiber};
use crate::num::{cis, exp, C64, ZERO};

/// Coefficients known to this relative accuracy are stored as reliable.
pub const RELIABLE_REL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HornConfig {
    pub fatou: FatouConfig,
    /// Points on the sampling line.
    pub samples: usize,
    /// Highest Fourier mode reported.
    pub modes: usize,
    /// Overlap height; calibrated when absent.
    pub height: Option<f64>,
    /// Extra height above the overlap threshold at which to sample.
    pub margin: f64,
}

impl Default for HornConfig {
    fn default() -> Self {
        HornConfig {
            fatou: FatouConfig::default(),
            samples: 256,
            modes: 8,
            height: None,
            margin: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HornCoeff {
    pub l: usize,
    pub value: C64,
    /// Sampling noise carried into `value` by undoing the decay of the mode.
    pub uncertainty: f64,
    /// Relative uncertainty below [`RELIABLE_REL`].
    pub reliable: bool,
}

/// `ξ_j(z) = z + Σ_l a_l e^{2πi υ l z}` on the overlap of petal `j` with
/// the next one counterclockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HornMap {
    pub petal: usize,
    /// `υ = −s_j`, the sign making every mode decay into the overlap.
    pub upsilon: i32,
    /// Overlap threshold `M`; samples sit at `|Im z| = M + margin`.
    pub height: f64,
    pub coeffs: Vec<HornCoeff>,
    /// Typical magnitude of the DFT modes that must vanish.
    pub noise_floor: f64,
    /// `|ξ(z + 1) − ξ(z) − 1|` at a sample point.
    pub periodicity_residual: f64,
}

impl HornMap {
    pub fn coeff(&self, l: usize) -> Option<&HornCoeff> {
        self.coeffs.get(l)
    }

    /// Evaluates the truncated Fourier series, reliable modes only.
    pub fn eval(&self, z: C64) -> C64 {
        let u = self.upsilon as f64;
        z + self
            .coeffs
            .iter()
            .filter(|c| c.reliable)
            .map(|c| c.value * (C64::new(0.0, 2.0 * PI * u * c.l as f64) * z).exp())
            .sum::<C64>()
    }
}

/// Non-constant part of `ξ_j(z) − z`: `S_{j+1}(p) − S_j(p)` at
/// `p = ψ̈_j^{-1}(z)`.
fn transit(fiber: &FatouFiber, j: usize, z: C64) -> Result<C64> {
    let n = fiber.petals().len();
    let here = fiber.petal(j)?.orientation;
    let next = fiber.petals()[(j + 1) % n].orientation;
    let (p, _) = fiber.psi_inverse(j, z)?;
    Ok(fiber.orbit_sum(p, next)?.value - fiber.orbit_sum(p, here)?.value)
}

fn line(s: i32, h: f64, t: f64) -> C64 {
    C64::new(t, -(s as f64) * h)
}

/// Smallest height, in steps of `1/2`, where transits succeed on a coarse
/// probe of the sampling line.
pub fn overlap_height(fiber: &FatouFiber, j: usize) -> Result<f64> {
    let s = fiber.petal(j)?.orientation;
    let mut last = Error::InvalidInput("no overlap height found".into());
    for step in 1..=80 {
        let h = 0.5 * step as f64;
        match (0..16).try_for_each(|m| transit(fiber, j, line(s, h, m as f64 / 16.0)).map(|_| ())) {
            Ok(()) => return Ok(h),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// The horn map of petal `j` on an already built fiber.
pub fn horn_map_on(fiber: &FatouFiber, j: usize, config: &HornConfig) -> Result<HornMap> {
    let petal = *fiber.petal(j)?;
    let n = fiber.petals().len();
    let s = petal.orientation;
    let upsilon = -s;
    let m = match config.height {
        Some(h) => h,
        None => overlap_height(fiber, j)?,
    };
    let h = m + config.margin;
    let count = config.samples;
    let g = (0..count)
        .map(|k| transit(fiber, j, line(s, h, k as f64 / count as f64)))
        .collect::<Result<Vec<_>>>()?;
    let dft = |l: i64| -> C64 {
        g.iter()
            .enumerate()
            .map(|(k, v)| {
                *v * cis(-2.0 * PI * (upsilon as i64 * l) as f64 * k as f64 / count as f64)
            })
            .sum::<C64>()
            / count as f64
    };
    let mut noise: Vec<f64> = (count / 4..count / 2)
        .flat_map(|l| [dft(l as i64).norm(), dft(-(l as i64)).norm()])
        .collect();
    noise.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let noise_floor = noise.get(noise.len() / 2).copied().unwrap_or(0.0);
    let next = (j + 1) % n;
    let constant = fiber.anchor_gap(j)? - fiber.anchor_sum(next)? + fiber.anchor_sum(j)?;
    let coeffs = (0..=config.modes)
        .map(|l| {
            let c = dft(l as i64);
            let gain = exp(2.0 * PI * l as f64 * h);
            let value = if l == 0 { constant + c } else { c * gain };
            let uncertainty = noise_floor * gain;
            HornCoeff {
                l,
                value,
                uncertainty,
                reliable: uncertainty <= RELIABLE_REL * value.norm() || noise_floor == 0.0,
            }
        })
        .collect();
    let z0 = line(s, h, 0.25);
    let periodicity_residual = (transit(fiber, j, z0 + 1.0)? - transit(fiber, j, z0)?).norm();
    Ok(HornMap {
        petal: j,
        upsilon,
        height: m,
        coeffs,
        noise_floor,
        periodicity_residual,
    })
}

/// Horn maps of every petal over `x`.
pub fn horn_maps(fiber: &FatouFiber, config: &HornConfig) -> Result<Vec<HornMap>> {
    (0..fiber.petals().len())
        .map(|j| horn_map_on(fiber, j, config))
        .collect()
}

/// Constant terms `a_{j,0}` summed over all petals.
pub fn constant_sum(maps: &[HornMap]) -> C64 {
    maps.iter()
        .map(|m| m.coeffs.first().map_or(ZERO, |c| c.value))
        .sum()
}
