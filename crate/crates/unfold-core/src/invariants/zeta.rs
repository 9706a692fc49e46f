//! `ζ_φ` and the homogeneous normalization of a system of horn maps.

use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::horn::{constant_sum, HornMap};
use crate::error::{Error, Result};
use crate::fatou::FatouFiber;
use crate::num::{C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    pub x: C64,
    /// `−(πi/ν) Σ Res`, residues of `1/X_k` at the fixed points.
    pub residue_formula: C64,
    /// `Σ_j a_{j,0} / 2ν` from the horn maps, when supplied.
    pub horn_average: Option<C64>,
    pub discrepancy: f64,
}

/// Sum of the residues of `1/X_k` at poles inside the anchor circle.
pub fn residue_sum(fiber: &FatouFiber) -> C64 {
    let eps = fiber.config().epsilon;
    fiber
        .normal()
        .terms()
        .iter()
        .filter(|t| t.order == 1 && t.root.norm() < eps)
        .map(|t| t.coeff)
        .sum()
}

pub fn zeta(fiber: &FatouFiber, maps: Option<&[HornMap]>) -> ZetaValue {
    let nu = (fiber.petals().len() / 2).max(1) as f64;
    let residue_formula = -PI * I / nu * residue_sum(fiber);
    let horn_average = maps.map(|m| constant_sum(m) / (2.0 * nu));
    let discrepancy = horn_average.map_or(0.0, |h| (h - residue_formula).norm() * 2.0 * nu);
    ZetaValue {
        x: fiber.x(),
        residue_formula,
        horn_average,
        discrepancy,
    }
}

/// Like [`zeta`] but an error when the two computations disagree beyond `tol`.
pub fn checked_zeta(fiber: &FatouFiber, maps: &[HornMap], tol: f64) -> Result<ZetaValue> {
    let z = zeta(fiber, Some(maps));
    if z.discrepancy > tol {
        return Err(Error::NoConvergence {
            what: "ζ consistency",
            residual: z.discrepancy,
        });
    }
    Ok(z)
}

/// Offsets `C_j = −Σ_{k<j} a_{k,0} + j ζ` taking anchor-normalized
/// coordinates to the homogeneous system.
pub fn homogeneous_offsets(maps: &[HornMap], zeta: C64) -> Vec<C64> {
    let mut acc = C64::new(0.0, 0.0);
    maps.iter()
        .enumerate()
        .map(|(j, m)| {
            let c = -acc + zeta * j as f64;
            acc += m.coeffs[0].value;
            c
        })
        .collect()
}

/// Horn maps of the homogeneous system: every constant term becomes `ζ`
/// and mode `l` of petal `j` picks up `e^{−2πiυ l C_j}`.
pub fn homogeneous(maps: &[HornMap], zeta: C64) -> Vec<HornMap> {
    let offsets = homogeneous_offsets(maps, zeta);
    let n = maps.len();
    maps.iter()
        .enumerate()
        .map(|(j, m)| {
            let cj = offsets[j];
            let next = offsets[(j + 1) % n];
            let mut out = m.clone();
            for c in out.coeffs.iter_mut() {
                if c.l == 0 {
                    c.value = c.value - cj + next;
                } else {
                    let phase =
                        (C64::new(0.0, -2.0 * PI * m.upsilon as f64 * c.l as f64) * cj).exp();
                    c.value *= phase;
                    c.uncertainty *= phase.norm();
                }
            }
            out
        })
        .collect()
}
