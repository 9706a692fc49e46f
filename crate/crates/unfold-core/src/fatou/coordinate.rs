//! Fatou coordinates on the petals of one fiber, realized as
//! `ψ = ψ_{X_k} + Σ Δ` along orbits.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::map::{FiberMap, UnfoldingMap};
use super::normal::{k_normal_form, NormalForm, DEFAULT_K};
use super::normal_fatou::{gl_segment, NormalFatou};
use super::taylor;
use crate::error::{Error, Result};
use crate::flows::circle_tangencies;
use crate::num::{angle_dist, C64, I, ONE, ZERO};
use crate::splitting::VectorFieldUnfolding;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FatouConfig {
    pub k: usize,
    /// Radius of the circle carrying the petal anchors.
    pub epsilon: f64,
    /// Target for the orbit-sum tail and for inversions.
    pub tol: f64,
    /// Most orbit steps per sum.
    pub budget: usize,
    /// Orbits leaving `|y| ≤ escape_factor · ε` have left the petal.
    pub escape_factor: f64,
}

impl Default for FatouConfig {
    fn default() -> Self {
        FatouConfig {
            k: DEFAULT_K,
            epsilon: 0.5,
            tol: 1e-13,
            budget: 200_000,
            escape_factor: 2.0,
        }
    }
}

/// A petal is labelled by its anchor, the tangency of `Re(iX)` with
/// `|y| = ε`; `orientation` is `+1` where `X` points into the disk there
/// (forward orbits converge) and `−1` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Petal {
    pub index: usize,
    pub anchor: C64,
    pub orientation: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSum {
    pub value: C64,
    /// Estimated size of the neglected tail.
    pub residual: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FatouValue {
    pub value: C64,
    pub residual: f64,
    pub steps: usize,
}

/// Anchors at `x`, indexed by continuation from the counterclockwise order
/// at `x = 0`.
pub fn petals(field: &VectorFieldUnfolding, x: C64, epsilon: f64) -> Result<Vec<Petal>> {
    let count = 2 * field.nu() as usize;
    let at = |x: C64| {
        circle_tangencies(|y| Some(I * field.eval(x, y)), epsilon, true).and_then(|t| {
            if t.points.len() == count {
                Ok(t)
            } else {
                Err(Error::InvalidInput(format!(
                    "found {} anchors on |y| = {epsilon}, expected {count}",
                    t.points.len()
                )))
            }
        })
    };
    let base = at(C64::new(0.0, 0.0))?;
    let here = at(x)?;
    let mut out = Vec::with_capacity(count);
    for (index, b) in base.points.iter().enumerate() {
        let best = here
            .points
            .iter()
            .min_by(|p, q| {
                angle_dist(p.angle, b.angle, TAU)
                    .partial_cmp(&angle_dist(q.angle, b.angle, TAU))
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
            .ok_or(Error::DegenerateCircle { radius: epsilon })?;
        if out.iter().any(|p: &Petal| p.anchor == best.point) {
            return Err(Error::InvalidInput(
                "anchors do not continue from x = 0".into(),
            ));
        }
        let inward = (field.eval(x, best.point) * best.point.conj()).re < 0.0;
        out.push(Petal {
            index,
            anchor: best.point,
            orientation: if inward { 1 } else { -1 },
        });
    }
    Ok(out)
}

/// Fatou coordinates of every petal over one parameter value.
#[derive(Debug, Clone)]
pub struct FatouFiber {
    x: C64,
    map: FiberMap,
    normal: NormalFatou,
    exact: bool,
    petals: Vec<Petal>,
    anchor_sums: Vec<OrbitSum>,
    config: FatouConfig,
}

impl FatouFiber {
    pub fn new(map: &UnfoldingMap, nf: &NormalForm, x: C64, config: FatouConfig) -> Result<Self> {
        let fmap = map.fiber(x);
        let normal = NormalFatou::new(nf.field.poly_at(x))?;
        let exact = nf.exact && matches!(fmap, FiberMap::TimeOne { .. });
        let petals = petals(&nf.field, x, config.epsilon)?;
        let mut fiber = FatouFiber {
            x,
            map: fmap,
            normal,
            exact,
            petals,
            anchor_sums: Vec::new(),
            config,
        };
        let sums = fiber
            .petals
            .iter()
            .map(|p| fiber.orbit_sum(p.anchor, p.orientation))
            .collect::<Result<Vec<_>>>()?;
        fiber.anchor_sums = sums;
        Ok(fiber)
    }

    pub fn x(&self) -> C64 {
        self.x
    }

    pub fn petals(&self) -> &[Petal] {
        &self.petals
    }

    pub fn petal(&self, j: usize) -> Result<&Petal> {
        self.petals
            .get(j)
            .ok_or_else(|| Error::InvalidInput(format!("petal {j} out of range")))
    }

    pub fn config(&self) -> &FatouConfig {
        &self.config
    }

    pub fn map(&self) -> &FiberMap {
        &self.map
    }

    pub fn normal(&self) -> &NormalFatou {
        &self.normal
    }

    /// `S_j(a_j)`, the orbit sum at the anchor of petal `j`.
    pub fn anchor_sum(&self, j: usize) -> Result<C64> {
        self.anchor_sums
            .get(j)
            .map(|s| s.value)
            .ok_or_else(|| Error::InvalidInput(format!("petal {j} out of range")))
    }

    /// `exp(X_k)(q)`.
    pub fn upsilon(&self, q: C64) -> Result<C64> {
        taylor::flow(self.normal.field(), q, ONE)
    }

    /// `Δ(q) = ψ_{X_k}(φ(q)) − ψ_{X_k}(q) − 1`, integrated between the
    /// nearby points `exp(X_k)(q)` and `φ(q)`.
    pub fn delta(&self, q: C64) -> Result<C64> {
        let (up, image) = match (&self.map, self.exact) {
            (FiberMap::TimeOne { perturbation, .. }, true) => {
                let up = self.upsilon(q)?;
                (up, up + perturbation.eval(q))
            }
            _ => (self.upsilon(q)?, self.map.apply(q)?),
        };
        if up == image {
            return Ok(ZERO);
        }
        let p = self.normal.field();
        let gap = (image - up).norm();
        let reach = p.eval(up).norm() / p.eval_d(up).1.norm().max(1e-300);
        if gap < 0.05 * reach {
            return Ok(gl_segment(p, up, image));
        }
        self.normal.segment_quadrature(up, image, 1e-14)
    }

    /// `Σ_{n≥0} Δ(φ^n p)` for `s = +1`, `−Σ_{n≥1} Δ(φ^{−n} p)` for `s = −1`.
    pub fn orbit_sum(&self, p: C64, s: i32) -> Result<OrbitSum> {
        let escape = self.config.escape_factor * self.config.epsilon;
        let k = self.config.k.max(2) as f64;
        let mut q = if s > 0 { p } else { self.map.inverse(p)? };
        let mut sum = ZERO;
        let mut prev = f64::NAN;
        let mut prev_ratio = f64::INFINITY;
        let mut zeros = 0;
        for n in 0..self.config.budget {
            if q.norm() > escape {
                return Err(Error::OrbitEscaped { point: q, steps: n });
            }
            let d = self.delta(q)?;
            sum += d;
            let a = d.norm();
            if a == 0.0 {
                zeros += 1;
                if zeros >= 2 {
                    return Ok(self.finish(sum, 0.0, n + 1, s));
                }
            } else {
                zeros = 0;
                let power = a * (2.0 + n as f64) / (k - 1.0);
                let ratio = a / prev;
                // rising ratios (leaving the parabolic regime) make the
                // geometric tail an underestimate
                let geometric = if ratio < 1.0 && ratio <= prev_ratio {
                    a * ratio / (1.0 - ratio)
                } else {
                    f64::INFINITY
                };
                prev_ratio = ratio;
                let tail = power.min(geometric);
                if n >= 2 && tail <= self.config.tol * (1.0 + sum.norm()) {
                    return Ok(self.finish(sum, tail, n + 1, s));
                }
            }
            prev = a;
            q = if s > 0 {
                self.map.apply(q)?
            } else {
                self.map.inverse(q)?
            };
        }
        Err(Error::BudgetExhausted { residual: prev })
    }

    fn finish(&self, sum: C64, residual: f64, steps: usize, s: i32) -> OrbitSum {
        OrbitSum {
            value: if s > 0 { sum } else { -sum },
            residual,
            steps,
        }
    }

    /// `ψ̈_j(p)`, normalized to vanish at the anchor.
    pub fn psi(&self, j: usize, p: C64) -> Result<FatouValue> {
        let petal = *self.petal(j)?;
        let base = self.normal.segment(petal.anchor, p)?;
        let s = self.orbit_sum(p, petal.orientation)?;
        Ok(FatouValue {
            value: base + s.value - self.anchor_sums[j].value,
            residual: s.residual + self.anchor_sums[j].residual,
            steps: s.steps,
        })
    }

    /// `ψ̈_j` by the quadrature route for the `ψ_{X_k}` part.
    pub fn psi_quadrature(&self, j: usize, p: C64) -> Result<FatouValue> {
        let petal = *self.petal(j)?;
        let base = self.normal.segment_quadrature(petal.anchor, p, 1e-14)?;
        let s = self.orbit_sum(p, petal.orientation)?;
        Ok(FatouValue {
            value: base + s.value - self.anchor_sums[j].value,
            residual: s.residual + self.anchor_sums[j].residual,
            steps: s.steps,
        })
    }

    /// The point `p` of petal `j` with `ψ̈_j(p) = z`, reached by the
    /// complex-time flow of `X_k` from the anchor and corrected by the orbit
    /// sums. Also returns `ψ_{X_k}(p) − ψ_{X_k}(a_j)` along that path.
    pub fn psi_inverse(&self, j: usize, z: C64) -> Result<(C64, C64)> {
        let petal = *self.petal(j)?;
        let field = self.normal.field();
        let mut p = taylor::flow(field, petal.anchor, z)?;
        let mut t = z;
        let mut residual = f64::INFINITY;
        for _ in 0..60 {
            let s = self.orbit_sum(p, petal.orientation)?;
            let r = t + s.value - self.anchor_sums[j].value - z;
            residual = r.norm();
            if residual <= self.config.tol * (1.0 + z.norm()) {
                return Ok((p, t));
            }
            p = taylor::flow(field, p, -r)?;
            t -= r;
        }
        Err(Error::NoConvergence {
            what: "Fatou inverse",
            residual,
        })
    }

    /// The point `q` with `ψ̈_j(q) − ψ̈_j(p) = dz`, found by a secant
    /// iteration on the flow time from `p`.
    pub fn psi_shift(&self, j: usize, p: C64, dz: C64) -> Result<C64> {
        let s = self.petal(j)?.orientation;
        let field = self.normal.field();
        let base = self.orbit_sum(p, s)?.value;
        let eval = |t: C64| -> Result<(C64, C64)> {
            let q = taylor::flow(field, p, t)?;
            Ok((q, t + self.orbit_sum(q, s)?.value - base - dz))
        };
        let (mut t0, mut t1) = (ZERO, dz);
        let (_, mut r0) = eval(t0)?;
        let (mut q, mut r1) = eval(t1)?;
        for _ in 0..60 {
            if r1.norm() <= self.config.tol * (1.0 + dz.norm()) {
                return Ok(q);
            }
            let slope = (r1 - r0) / (t1 - t0);
            let step = if slope.norm() > 1e-3 { r1 / slope } else { r1 };
            t0 = t1;
            r0 = r1;
            t1 -= step;
            (q, r1) = eval(t1)?;
        }
        Err(Error::NoConvergence {
            what: "Fatou shift",
            residual: r1.norm(),
        })
    }

    /// `ψ_{X_k}(a_j) − ψ_{X_k}(a_{j+1})`, the second anchor reached
    /// counterclockwise along `|y| = ε`.
    pub fn anchor_gap(&self, j: usize) -> Result<C64> {
        let n = self.petals.len();
        let a = self.petal(j)?.anchor;
        let b = self.petals[(j + 1) % n].anchor;
        Ok(-self.normal.arc(a, b)?)
    }

    /// Lavaurs field `1/∂ψ_j/∂y` at `p`.
    pub fn lavaurs(&self, j: usize, p: C64) -> Result<C64> {
        let petal = *self.petal(j)?;
        let field = self.normal.field();
        let xk = field.eval(p);
        let h = 1e-3 * (xk.norm() / field.eval_d(p).1.norm().max(1e-300)).min(p.norm());
        let mut ds = ZERO;
        let mut w = ONE;
        for _ in 0..4 {
            ds += self.orbit_sum(p + w * h, petal.orientation)?.value * w.conj();
            w *= I;
        }
        let ds = ds / (4.0 * h);
        Ok(xk / (ONE + xk * ds))
    }
}

/// One-shot evaluation of `ψ̈_j(y)` for the map over `x`.
pub fn fatou_orbit(
    map: &UnfoldingMap,
    x: C64,
    y: C64,
    petal: usize,
    config: FatouConfig,
) -> Result<FatouValue> {
    let nf = k_normal_form(map, config.k)?;
    FatouFiber::new(map, &nf, x, config)?.psi(petal, y)
}
