use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::{integrate, FlowOptions, Termination, Trajectory};
use crate::algebra::{roots, ComplexPoly, ALGEBRAIC_TOL};
use crate::error::{Error, Result};
use crate::num::{angle_dist, cis, wrap, C64};

/// Seeds and re-escape checks sit this many times farther out than the
/// nominal escape radius, which narrows the band of directions where a
/// nearly homoclinic trajectory is mistaken for a homoclinic one.
pub const SEED_FACTOR: f64 = 1e4;
const DEFAULT_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparatrixTag {
    /// Escapes to infinity in forward time.
    Outbound,
    /// Arrives from infinity.
    Inbound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Separatrix {
    pub angle: f64,
    pub tag: SeparatrixTag,
    /// Traced from the seed toward the finite plane.
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatrixFan {
    pub nu: usize,
    pub seed_radius: f64,
    /// Sorted by angle in `[0, 2π)`; tags alternate.
    pub directions: Vec<Separatrix>,
}

/// `10 (1 + max |root|)`.
pub fn escape_radius(p: &ComplexPoly) -> Result<f64> {
    let rs = roots(p, ALGEBRAIC_TOL)?;
    Ok(10.0 * (1.0 + rs.iter().fold(0.0f64, |m, r| m.max(r.value.norm()))))
}

fn singular_points(p: &ComplexPoly) -> Result<Vec<C64>> {
    Ok(roots(p, ALGEBRAIC_TOL)?
        .into_iter()
        .map(|r| r.value)
        .collect())
}

/// Asymptotic directions at infinity of `Re(μ P ∂/∂w)` and the separatrices
/// traced inward from radius `SEED_FACTOR · r`.
///
/// With `P ~ a w^{ν+1}`, the flow is radial at angle `θ` when
/// `μ a e^{iνθ}` is real: positive values escape, negative ones arrive.
pub fn separatrices(p: &ComplexPoly, mu: C64, r: f64, budget: usize) -> Result<SeparatrixFan> {
    let deg = p.degree().unwrap_or(0);
    if deg < 2 {
        return Err(Error::InvalidInput("separatrices need degree ≥ 2".into()));
    }
    let nu = deg - 1;
    let phase = (mu * p.leading()).arg();
    let seed_radius = SEED_FACTOR * r;
    let singular = singular_points(p)?;
    let f = |w: C64| Some(mu * p.eval(w));
    let mut directions = Vec::with_capacity(2 * nu);
    for k in 0..nu {
        for (tag, base) in [(SeparatrixTag::Outbound, 0.0), (SeparatrixTag::Inbound, PI)] {
            let angle = wrap((base - phase + TAU * k as f64) / nu as f64, TAU);
            let opts = FlowOptions {
                escape_radius: Some(seed_radius * 1.001),
                backward: tag == SeparatrixTag::Outbound,
                max_steps: budget,
                rtol: 1e-11,
                ..FlowOptions::default().with_singular(singular.clone())
            };
            let trajectory = integrate(f, cis(angle) * seed_radius, &opts);
            directions.push(Separatrix {
                angle,
                tag,
                trajectory,
            });
        }
    }
    directions.sort_by(|a, b| {
        a.angle
            .partial_cmp(&b.angle)
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    Ok(SeparatrixFan {
        nu,
        seed_radius,
        directions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Homoclinic {
    Found {
        inbound_angle: f64,
        outbound_angle: f64,
        witness: Trajectory,
    },
    NotFound,
    /// Some separatrix exhausted its budget without settling.
    Indeterminate,
}

impl Homoclinic {
    pub fn is_found(&self) -> bool {
        matches!(self, Homoclinic::Found { .. })
    }
}

/// Searches for an inbound separatrix that re-escapes along an outbound
/// direction, matched within `tol` radians at the seed radius.
pub fn detect_homoclinic(
    p: &ComplexPoly,
    mu: C64,
    r: f64,
    tol: f64,
    budget: Option<usize>,
) -> Result<Homoclinic> {
    let fan = separatrices(p, mu, r, budget.unwrap_or(DEFAULT_BUDGET))?;
    let outbound: Vec<f64> = fan
        .directions
        .iter()
        .filter(|d| d.tag == SeparatrixTag::Outbound)
        .map(|d| d.angle)
        .collect();
    let mut undecided = false;
    for d in fan
        .directions
        .iter()
        .filter(|d| d.tag == SeparatrixTag::Inbound)
    {
        match d.trajectory.termination {
            Termination::EscapedToInfinity => {
                let exit = d.trajectory.end().arg();
                match outbound.iter().find(|&&a| angle_dist(a, exit, TAU) < tol) {
                    Some(&a) => {
                        return Ok(Homoclinic::Found {
                            inbound_angle: d.angle,
                            outbound_angle: a,
                            witness: d.trajectory.clone(),
                        })
                    }
                    None => undecided = true,
                }
            }
            Termination::StepLimit => undecided = true,
            Termination::ReachedSingularity(_) | Termination::LeftDomain => {}
        }
    }
    Ok(if undecided {
        Homoclinic::Indeterminate
    } else {
        Homoclinic::NotFound
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Var;
    use crate::num::{I, ONE, ZERO};

    fn p(c: &[C64]) -> ComplexPoly {
        ComplexPoly::new(c.to_vec(), Var::W)
    }

    #[test]
    fn fan_of_w_squared() {
        let q = p(&[ZERO, ZERO, ONE]);
        let fan = separatrices(&q, ONE, 10.0, 10_000).unwrap();
        assert_eq!(fan.directions.len(), 2);
        assert_eq!(fan.directions[0].tag, SeparatrixTag::Outbound);
        assert!(fan.directions[0].angle.abs() < 1e-12);
        assert_eq!(fan.directions[1].tag, SeparatrixTag::Inbound);
        assert!((fan.directions[1].angle - PI).abs() < 1e-12);
    }

    #[test]
    fn fan_rotates_with_mu() {
        // i w²: radial where e^{iθ} i real, so θ = −π/2 escapes and π/2 arrives
        let q = p(&[ZERO, ZERO, ONE]);
        let fan = separatrices(&q, I, 10.0, 10_000).unwrap();
        let out = fan
            .directions
            .iter()
            .find(|d| d.tag == SeparatrixTag::Outbound)
            .unwrap();
        assert!(angle_dist(out.angle, -PI / 2.0, TAU) < 1e-12);
        let w = cis(out.angle) * 5.0;
        let v = I * w * w;
        assert!((v / w).im.abs() < 1e-12 && (v / w).re > 0.0);
    }

    #[test]
    fn fan_size_is_twice_nu() {
        let q = p(&[ONE, ZERO, -ONE, ZERO, C64::new(0.5, 0.2)]);
        let fan = separatrices(&q, cis(0.3), 30.0, 50_000).unwrap();
        assert_eq!(fan.directions.len(), 6);
        for pair in fan.directions.windows(2) {
            assert_ne!(pair[0].tag, pair[1].tag);
        }
    }

    #[test]
    fn stable_two_point_field_has_no_homoclinic() {
        let q = p(&[ZERO, -ONE, ONE]);
        let r = escape_radius(&q).unwrap();
        assert_eq!(
            detect_homoclinic(&q, ONE, r, 1e-3, None).unwrap(),
            Homoclinic::NotFound
        );
    }

    #[test]
    fn imaginary_two_point_field_is_homoclinic() {
        let q = p(&[ZERO, -ONE, ONE]);
        let r = escape_radius(&q).unwrap();
        assert!(detect_homoclinic(&q, I, r, 1e-3, None).unwrap().is_found());
    }

    #[test]
    fn double_point_never_homoclinic() {
        let q = p(&[ZERO, ZERO, ONE]);
        for k in 0..16 {
            let mu = cis(TAU * k as f64 / 16.0 + 0.01);
            let got = detect_homoclinic(&q, mu, 10.0, 1e-3, None).unwrap();
            assert!(!got.is_found(), "k={k}");
        }
    }
}
