use alloc::vec::Vec;
use core::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{cis, C64};

const SAMPLES: usize = 1440;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentPoint {
    pub angle: f64,
    pub point: C64,
    /// The trajectory germ through the point stays inside the set.
    pub convex: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangencySet {
    pub radius: f64,
    /// Sorted by angle in `[0, 2π)`.
    pub points: Vec<TangentPoint>,
}

impl TangencySet {
    pub fn all_convex(&self) -> bool {
        self.points.iter().all(|p| p.convex)
    }

    /// Whether every arc between consecutive points of `self` contains
    /// exactly one point of `other`.
    pub fn alternates_with(&self, other: &TangencySet) -> bool {
        let n = self.points.len();
        if n == 0 || other.points.len() != n {
            return false;
        }
        (0..n).all(|k| {
            let a = self.points[k].angle;
            let span = crate::num::wrap(self.points[(k + 1) % n].angle - a, TAU);
            let span = if n == 1 { TAU } else { span };
            other
                .points
                .iter()
                .filter(|q| {
                    let d = crate::num::wrap(q.angle - a, TAU);
                    d > 0.0 && d < span
                })
                .count()
                == 1
        })
    }
}

/// Normalized radial component of the field on the circle.
fn radial<F: Fn(C64) -> Option<C64>>(f: &F, radius: f64, theta: f64) -> Option<f64> {
    let p = cis(theta) * radius;
    let v = f(p)?;
    let n = v.norm();
    if n == 0.0 {
        return Some(0.0);
    }
    Some((v * p.conj()).re / (n * radius))
}

fn rk4<F: Fn(C64) -> Option<C64>>(f: &F, w: C64, h: f64) -> Option<C64> {
    let k1 = f(w)?;
    let k2 = f(w + k1 * (h / 2.0))?;
    let k3 = f(w + k2 * (h / 2.0))?;
    let k4 = f(w + k3 * h)?;
    Some(w + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// Points of `|w| = radius` where the real flow of `f` is tangent to the
/// circle, located by sign changes of the radial component and bisection.
///
/// Convexity compares the trajectory through the point with the circle to
/// second order; `set_inside` says whether the basic set is the disk or its
/// complement.
pub fn circle_tangencies<F: Fn(C64) -> Option<C64>>(
    f: F,
    radius: f64,
    set_inside: bool,
) -> Result<TangencySet> {
    let g: Vec<f64> = (0..SAMPLES)
        .map(|k| radial(&f, radius, TAU * k as f64 / SAMPLES as f64))
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::DegenerateCircle { radius })?;
    if g.iter().fold(0.0f64, |m, v| m.max(v.abs())) < 1e-9 {
        return Err(Error::DegenerateCircle { radius });
    }
    let mut points = Vec::new();
    for k in 0..SAMPLES {
        let (g0, g1) = (g[k], g[(k + 1) % SAMPLES]);
        let mut lo = TAU * k as f64 / SAMPLES as f64;
        let mut hi = lo;
        if g0 == 0.0 {
            if g[(k + SAMPLES - 1) % SAMPLES] == 0.0 {
                continue;
            }
        } else if g1 != 0.0 && g0.signum() != g1.signum() {
            hi = lo + TAU / SAMPLES as f64;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let gm = radial(&f, radius, mid).ok_or(Error::DegenerateCircle { radius })?;
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if gm.signum() == g0.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        } else {
            continue;
        }
        let angle = crate::num::wrap(0.5 * (lo + hi), TAU);
        let point = cis(angle) * radius;
        let speed = f(point).map(|v| v.norm()).unwrap_or(0.0);
        if speed == 0.0 {
            return Err(Error::NearSingular { point });
        }
        let h = 1e-3 * radius / speed;
        let fwd = rk4(&f, point, h).ok_or(Error::DegenerateCircle { radius })?;
        let bwd = rk4(&f, point, -h).ok_or(Error::DegenerateCircle { radius })?;
        let curvature = fwd.norm_sqr() + bwd.norm_sqr() - 2.0 * point.norm_sqr();
        let convex = if set_inside {
            curvature < 0.0
        } else {
            curvature > 0.0
        };
        points.push(TangentPoint {
            angle,
            point,
            convex,
        });
    }
    points.sort_by(|a, b| {
        a.angle
            .partial_cmp(&b.angle)
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    Ok(TangencySet { radius, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::I;

    #[test]
    fn imaginary_flow_of_y_squared() {
        let eps = 0.3;
        let t = circle_tangencies(|y| Some(I * y * y), eps, true).unwrap();
        assert_eq!(t.points.len(), 2);
        assert!(t.all_convex());
        assert!(t.points[0].angle.abs() < 1e-9 || (t.points[0].angle - TAU).abs() < 1e-9);
        assert!((t.points[1].angle - core::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn linear_rotation_is_degenerate() {
        let err = circle_tangencies(|y| Some(I * y), 1.0, true).unwrap_err();
        assert_eq!(err, Error::DegenerateCircle { radius: 1.0 });
    }

    #[test]
    fn alternation_for_two_directions() {
        let a = circle_tangencies(|y| Some(I * y * y * y), 0.5, true).unwrap();
        let b = circle_tangencies(|y| Some(cis(0.4) * y * y * y), 0.5, true).unwrap();
        assert_eq!(a.points.len(), 4);
        assert!(a.alternates_with(&b));
    }
}
