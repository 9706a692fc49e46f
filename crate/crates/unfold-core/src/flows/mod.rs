//! Real flows `Re(Z)` of holomorphic fields `Z = f(w) ∂/∂w` on the plane.
//!
//! Integration runs in arc length, `dw/dσ = f/|f|`, carrying the flow time
//! `s` alongside (`ds/dσ = 1/|f|`). This keeps step counts bounded both
//! near singular points and on trajectories escaping to infinity in finite
//! time.

mod classify;
mod portrait;
mod tangency;

pub use classify::{classify_point, Limit, PointClass};
pub use portrait::{
    detect_homoclinic, escape_radius, separatrices, Homoclinic, Separatrix, SeparatrixFan,
    SeparatrixTag,
};
pub use tangency::{circle_tangencies, TangencySet, TangentPoint};

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::num::C64;

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedSingularity(C64),
    LeftDomain,
    EscapedToInfinity,
    StepLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// `(flow time, position)` at every accepted step.
    pub samples: Vec<(f64, C64)>,
    pub termination: Termination,
    /// Largest accepted local error estimate.
    pub residual: f64,
}

impl Trajectory {
    pub fn end(&self) -> C64 {
        self.samples.last().map(|s| s.1).unwrap_or_default()
    }
}

/// Controls for [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct FlowOptions {
    pub rtol: f64,
    pub max_steps: usize,
    /// Arc length after which the run stops with [`Termination::StepLimit`].
    pub max_arclength: f64,
    /// Radius beyond which the trajectory counts as escaped.
    pub escape_radius: Option<f64>,
    /// Singular points where integration stops, with a common stop radius.
    pub singular: Vec<C64>,
    pub stop_radius: f64,
    /// Integrate `−f` instead of `f`.
    pub backward: bool,
    /// Keep every sample (otherwise only the first and last).
    pub record: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            rtol: 1e-9,
            max_steps: 1_000_000,
            max_arclength: f64::INFINITY,
            escape_radius: None,
            singular: Vec::new(),
            stop_radius: 1e-9,
            backward: false,
            record: true,
        }
    }
}

impl FlowOptions {
    /// Singular set with the stop radius `1e−6 ×` the smallest distance
    /// between distinct points (or `1e−6 (1 + |p|)` for a single point).
    pub fn with_singular(mut self, points: Vec<C64>) -> Self {
        let mut d = f64::INFINITY;
        for (i, a) in points.iter().enumerate() {
            for b in &points[i + 1..] {
                let ab = (*a - *b).norm();
                if ab > 0.0 {
                    d = d.min(ab);
                }
            }
        }
        if !d.is_finite() {
            d = 1.0 + points.first().map(|p| p.norm()).unwrap_or(0.0);
        }
        self.stop_radius = 1e-6 * d;
        self.singular = points;
        self
    }
}

// Dormand–Prince 5(4) tableau; the arc-length system is autonomous so the
// nodes c_i are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Arc-length direction and time rate, or `None` outside the domain.
fn arc_rhs<F: Fn(C64) -> Option<C64>>(f: &F, w: C64, sign: f64) -> Option<(C64, f64)> {
    let v = f(w)? * sign;
    let n = v.norm();
    if !n.is_finite() {
        return None;
    }
    if n == 0.0 {
        return Some((C64::new(0.0, 0.0), f64::INFINITY));
    }
    Some((v / n, 1.0 / n))
}

/// Arc-length direction and time rate at a stage point.
type Stage = (C64, f64);

/// One Dormand–Prince step in arc length; returns the new state and the
/// local error estimate, or `None` if a stage left the domain.
fn dp_step<F: Fn(C64) -> Option<C64>>(
    f: &F,
    w: C64,
    h: f64,
    sign: f64,
    k1: (C64, f64),
) -> Option<(Stage, f64, f64, Stage)> {
    let k2 = arc_rhs(f, w + k1.0 * (h * A21), sign)?;
    let k3 = arc_rhs(f, w + (k1.0 * A31 + k2.0 * A32) * h, sign)?;
    let k4 = arc_rhs(f, w + (k1.0 * A41 + k2.0 * A42 + k3.0 * A43) * h, sign)?;
    let k5 = arc_rhs(
        f,
        w + (k1.0 * A51 + k2.0 * A52 + k3.0 * A53 + k4.0 * A54) * h,
        sign,
    )?;
    let k6 = arc_rhs(
        f,
        w + (k1.0 * A61 + k2.0 * A62 + k3.0 * A63 + k4.0 * A64 + k5.0 * A65) * h,
        sign,
    )?;
    let dw = (k1.0 * B1 + k3.0 * B3 + k4.0 * B4 + k5.0 * B5 + k6.0 * B6) * h;
    let ds = (k1.1 * B1 + k3.1 * B3 + k4.1 * B4 + k5.1 * B5 + k6.1 * B6) * h;
    let w_new = w + dw;
    let k7 = arc_rhs(f, w_new, sign)?;
    let err_w =
        ((k1.0 * E1 + k3.0 * E3 + k4.0 * E4 + k5.0 * E5 + k6.0 * E6 + k7.0 * E7) * h).norm();
    let err_s = if k7.1.is_finite() {
        ((k1.1 * E1 + k3.1 * E3 + k4.1 * E4 + k5.1 * E5 + k6.1 * E6 + k7.1 * E7) * h).abs()
    } else {
        0.0
    };
    Some(((w_new, ds), err_w, err_s, k7))
}

/// Integrates the real flow of `f` from `start`.
///
/// `f` returns `None` outside its domain, which ends the run with
/// [`Termination::LeftDomain`].
pub fn integrate<F: Fn(C64) -> Option<C64>>(f: F, start: C64, opts: &FlowOptions) -> Trajectory {
    let sign = if opts.backward { -1.0 } else { 1.0 };
    let mut w = start;
    let mut s = 0.0;
    let mut samples = alloc::vec![(0.0, start)];
    let mut residual: f64 = 0.0;
    let scale0 = 1.0 + start.norm();
    let mut h = 1e-3 * scale0;
    let mut arclength = 0.0;
    let finish = |samples: &mut Vec<(f64, C64)>, s: f64, w: C64| {
        if !opts.record {
            let first = samples[0];
            samples.clear();
            samples.push(first);
        }
        if samples.last().map(|p| p.1) != Some(w) {
            samples.push((s, w));
        }
    };
    let mut k1 = match arc_rhs(&f, w, sign) {
        Some(k) => k,
        None => {
            return Trajectory {
                samples,
                termination: Termination::LeftDomain,
                residual,
            }
        }
    };
    for _ in 0..opts.max_steps {
        if let Some(p) = opts
            .singular
            .iter()
            .find(|p| (w - **p).norm() <= opts.stop_radius)
        {
            finish(&mut samples, s, w);
            return Trajectory {
                samples,
                termination: Termination::ReachedSingularity(*p),
                residual,
            };
        }
        if k1.1.is_infinite() {
            finish(&mut samples, s, w);
            return Trajectory {
                samples,
                termination: Termination::ReachedSingularity(w),
                residual,
            };
        }
        if let Some(r) = opts.escape_radius {
            if w.norm() > r {
                finish(&mut samples, s, w);
                return Trajectory {
                    samples,
                    termination: Termination::EscapedToInfinity,
                    residual,
                };
            }
        }
        if arclength >= opts.max_arclength {
            break;
        }
        // never step across a singular point's stop disk in one go
        let near = opts
            .singular
            .iter()
            .map(|p| (w - *p).norm())
            .fold(f64::INFINITY, f64::min);
        let hmax = (0.1 * (1.0 + w.norm())).min(if near.is_finite() {
            0.5 * near.max(opts.stop_radius)
        } else {
            f64::INFINITY
        });
        h = h.min(hmax).max(1e-15 * (1.0 + w.norm()));
        match dp_step(&f, w, h, sign, k1) {
            Some(((wn, ds), err_w, err_s, k7)) => {
                let tol = opts.rtol * (1.0 + w.norm().min(wn.norm()));
                // the time increment is controlled relative to itself
                let err = err_w.max(err_s * tol / (opts.rtol * ds.abs()).max(1e-300));
                if err <= tol || h <= 1e-14 * (1.0 + w.norm()) {
                    w = wn;
                    s += sign * ds;
                    arclength += h;
                    residual = residual.max(err_w);
                    k1 = k7;
                    if opts.record {
                        samples.push((s, w));
                    }
                    if k1.1.is_infinite() {
                        continue;
                    }
                }
                let fac = if err == 0.0 {
                    5.0
                } else {
                    0.9 * crate::num::powf(tol / err, 0.2)
                };
                h *= fac.clamp(0.2, 5.0);
            }
            None => {
                if h <= 1e-12 * (1.0 + w.norm()) {
                    finish(&mut samples, s, w);
                    return Trajectory {
                        samples,
                        termination: Termination::LeftDomain,
                        residual,
                    };
                }
                h *= 0.25;
            }
        }
    }
    finish(&mut samples, s, w);
    Trajectory {
        samples,
        termination: Termination::StepLimit,
        residual,
    }
}
