//! `ψ_X = ∫ dy / X` for a polynomial field, in closed form from partial
//! fractions and by quadrature.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::algebra::{partial_fractions, ComplexPoly, PartialFraction, ALGEBRAIC_TOL};
use crate::error::{Error, Result};
use crate::num::{cis, wrap, C64, GL10, ZERO};

/// Chords per full turn when integrating along a circle.
const ARC_PIECES: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct NormalFatou {
    field: ComplexPoly,
    terms: Vec<PartialFraction>,
}

impl NormalFatou {
    pub fn new(field: ComplexPoly) -> Result<Self> {
        let terms = partial_fractions(&field, ALGEBRAIC_TOL)?;
        Ok(NormalFatou { field, terms })
    }

    pub fn field(&self) -> &ComplexPoly {
        &self.field
    }

    pub fn terms(&self) -> &[PartialFraction] {
        &self.terms
    }

    /// `∫ dy/X` along the segment `a → b`.
    ///
    /// Each logarithm is continued along the segment, which the principal
    /// branch of the ratio does exactly unless a root lies on the segment.
    pub fn segment(&self, a: C64, b: C64) -> Result<C64> {
        let mut acc = ZERO;
        for t in &self.terms {
            let (da, db) = (a - t.root, b - t.root);
            if distance_to_segment(t.root, a, b) <= 1e-13 * (1.0 + t.root.norm()) {
                return Err(Error::NearSingular { point: t.root });
            }
            acc += if t.order == 1 {
                t.coeff * (db / da).ln()
            } else {
                let e = 1 - t.order as i32;
                t.coeff * (db.powi(e) - da.powi(e)) / e as f64
            };
        }
        Ok(acc)
    }

    /// Counterclockwise along `|y| = |a|` from `a` to `b` (a full turn when
    /// they coincide).
    pub fn arc(&self, a: C64, b: C64) -> Result<C64> {
        let r = a.norm();
        let t0 = a.arg();
        let mut span = wrap(b.arg() - t0, TAU);
        if span < 1e-15 {
            span = TAU;
        }
        let pieces = ((span / TAU * ARC_PIECES as f64) as usize).max(1);
        let mut acc = ZERO;
        let mut prev = a;
        for m in 1..=pieces {
            let next = if m == pieces {
                b
            } else {
                cis(t0 + span * m as f64 / pieces as f64) * r
            };
            acc += self.segment(prev, next)?;
            prev = next;
        }
        Ok(acc)
    }

    /// Adaptive Gauss–Legendre value of the same segment integral.
    pub fn segment_quadrature(&self, a: C64, b: C64, tol: f64) -> Result<C64> {
        quad(&self.field, a, b, tol, 0)
    }
}

/// `∫ dy/p(y)` over a short segment with a single Gauss–Legendre panel.
pub fn gl_segment(p: &ComplexPoly, a: C64, b: C64) -> C64 {
    let d = b - a;
    GL10.iter()
        .map(|&(t, w)| w / p.eval(a + d * t))
        .sum::<C64>()
        * d
}

fn quad(p: &ComplexPoly, a: C64, b: C64, tol: f64, depth: usize) -> Result<C64> {
    let m = (a + b) * 0.5;
    let whole = gl_segment(p, a, b);
    let halves = gl_segment(p, a, m) + gl_segment(p, m, b);
    if (whole - halves).norm() <= tol * (1.0 + halves.norm()) {
        return Ok(halves);
    }
    if depth > 40 {
        if (whole - halves).norm() <= 1e3 * tol * (1.0 + halves.norm()) {
            return Ok(halves);
        }
        return Err(Error::NoConvergence {
            what: "segment quadrature",
            residual: (whole - halves).norm(),
        });
    }
    Ok(quad(p, a, m, tol, depth + 1)? + quad(p, m, b, tol, depth + 1)?)
}

fn distance_to_segment(r: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (r - a).norm();
    }
    let t = (((r - a) * d.conj()).re / l2).clamp(0.0, 1.0);
    (r - (a + d * t)).norm()
}
