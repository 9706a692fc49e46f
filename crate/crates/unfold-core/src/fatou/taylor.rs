//! Taylor-series integration of `dy/dt = P(y)` for polynomial `P`, in
//! complex time.

use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::ComplexPoly;
use crate::error::{Error, Result};
use crate::num::{powf, C64, ZERO};

const ORDER: usize = 24;
const MAX_STEPS: usize = 200_000;

/// Taylor coefficients `c_0..=c_K` of the solution through `y0`.
fn coefficients(p: &ComplexPoly, y0: C64, out: &mut [C64], pows: &mut [Vec<C64>]) {
    let d = p.degree().unwrap_or(0);
    let pc = p.coeffs();
    out[0] = y0;
    for row in pows.iter_mut() {
        row.clear();
    }
    for k in 0..ORDER {
        // (y^j)_k for j = 1..=d from (y^{j−1})_{0..=k}
        pows[0].push(out[k]);
        for j in 1..d {
            let mut s = ZERO;
            for i in 0..=k {
                s += out[i] * pows[j - 1][k - i];
            }
            pows[j].push(s);
        }
        let mut pk = if k == 0 {
            pc.first().copied().unwrap_or(ZERO)
        } else {
            ZERO
        };
        for j in 1..=d {
            pk += pc[j] * pows[j - 1][k];
        }
        out[k + 1] = pk / (k + 1) as f64;
    }
}

/// `exp(t · P ∂/∂y)(y0)` along the straight path `s ↦ s·t`, `s ∈ [0, 1]`.
pub fn flow(p: &ComplexPoly, y0: C64, t: C64) -> Result<C64> {
    let total = t.norm();
    if total == 0.0 || p.is_zero() {
        return Ok(y0);
    }
    let dir = t / total;
    let d = p.degree().unwrap_or(0).max(1);
    let mut c = vec![ZERO; ORDER + 1];
    let mut pows: Vec<Vec<C64>> = (0..d).map(|_| Vec::with_capacity(ORDER + 1)).collect();
    let mut y = y0;
    let mut done = 0.0;
    for _ in 0..MAX_STEPS {
        coefficients(p, y, &mut c, &mut pows);
        let scale = 1.0 + y.norm();
        let mut h = f64::INFINITY;
        for k in [ORDER - 1, ORDER] {
            let a = c[k].norm();
            if a > 0.0 {
                h = h.min(powf(scale / a, 1.0 / k as f64));
            }
        }
        // radius estimate times the root of the target accuracy
        h *= 0.18;
        let rest = total - done;
        let last = h >= rest;
        if last {
            h = rest;
        }
        let s = dir * h;
        let mut acc = ZERO;
        for ck in c.iter().rev() {
            acc = acc * s + *ck;
        }
        if !(acc.re.is_finite() && acc.im.is_finite()) {
            return Err(Error::NoConvergence {
                what: "Taylor flow",
                residual: f64::INFINITY,
            });
        }
        y = acc;
        done += h;
        if last {
            return Ok(y);
        }
    }
    Err(Error::NoConvergence {
        what: "Taylor flow",
        residual: total - done,
    })
}
