use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::poly::ComplexPoly;
use crate::error::{Error, Result};
use crate::num::{cis, powf, C64, ONE, ZERO};

/// A root together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: C64,
    pub multiplicity: usize,
}

/// One term `coeff / (w − root)^order` of a partial-fraction expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialFraction {
    pub root: C64,
    pub order: usize,
    pub coeff: C64,
}

const MAX_ITER: usize = 800;

/// Roots of `p` with multiplicities, sorted by real then imaginary part.
///
/// Simultaneous Aberth–Ehrlich iteration followed by clustering of nearly
/// coincident approximations; each cluster center is polished by Newton on
/// the derivative of order `m − 1`, where it is a simple root. The result is
/// accepted only if `lead · Π(w − r)^m` reproduces `p` to `tol` relative to
/// the coefficient norm.
pub fn roots(p: &ComplexPoly, tol: f64) -> Result<Vec<Root>> {
    let deg = p
        .degree()
        .ok_or_else(|| Error::InvalidInput("roots of the zero polynomial".into()))?;
    let c = p.coeffs();
    let zeros = c.iter().take_while(|z| **z == ZERO).count();
    let reduced = ComplexPoly::new(c[zeros..].to_vec(), p.var());
    let mut approx = aberth(&reduced)?;
    approx.extend(core::iter::repeat_n(ZERO, zeros));

    let scale = p.norm_inf().max(1e-300);
    let candidates = cluster(p, &approx);
    for cand in [candidates, singletons(&approx)] {
        let mut cand = cand;
        sort_roots(&mut cand);
        let rebuilt = ComplexPoly::from_roots(
            p.leading(),
            &cand
                .iter()
                .map(|r| (r.value, r.multiplicity))
                .collect::<Vec<_>>(),
            p.var(),
        );
        let err = (&rebuilt - p).norm_inf();
        if err <= tol.max(1e-15) * scale {
            debug_assert_eq!(cand.iter().map(|r| r.multiplicity).sum::<usize>(), deg);
            return Ok(cand);
        }
    }
    let fallback = singletons(&approx);
    let rebuilt = ComplexPoly::from_roots(
        p.leading(),
        &fallback
            .iter()
            .map(|r| (r.value, r.multiplicity))
            .collect::<Vec<_>>(),
        p.var(),
    );
    Err(Error::NoConvergence {
        what: "root finder",
        residual: (&rebuilt - p).norm_inf() / scale,
    })
}

fn sort_roots(r: &mut [Root]) {
    r.sort_by(|a, b| {
        a.value
            .re
            .partial_cmp(&b.value.re)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(
                a.value
                    .im
                    .partial_cmp(&b.value.im)
                    .unwrap_or(core::cmp::Ordering::Equal),
            )
    });
}

fn singletons(approx: &[C64]) -> Vec<Root> {
    approx
        .iter()
        .map(|&value| Root {
            value,
            multiplicity: 1,
        })
        .collect()
}

fn aberth(p: &ComplexPoly) -> Result<Vec<C64>> {
    let n = match p.degree() {
        Some(0) | None => return Ok(Vec::new()),
        Some(n) => n,
    };
    let lead = p.leading();
    let c = p.coeffs();
    if n == 1 {
        return Ok(vec![-c[0] / lead]);
    }
    let radius = (0..n)
        .map(|k| powf((c[k] / lead).norm(), 1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<C64> = (0..n)
        .map(|k| cis(TAU * k as f64 / n as f64 + 0.4) * radius)
        .collect();
    for _ in 0..MAX_ITER {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (v, d) = p.eval_d(z[i]);
            if v == ZERO {
                continue;
            }
            let ratio = v / d;
            let mut s = ZERO;
            for j in 0..n {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff != ZERO {
                        s += ONE / diff;
                    }
                }
            }
            let step = ratio / (ONE - ratio * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-16 {
            break;
        }
    }
    Ok(z)
}

fn cluster(p: &ComplexPoly, approx: &[C64]) -> Vec<Root> {
    let n = approx.len();
    let mut used = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut members = vec![approx[i]];
        let radius = 1e-4 * (1.0 + approx[i].norm());
        for j in (i + 1)..n {
            if !used[j] && (approx[j] - approx[i]).norm() < radius {
                used[j] = true;
                members.push(approx[j]);
            }
        }
        let m = members.len();
        let centroid = members.iter().fold(ZERO, |a, &b| a + b) / m as f64;
        let value = if m > 1 {
            polish(p, centroid, m)
        } else {
            centroid
        };
        out.push(Root {
            value,
            multiplicity: m,
        });
    }
    out
}

/// Newton on `p^{(m−1)}` started at `z`.
fn polish(p: &ComplexPoly, z: C64, m: usize) -> C64 {
    let mut q = p.clone();
    for _ in 0..m - 1 {
        q = q.derivative();
    }
    let mut z = z;
    for _ in 0..50 {
        let (v, d) = q.eval_d(z);
        if d == ZERO {
            break;
        }
        let step = v / d;
        z -= step;
        if step.norm() <= 1e-17 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Coefficients of `1/q` around the point where the Taylor data `t` of `q` was taken.
fn reciprocal_series(t: &[C64], n: usize) -> Vec<C64> {
    let mut b = vec![ZERO; n];
    if n == 0 {
        return b;
    }
    b[0] = ONE / t[0];
    for k in 1..n {
        let mut s = ZERO;
        for i in 1..=k.min(t.len() - 1) {
            s += t[i] * b[k - i];
        }
        b[k] = -s * b[0];
    }
    b
}

/// Laurent data of `1/p` at `root`: returns `c_k` for `k = 1..=m`, the
/// coefficient of `(w − root)^{−k}`.
fn laurent_principal(p: &ComplexPoly, root: C64, m: usize, tol: f64) -> Result<Vec<C64>> {
    let t = p.taylor_at(root);
    let scale = p.norm_inf().max(1e-300);
    let lead_ok = t.get(m).map(|c| c.norm() > tol * scale).unwrap_or(false);
    let lower_ok = t[..m.min(t.len())].iter().all(|c| c.norm() <= 1e-6 * scale);
    if m == 0 || !lead_ok || !lower_ok {
        return Err(Error::MultiplicityMismatch {
            root,
            multiplicity: m,
        });
    }
    let b = reciprocal_series(&t[m..], m);
    Ok((1..=m).map(|k| b[m - k]).collect())
}

/// Coefficient of `1/(w − root)` in the Laurent expansion of `1/p` at `root`.
pub fn residue(p: &ComplexPoly, root: C64, multiplicity: usize, tol: f64) -> Result<C64> {
    laurent_principal(p, root, multiplicity, tol).map(|c| c[0])
}

/// Full partial-fraction expansion `1/p = Σ c_{r,k} / (w − r)^k`.
///
/// Terms are grouped by root in the order of [`roots`], with decreasing
/// order inside each group. Terms that vanish to `tol` are omitted.
pub fn partial_fractions(p: &ComplexPoly, tol: f64) -> Result<Vec<PartialFraction>> {
    if p.degree().unwrap_or(0) < 1 {
        return Err(Error::InvalidInput(
            "partial fractions need degree ≥ 1".into(),
        ));
    }
    let rs = roots(p, tol)?;
    let mut out = Vec::new();
    for r in rs {
        let c = laurent_principal(p, r.value, r.multiplicity, tol)?;
        let floor = tol * c.iter().fold(0.0, |m: f64, v| m.max(v.norm()));
        for k in (1..=r.multiplicity).rev() {
            if c[k - 1].norm() <= floor {
                continue;
            }
            out.push(PartialFraction {
                root: r.value,
                order: k,
                coeff: c[k - 1],
            });
        }
    }
    Ok(out)
}

/// Evaluates `Σ c / (w − r)^k`.
pub fn eval_partial_fractions(terms: &[PartialFraction], w: C64) -> C64 {
    terms.iter().fold(ZERO, |acc, t| {
        acc + t.coeff / crate::num::cpowi(w - t.root, t.order as u32)
    })
}
