//! Formal infinitesimal generator and k-normal forms.

use serde::{Deserialize, Serialize};

use super::map::{MapForm, UnfoldingMap};
#[cfg(test)]
use super::taylor;
use crate::algebra::BiSeries;
use crate::error::{Error, Result};
use crate::splitting::VectorFieldUnfolding;

pub const DEFAULT_K: usize = 6;

/// Formal `ĝ` with `y∘φ = exp(ĝ ∂/∂y)(y)` modulo the truncation.
pub fn infinitesimal_generator(map: &UnfoldingMap) -> Result<BiSeries> {
    let phi = map.series()?;
    let y = BiSeries::y(map.order());
    let f = &phi - &y;
    // degree by degree: the error in total degree m depends on g only
    // through degrees ≤ m, with unit coefficient in degree m
    let mut g = f.clone();
    for m in 2..=map.order() {
        let e = &(&y.lie_exp(&g) - &y) - &f;
        let mut fix = BiSeries::zero(map.order());
        for ((i, j), c) in e.terms() {
            if i + j == m {
                fix.add_term((i, j), c);
            }
        }
        g = &g - &fix;
    }
    let residual = weighted_norm(&(&(&y.lie_exp(&g) - &y) - &f));
    if residual > 1e-10 * (1.0 + weighted_norm(&f)) {
        return Err(Error::NoConvergence {
            what: "infinitesimal generator",
            residual,
        });
    }
    Ok(g)
}

/// Largest `|c_ij| 2^{-(i+j)}`; truncated series grow at the top degrees,
/// so errors there are measured on the scale where the series is used.
fn weighted_norm(s: &BiSeries) -> f64 {
    s.terms()
        .map(|((i, j), c)| c.norm() * crate::num::powi(0.5, (i + j) as i32))
        .fold(0.0, f64::max)
}

/// `û` with `ĝ = û · (y∘φ − y)`.
pub fn generator_unit(map: &UnfoldingMap) -> Result<BiSeries> {
    let d = map.order();
    let n = map.curves().total_multiplicity();
    let fprod = map.curves().product(d);
    let g = infinitesimal_generator(map)?;
    let f = &map.series()? - &BiSeries::y(d);
    let (qg, rg) = g.weierstrass_div(&fprod, n)?;
    let (qf, rf) = f.weierstrass_div(&fprod, n)?;
    let tol = 1e-11 * (1.0 + g.max_abs());
    if rg.max_abs() > tol || rf.max_abs() > tol {
        return Err(Error::NoConvergence {
            what: "generator divisibility",
            residual: rg.max_abs().max(rf.max_abs()),
        });
    }
    Ok(&qg * &qf.recip()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalForm {
    pub k: usize,
    pub field: VectorFieldUnfolding,
    /// `φ = exp(X_k)` on the nose up to `(F^{k+1})`-terms the map carries
    /// explicitly.
    pub exact: bool,
}

/// `X_k` with `y∘φ − y∘exp(X_k) ∈ (F^{k+1})`.
pub fn k_normal_form(map: &UnfoldingMap, k: usize) -> Result<NormalForm> {
    if k < 1 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let d = map.order();
    let n = map.curves().total_multiplicity();
    let fprod = map.curves().product(d);
    if let MapForm::TimeOne {
        field,
        perturbation,
    } = map.form()
    {
        if perturbation.is_zero() || perturbation.adic_order(&fprod, n, k + 1)? > k {
            return Ok(NormalForm {
                k,
                field: field.clone(),
                exact: true,
            });
        }
    }
    let needed = n * k as u32;
    if d < needed {
        return Err(Error::TruncationTooLow { needed, have: d });
    }
    let g = infinitesimal_generator(map)?;
    let parts = g.adic_expansion(&fprod, n, k + 1)?;
    if parts[0].max_abs() > 1e-11 * (1.0 + g.max_abs()) {
        return Err(Error::NoConvergence {
            what: "generator divisibility",
            residual: parts[0].max_abs(),
        });
    }
    // u_k = R_1 + F R_2 + … + F^{k−1} R_k, Horner in F
    let mut unit = parts[k].clone();
    for r in parts[1..k].iter().rev() {
        unit = &(&unit * &fprod) + r;
    }
    Ok(NormalForm {
        k,
        field: VectorFieldUnfolding::new(unit, map.curves().clone(), 0)?,
        exact: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FixedCurveSet;
    use crate::num::{C64, ONE, ZERO};

    fn two_point() -> FixedCurveSet {
        FixedCurveSet::from_coeffs(&[(&[ZERO], 1), (&[ZERO, ONE], 1)]).unwrap()
    }

    #[test]
    fn generator_of_time_one_is_the_field() {
        let curves = two_point();
        let unit = BiSeries::from_terms(20, [((0, 0), ONE), ((0, 1), C64::new(0.5, 0.0))]);
        let field = VectorFieldUnfolding::new(unit, curves, 0).unwrap();
        let map = UnfoldingMap::time_one(field.clone(), BiSeries::zero(20), 20).unwrap();
        let g = infinitesimal_generator(&map).unwrap();
        assert!(weighted_norm(&(&g - &field.series(20))) < 1e-13);
    }

    #[test]
    fn normal_form_residual_in_high_power() {
        let curves = two_point();
        let d = 20;
        let f = curves.product(d);
        let unit = BiSeries::constant(ONE, d);
        let pert = (&f * &f).scale(C64::new(0.7, 0.0));
        let map = UnfoldingMap::explicit(unit, curves.clone(), pert, d).unwrap();
        let x = C64::new(0.01, 0.005);
        let fiber = map.fiber(x);
        let mut last = f64::INFINITY;
        for k in 1..=4 {
            let nf = k_normal_form(&map, k).unwrap();
            assert!(!nf.exact);
            let p = nf.field.poly_at(x);
            let mut worst = 0.0f64;
            let mut err = 0.0f64;
            for m in 0..16 {
                let q = crate::num::cis(m as f64 * 0.4) * 0.15;
                let e = (fiber.apply(q).unwrap() - taylor::flow(&p, q, ONE).unwrap()).norm();
                let fq = curves.eval(x, q).norm();
                worst = worst.max(e / crate::num::powi(fq, k as i32 + 1));
                err = err.max(e);
            }
            assert!(worst < 1e3, "k = {k}: {worst}");
            assert!(err < last);
            last = err;
        }
        let u = generator_unit(&map).unwrap();
        assert!((u.get(0, 0) - ONE).norm() < 1e-13);
    }
}
