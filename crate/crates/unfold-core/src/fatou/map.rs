//! Unfoldings of parabolic maps `φ(x, y) = (x, f(x, y))`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::taylor;
use crate::algebra::{BiSeries, ComplexPoly, FixedCurveSet};
use crate::error::{Error, Result};
use crate::num::{C64, ONE, ZERO};
use crate::splitting::VectorFieldUnfolding;

const NEWTON_TOL: f64 = 1e-13;
const NEWTON_ITER: usize = 60;

/// How `y∘φ` is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MapForm {
    /// `y∘φ = exp(X)(y) + π` with `π ∈ (F²)`.
    TimeOne {
        field: VectorFieldUnfolding,
        perturbation: BiSeries,
    },
    /// `y∘φ = y + u·F + π` with `π ∈ (F)`.
    Explicit {
        unit: BiSeries,
        perturbation: BiSeries,
    },
    /// `σ ∘ φ ∘ σ⁻¹` for a change of coordinates `σ` fixing every fixed curve.
    Conjugated {
        sigma: BiSeries,
        inner: Box<UnfoldingMap>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfoldingMap {
    curves: FixedCurveSet,
    form: MapForm,
    order: u32,
}

impl UnfoldingMap {
    pub fn time_one(
        field: VectorFieldUnfolding,
        perturbation: BiSeries,
        order: u32,
    ) -> Result<Self> {
        if field.x_exponent != 0 {
            return Err(Error::InvalidInput(
                "the time-one field must not vanish identically on x = 0".into(),
            ));
        }
        let curves = field.curves.clone();
        check_order(&curves, order)?;
        let f = curves.product(order);
        let n = curves.total_multiplicity();
        if !perturbation.is_zero() && perturbation.truncate(order).adic_order(&f, n, 2)? < 2 {
            return Err(Error::InvalidInput(
                "time-one perturbation must lie in (F²)".into(),
            ));
        }
        Ok(UnfoldingMap {
            curves,
            form: MapForm::TimeOne {
                field,
                perturbation: perturbation.truncate(order),
            },
            order,
        })
    }

    pub fn explicit(
        unit: BiSeries,
        curves: FixedCurveSet,
        perturbation: BiSeries,
        order: u32,
    ) -> Result<Self> {
        check_order(&curves, order)?;
        let f = curves.product(order);
        let n = curves.total_multiplicity();
        let (q, r) = perturbation.truncate(order).weierstrass_div(&f, n)?;
        if r.max_abs() > 1e-13 * (1.0 + perturbation.max_abs()) {
            return Err(Error::InvalidInput(
                "explicit perturbation must lie in (F)".into(),
            ));
        }
        if (unit.get(0, 0) + q.get(0, 0)).norm() < 1e-14 {
            return Err(Error::InvalidInput("f − y must be F times a unit".into()));
        }
        Ok(UnfoldingMap {
            curves,
            form: MapForm::Explicit {
                unit: unit.truncate(order),
                perturbation: perturbation.truncate(order),
            },
            order,
        })
    }

    /// `σ ∘ inner ∘ σ⁻¹`; `σ` must be tangent to the identity and fix each
    /// fixed curve pointwise.
    pub fn conjugated(inner: UnfoldingMap, sigma: BiSeries) -> Result<Self> {
        let order = inner.order;
        if sigma.get(0, 0) != ZERO || (sigma.get(0, 1) - ONE).norm() > 1e-14 {
            return Err(Error::InvalidInput(
                "σ must be y + higher order terms".into(),
            ));
        }
        let reduced = FixedCurveSet::new(
            inner
                .curves
                .curves()
                .iter()
                .map(|c| crate::algebra::FixedCurve {
                    gamma: c.gamma.clone(),
                    multiplicity: 1,
                })
                .collect(),
        );
        let diff = &sigma.truncate(order) - &BiSeries::y(order);
        let fixes = match reduced {
            Ok(r) if r.total_multiplicity() >= 2 => {
                diff.adic_order(&r.product(order), r.total_multiplicity(), 1)? >= 1
            }
            // a single curve `y = γ(x)`
            _ => {
                let g = &inner.curves.curves()[0].gamma;
                let gs = BiSeries::from_poly_x(g, order);
                diff.compose_y(&gs).map(|v| v.max_abs() < 1e-13)?
            }
        };
        if !fixes {
            return Err(Error::InvalidInput("σ must fix every fixed curve".into()));
        }
        Ok(UnfoldingMap {
            curves: inner.curves.clone(),
            form: MapForm::Conjugated {
                sigma: sigma.truncate(order),
                inner: Box::new(inner),
            },
            order,
        })
    }

    pub fn curves(&self) -> &FixedCurveSet {
        &self.curves
    }

    pub fn form(&self) -> &MapForm {
        &self.form
    }

    /// Truncation order `D` of the series data.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn nu(&self) -> u32 {
        self.curves.nu()
    }

    /// The vector field whose time-one map `φ` is, when given that way.
    pub fn time_one_field(&self) -> Option<&VectorFieldUnfolding> {
        match &self.form {
            MapForm::TimeOne { field, .. } => Some(field),
            _ => None,
        }
    }

    /// `y∘φ` as a series truncated at the map's order.
    pub fn series(&self) -> Result<BiSeries> {
        let d = self.order;
        let y = BiSeries::y(d);
        Ok(match &self.form {
            MapForm::TimeOne {
                field,
                perturbation,
            } => &y.lie_exp(&field.series(d)) + perturbation,
            MapForm::Explicit { unit, perturbation } => {
                &(&y + &(unit * &self.curves.product(d))) + perturbation
            }
            MapForm::Conjugated { sigma, inner } => {
                let inv = sigma.inverse_y()?;
                sigma.compose_y(&inner.series()?.compose_y(&inv)?)?
            }
        })
    }

    /// The restriction to the fiber over `x`.
    pub fn fiber(&self, x: C64) -> FiberMap {
        match &self.form {
            MapForm::TimeOne {
                field,
                perturbation,
            } => FiberMap::TimeOne {
                field: field.poly_at(x),
                perturbation: perturbation.at_x(x),
            },
            MapForm::Explicit { unit, perturbation } => {
                let f = self.curves.product(self.order).at_x(x);
                let g = &(&ComplexPoly::identity(crate::algebra::Var::Y) + &(&unit.at_x(x) * &f))
                    + &perturbation.at_x(x);
                FiberMap::Explicit { g }
            }
            MapForm::Conjugated { sigma, inner } => FiberMap::Conjugated {
                sigma: sigma.at_x(x),
                sigma_inverse: sigma.inverse_y().ok().map(|s| s.at_x(x)),
                inner: Box::new(inner.fiber(x)),
            },
        }
    }

    pub fn eval(&self, x: C64, y: C64) -> Result<C64> {
        self.fiber(x).apply(y)
    }
}

fn check_order(curves: &FixedCurveSet, order: u32) -> Result<()> {
    let needed = curves.total_multiplicity() + 1;
    if order < needed {
        return Err(Error::TruncationTooLow {
            needed,
            have: order,
        });
    }
    Ok(())
}

/// `y ↦ f(x, y)` at a fixed parameter, with polynomial data pre-evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum FiberMap {
    TimeOne {
        field: ComplexPoly,
        perturbation: ComplexPoly,
    },
    Explicit {
        g: ComplexPoly,
    },
    Conjugated {
        sigma: ComplexPoly,
        sigma_inverse: Option<ComplexPoly>,
        inner: Box<FiberMap>,
    },
}

impl FiberMap {
    pub fn apply(&self, y: C64) -> Result<C64> {
        match self {
            FiberMap::TimeOne {
                field,
                perturbation,
            } => Ok(taylor::flow(field, y, ONE)? + perturbation.eval(y)),
            FiberMap::Explicit { g } => Ok(g.eval(y)),
            FiberMap::Conjugated {
                sigma,
                sigma_inverse,
                inner,
            } => {
                let z = invert_poly(sigma, sigma_inverse.as_ref(), y)?;
                Ok(sigma.eval(inner.apply(z)?))
            }
        }
    }

    /// `∂f/∂y` at `y`.
    pub fn derivative(&self, y: C64) -> Result<C64> {
        match self {
            FiberMap::TimeOne {
                field,
                perturbation,
            } => {
                let (v, dv) = field.eval_d(y);
                let image = taylor::flow(field, y, ONE)?;
                let flow_d = if v.norm() > 1e-12 * (1.0 + y.norm()) {
                    field.eval(image) / v
                } else {
                    dv.exp()
                };
                Ok(flow_d + perturbation.eval_d(y).1)
            }
            FiberMap::Explicit { g } => Ok(g.eval_d(y).1),
            FiberMap::Conjugated {
                sigma,
                sigma_inverse,
                inner,
            } => {
                let z = invert_poly(sigma, sigma_inverse.as_ref(), y)?;
                let w = inner.apply(z)?;
                Ok(sigma.eval_d(w).1 * inner.derivative(z)? / sigma.eval_d(z).1)
            }
        }
    }

    /// `f⁻¹(y)` by Newton's method from a first-order seed.
    pub fn inverse(&self, y: C64) -> Result<C64> {
        match self {
            FiberMap::TimeOne { field, .. } => {
                let seed = taylor::flow(field, y, -ONE)?;
                self.newton(y, seed)
            }
            FiberMap::Explicit { g } => self.newton(y, y - (g.eval(y) - y)),
            FiberMap::Conjugated {
                sigma,
                sigma_inverse,
                inner,
            } => {
                let z = invert_poly(sigma, sigma_inverse.as_ref(), y)?;
                Ok(sigma.eval(inner.inverse(z)?))
            }
        }
    }

    /// `f^n(y)` for `n ∈ ℤ`.
    pub fn iterate(&self, y: C64, n: i64) -> Result<C64> {
        let mut z = y;
        for _ in 0..n.unsigned_abs() {
            z = if n > 0 {
                self.apply(z)?
            } else {
                self.inverse(z)?
            };
        }
        Ok(z)
    }

    fn newton(&self, target: C64, seed: C64) -> Result<C64> {
        let mut z = seed;
        let mut residual = f64::INFINITY;
        for _ in 0..NEWTON_ITER {
            let r = self.apply(z)? - target;
            residual = r.norm();
            if residual <= NEWTON_TOL * 1e-3 * (1.0 + target.norm()) {
                return Ok(z);
            }
            let step = r / self.derivative(z)?;
            z -= step;
            if step.norm() <= 1e-16 * (1.0 + z.norm()) {
                return Ok(z);
            }
        }
        if residual <= NEWTON_TOL * (1.0 + target.norm()) {
            return Ok(z);
        }
        Err(Error::NoConvergence {
            what: "map inverse",
            residual,
        })
    }
}

/// Solves `p(z) = y` near `z = y`, seeded by a truncated inverse series.
fn invert_poly(p: &ComplexPoly, seed: Option<&ComplexPoly>, y: C64) -> Result<C64> {
    let mut z = seed.map_or(y, |s| s.eval(y));
    let mut residual = f64::INFINITY;
    for _ in 0..NEWTON_ITER {
        let (v, d) = p.eval_d(z);
        let r = v - y;
        residual = r.norm();
        if residual <= 1e-16 * (1.0 + y.norm()) {
            return Ok(z);
        }
        let step = r / d;
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            return Ok(z);
        }
    }
    if residual <= NEWTON_TOL {
        return Ok(z);
    }
    Err(Error::NoConvergence {
        what: "coordinate inverse",
        residual,
    })
}

/// Orbit `q, f^s(q), f^{2s}(q), …` of length `len`.
pub fn orbit(map: &FiberMap, q: C64, s: i64, len: usize) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(len);
    let mut z = q;
    for _ in 0..len {
        out.push(z);
        z = map.iterate(z, s)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FixedCurveSet;

    fn parabolic() -> UnfoldingMap {
        let curves = FixedCurveSet::from_coeffs(&[(&[ZERO], 2)]).unwrap();
        let field = VectorFieldUnfolding::with_constant_unit(ONE, curves).unwrap();
        UnfoldingMap::time_one(field, BiSeries::zero(20), 20).unwrap()
    }

    #[test]
    fn time_one_of_square_is_mobius() {
        let m = parabolic();
        let fib = m.fiber(ZERO);
        let y = C64::new(-0.3, 0.2);
        assert!((fib.apply(y).unwrap() - y / (ONE - y)).norm() < 1e-15);
        assert!((fib.inverse(y).unwrap() - y / (ONE + y)).norm() < 1e-15);
        let d = fib.derivative(y).unwrap();
        assert!((d - ONE / ((ONE - y) * (ONE - y))).norm() < 1e-14);
    }

    #[test]
    fn series_matches_evaluation() {
        let curves = FixedCurveSet::from_coeffs(&[(&[ZERO], 1), (&[ZERO, ONE], 1)]).unwrap();
        let field = VectorFieldUnfolding::with_constant_unit(ONE, curves.clone()).unwrap();
        let f = curves.product(20);
        let pert = (&f * &f).scale(C64::new(0.3, 0.0));
        let m = UnfoldingMap::time_one(field, pert, 20).unwrap();
        let s = m.series().unwrap();
        let (x, y) = (C64::new(0.02, 0.01), C64::new(0.05, -0.03));
        assert!((s.eval(x, y) - m.eval(x, y).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn conjugation_round_trip() {
        let inner = parabolic();
        let y = BiSeries::y(20);
        let sigma = &y + &(&y * &y).scale(C64::new(0.1, 0.0));
        let eta = UnfoldingMap::conjugated(inner.clone(), sigma.clone()).unwrap();
        let (x, q) = (ZERO, C64::new(-0.2, 0.1));
        let lhs = eta.eval(x, sigma.eval(x, q)).unwrap();
        let rhs = sigma.eval(x, inner.eval(x, q).unwrap());
        assert!((lhs - rhs).norm() < 1e-14);
        let fib = eta.fiber(x);
        let back = fib.inverse(fib.apply(q).unwrap()).unwrap();
        assert!((back - q).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_perturbation() {
        let curves = FixedCurveSet::from_coeffs(&[(&[ZERO], 2)]).unwrap();
        let field = VectorFieldUnfolding::with_constant_unit(ONE, curves).unwrap();
        let pert = BiSeries::from_terms(20, [((0, 3), ONE)]);
        assert!(UnfoldingMap::time_one(field, pert, 20).is_err());
    }
}
