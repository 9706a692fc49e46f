use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::poly::{ComplexPoly, Var};
use crate::error::{Error, Result};
use crate::num::{C64, ONE, ZERO};

/// Truncated power series `Σ c_{ij} x^i y^j` with `i + j ≤ order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiSeries {
    coeffs: BTreeMap<(u32, u32), C64>,
    order: u32,
}

impl BiSeries {
    pub fn zero(order: u32) -> Self {
        BiSeries {
            coeffs: BTreeMap::new(),
            order,
        }
    }

    pub fn constant(c: C64, order: u32) -> Self {
        Self::from_terms(order, [((0, 0), c)])
    }

    pub fn x(order: u32) -> Self {
        Self::from_terms(order, [((1, 0), ONE)])
    }

    pub fn y(order: u32) -> Self {
        Self::from_terms(order, [((0, 1), ONE)])
    }

    /// Builds a series from `((i, j), c)` terms, summing repeats and
    /// dropping terms above the truncation order.
    pub fn from_terms<I>(order: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), C64)>,
    {
        let mut s = Self::zero(order);
        for (k, c) in terms {
            s.add_term(k, c);
        }
        s
    }

    /// Polynomial in `x` (a curve `y = γ(x)` or a unit's x-part).
    pub fn from_poly_x(p: &ComplexPoly, order: u32) -> Self {
        Self::from_terms(
            order,
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(i, &c)| ((i as u32, 0), c)),
        )
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn get(&self, i: u32, j: u32) -> C64 {
        self.coeffs.get(&(i, j)).copied().unwrap_or(ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), C64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, (i, j): (u32, u32), c: C64) {
        if i + j > self.order || c == ZERO {
            return;
        }
        let e = self.coeffs.entry((i, j)).or_insert(ZERO);
        *e += c;
        if *e == ZERO {
            self.coeffs.remove(&(i, j));
        }
    }

    /// Copy with a different truncation order.
    pub fn truncate(&self, order: u32) -> Self {
        Self::from_terms(order, self.terms())
    }

    /// Lowest total degree present, `None` for zero.
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.keys().map(|&(i, j)| i + j).min()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_terms(self.order, self.terms().map(|(k, v)| (k, v * c)))
    }

    pub fn eval(&self, x: C64, y: C64) -> C64 {
        self.at_x(x).eval(y)
    }

    /// The polynomial in `y` obtained by fixing `x`.
    pub fn at_x(&self, x: C64) -> ComplexPoly {
        let mut c = vec![ZERO; self.order as usize + 1];
        let mut xp = vec![ONE; self.order as usize + 1];
        for k in 1..xp.len() {
            xp[k] = xp[k - 1] * x;
        }
        for ((i, j), v) in self.terms() {
            c[j as usize] += v * xp[i as usize];
        }
        ComplexPoly::new(c, Var::Y)
    }

    /// Coefficient of `x^i` as a polynomial in `y`.
    pub fn x_coeff(&self, i: u32) -> ComplexPoly {
        let mut c = vec![ZERO; self.order as usize + 1];
        for ((a, j), v) in self.terms() {
            if a == i {
                c[j as usize] += v;
            }
        }
        ComplexPoly::new(c, Var::Y)
    }

    pub fn dy(&self) -> Self {
        Self::from_terms(
            self.order,
            self.terms()
                .filter(|((_, j), _)| *j > 0)
                .map(|((i, j), c)| ((i, j - 1), c * j as f64)),
        )
    }

    pub fn dx(&self) -> Self {
        Self::from_terms(
            self.order,
            self.terms()
                .filter(|((i, _), _)| *i > 0)
                .map(|((i, j), c)| ((i - 1, j), c * i as f64)),
        )
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(ONE, self.order);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// `self(x, g(x, y))`; `g` must vanish at the origin.
    pub fn compose_y(&self, g: &BiSeries) -> Result<Self> {
        if g.get(0, 0) != ZERO {
            return Err(Error::InvalidInput(
                "composition with a series not vanishing at 0".into(),
            ));
        }
        let order = self.order.min(g.order);
        let jmax = self.coeffs.keys().map(|&(_, j)| j).max().unwrap_or(0);
        let mut acc = Self::zero(order);
        for j in (0..=jmax).rev() {
            acc = &acc * g;
            for ((i, jj), c) in self.terms() {
                if jj == j {
                    acc.add_term((i, 0), c);
                }
            }
        }
        Ok(acc)
    }

    /// `h(x, y) ∂/∂y` applied to `self`.
    pub fn derive_along(&self, h: &BiSeries) -> Self {
        &self.dy() * h
    }

    /// `exp(h ∂/∂y)(self) = Σ (h∂_y)^n(self) / n!`, truncated.
    ///
    /// Needs `h` of valuation at least 2 so that every application raises
    /// the valuation.
    pub fn lie_exp(&self, h: &BiSeries) -> Self {
        let mut term = self.clone();
        let mut acc = self.clone();
        for n in 1..=self.order + 1 {
            term = term.derive_along(h).scale(C64::new(1.0 / n as f64, 0.0));
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        let c = self.get(0, 0);
        if c.norm() < 1e-14 {
            return Err(Error::InvalidInput("series is not a unit".into()));
        }
        let h = (self - &Self::constant(c, self.order)).scale(-ONE / c);
        let mut acc = Self::constant(ONE, self.order);
        let mut term = acc.clone();
        for _ in 0..=self.order {
            term = &term * &h;
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        Ok(acc.scale(ONE / c))
    }

    /// Compositional inverse in `y` with `x` as a parameter: `self(x, g) = y`.
    pub fn inverse_y(&self) -> Result<Self> {
        if (self.get(0, 1) - ONE).norm() > 1e-14 || self.get(0, 0) != ZERO {
            return Err(Error::InvalidInput(
                "series inversion needs the form y + higher order terms".into(),
            ));
        }
        let y = Self::y(self.order);
        let h = self - &y;
        let mut g = y.clone();
        for _ in 0..=self.order + 1 {
            let next = &y - &h.compose_y(&g)?;
            if next == g {
                break;
            }
            g = next;
        }
        Ok(g)
    }

    /// Division by a monic polynomial `w` of y-degree `n` whose lower
    /// coefficients vanish at `x = 0`: `self = q·w + r` with `deg_y r < n`.
    pub fn weierstrass_div(&self, w: &BiSeries, n: u32) -> Result<(Self, Self)> {
        if (w.get(0, n) - ONE).norm() > 1e-14
            || w.terms().any(|((i, j), _)| j > n || (j == n && i > 0))
        {
            return Err(Error::InvalidInput(
                "divisor must be monic of the stated y-degree".into(),
            ));
        }
        if w.terms().any(|((i, j), _)| j < n && i == 0) {
            return Err(Error::InvalidInput(
                "divisor is not distinguished in y".into(),
            ));
        }
        let tail = w - &Self::from_terms(w.order, [((0, n), ONE)]);
        let mut q = Self::zero(self.order);
        let mut r = Self::zero(self.order);
        let mut s = self.clone();
        for _ in 0..=self.order + 1 {
            if s.is_zero() {
                break;
            }
            let mut high = Self::zero(self.order);
            for ((i, j), c) in s.terms() {
                if j >= n {
                    high.add_term((i, j - n), c);
                } else {
                    r.add_term((i, j), c);
                }
            }
            q = &q + &high;
            s = -&(&tail * &high);
        }
        if !s.is_zero() {
            return Err(Error::NoConvergence {
                what: "Weierstrass division",
                residual: s.max_abs(),
            });
        }
        Ok((q, r))
    }

    /// Expansion `self = r_0 + w r_1 + w² r_2 + …` with `deg_y r_i < n`,
    /// returning the first `count` remainders.
    pub fn adic_expansion(&self, w: &BiSeries, n: u32, count: usize) -> Result<Vec<Self>> {
        let mut out = Vec::with_capacity(count);
        let mut s = self.clone();
        for _ in 0..count {
            let (q, r) = s.weierstrass_div(w, n)?;
            out.push(r);
            s = q;
        }
        Ok(out)
    }

    /// Smallest `m` with `self ∈ (w^m)` modulo the truncation, capped at `cap`.
    pub fn adic_order(&self, w: &BiSeries, n: u32, cap: usize) -> Result<usize> {
        let mut s = self.clone();
        for m in 0..cap {
            let (q, r) = s.weierstrass_div(w, n)?;
            if r.max_abs() > 1e-13 * (1.0 + self.max_abs()) {
                return Ok(m);
            }
            s = q;
        }
        Ok(cap)
    }
}

impl Add for &BiSeries {
    type Output = BiSeries;
    fn add(self, rhs: &BiSeries) -> BiSeries {
        let mut s = self.truncate(self.order.min(rhs.order));
        for (k, c) in rhs.terms() {
            s.add_term(k, c);
        }
        s
    }
}

impl Sub for &BiSeries {
    type Output = BiSeries;
    fn sub(self, rhs: &BiSeries) -> BiSeries {
        let mut s = self.truncate(self.order.min(rhs.order));
        for (k, c) in rhs.terms() {
            s.add_term(k, -c);
        }
        s
    }
}

impl Mul for &BiSeries {
    type Output = BiSeries;
    fn mul(self, rhs: &BiSeries) -> BiSeries {
        let order = self.order.min(rhs.order);
        let mut s = BiSeries::zero(order);
        for ((i, j), a) in self.terms() {
            for ((k, l), b) in rhs.terms() {
                if i + j + k + l <= order {
                    s.add_term((i + k, j + l), a * b);
                }
            }
        }
        s
    }
}

impl Neg for &BiSeries {
    type Output = BiSeries;
    fn neg(self) -> BiSeries {
        self.scale(-ONE)
    }
}

/// Curve `y = γ(x)` with `γ(0) = 0` and a multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedCurve {
    pub gamma: ComplexPoly,
    pub multiplicity: u32,
}

/// Irreducible components of the fixed-point set, `Π (y − γ_j(x))^{n_j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedCurveSet {
    curves: Vec<FixedCurve>,
}

impl FixedCurveSet {
    pub fn new(curves: Vec<FixedCurve>) -> Result<Self> {
        if curves.iter().any(|c| c.multiplicity == 0) {
            return Err(Error::InvalidInput(
                "curve multiplicity must be positive".into(),
            ));
        }
        if curves.iter().any(|c| c.gamma.coeff(0) != ZERO) {
            return Err(Error::InvalidInput(
                "every curve must pass through the origin".into(),
            ));
        }
        for (a, ca) in curves.iter().enumerate() {
            for cb in &curves[a + 1..] {
                if (&ca.gamma - &cb.gamma).is_zero() {
                    return Err(Error::InvalidInput(
                        "fixed curves must be pairwise distinct".into(),
                    ));
                }
            }
        }
        if curves.iter().map(|c| c.multiplicity).sum::<u32>() < 2 {
            return Err(Error::InvalidInput(
                "total multiplicity must be at least 2".into(),
            ));
        }
        let curves = curves
            .into_iter()
            .map(|c| FixedCurve {
                gamma: c.gamma.with_var(Var::X),
                multiplicity: c.multiplicity,
            })
            .collect();
        Ok(FixedCurveSet { curves })
    }

    /// Shorthand for curves given as coefficient lists.
    pub fn from_coeffs(curves: &[(&[C64], u32)]) -> Result<Self> {
        Self::new(
            curves
                .iter()
                .map(|(g, m)| FixedCurve {
                    gamma: ComplexPoly::new(g.to_vec(), Var::X),
                    multiplicity: *m,
                })
                .collect(),
        )
    }

    pub fn curves(&self) -> &[FixedCurve] {
        &self.curves
    }

    /// Total multiplicity `Σ n_j`.
    pub fn total_multiplicity(&self) -> u32 {
        self.curves.iter().map(|c| c.multiplicity).sum()
    }

    /// `ν = Σ n_j − 1`.
    pub fn nu(&self) -> u32 {
        self.total_multiplicity() - 1
    }

    /// `F = Π (y − γ_j(x))^{n_j}` as a series.
    pub fn product(&self, order: u32) -> BiSeries {
        let y = BiSeries::y(order);
        let mut acc = BiSeries::constant(ONE, order);
        for c in &self.curves {
            let lin = &y - &BiSeries::from_poly_x(&c.gamma, order);
            acc = &acc * &lin.pow(c.multiplicity);
        }
        acc
    }

    /// Fixed points on the fiber over `x`, with multiplicities.
    pub fn points_at(&self, x: C64) -> Vec<(C64, u32)> {
        self.curves
            .iter()
            .map(|c| (c.gamma.eval(x), c.multiplicity))
            .collect()
    }

    /// `F(x, y)` evaluated directly from the factored form.
    pub fn eval(&self, x: C64, y: C64) -> C64 {
        self.curves.iter().fold(ONE, |acc, c| {
            acc * crate::num::cpowi(y - c.gamma.eval(x), c.multiplicity)
        })
    }

    /// Largest degree among the curve polynomials.
    pub fn max_degree(&self) -> usize {
        self.curves
            .iter()
            .filter_map(|c| c.gamma.degree())
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: u32 = 12;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn inverse_of_identity() {
        let y = BiSeries::y(D);
        assert_eq!(y.inverse_y().unwrap(), y);
    }

    #[test]
    fn inverse_of_y_plus_y2_is_catalan() {
        let f = BiSeries::from_terms(D, [((0, 1), ONE), ((0, 2), ONE)]);
        let g = f.inverse_y().unwrap();
        // Lagrange inversion: coefficient of y^n is (−1)^{n−1} C_{n−1}
        let mut catalan = 1.0;
        for n in 1..=D {
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            assert!((g.get(0, n) - c(sign * catalan)).norm() < 1e-9, "n={n}");
            let m = (n - 1) as f64;
            catalan = catalan * 2.0 * (2.0 * m + 1.0) / (m + 2.0);
        }
    }

    #[test]
    fn inverse_of_y_plus_xy() {
        let f = BiSeries::from_terms(D, [((0, 1), ONE), ((1, 1), ONE)]);
        let g = f.inverse_y().unwrap();
        for i in 0..D {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            assert!((g.get(i, 1) - c(sign)).norm() < 1e-12);
        }
        assert_eq!(g.terms().count(), D as usize);
    }

    #[test]
    fn inverse_rejects_bad_linear_term() {
        let f = BiSeries::from_terms(D, [((0, 1), c(2.0))]);
        assert!(f.inverse_y().is_err());
    }

    #[test]
    fn lie_exponential_of_y_squared_is_mobius() {
        // exp(y²∂y)(y) = y/(1 − y)
        let h = BiSeries::from_terms(D, [((0, 2), ONE)]);
        let e = BiSeries::y(D).lie_exp(&h);
        for n in 1..=D {
            assert!((e.get(0, n) - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn weierstrass_division_recovers_factor() {
        let curves = FixedCurveSet::from_coeffs(&[(&[ZERO], 1), (&[ZERO, ONE], 1)]).unwrap();
        let f = curves.product(D);
        let u = BiSeries::from_terms(D, [((0, 0), ONE), ((1, 0), c(0.5)), ((0, 1), c(-2.0))]);
        let s = &(&u * &f) + &BiSeries::from_terms(D, [((3, 0), ONE), ((1, 1), c(2.0))]);
        let (q, r) = s.weierstrass_div(&f, 2).unwrap();
        let back = &(&q * &f) + &r;
        assert!((&back - &s).max_abs() < 1e-13);
        assert!(r.terms().all(|((_, j), _)| j < 2));
        assert!((&q - &u).max_abs() < 1e-13);
    }

    #[test]
    fn adic_order_of_a_power() {
        let curves = FixedCurveSet::from_coeffs(&[(&[ZERO], 2)]).unwrap();
        let f = curves.product(D);
        let s = &f.pow(3) * &BiSeries::from_terms(D, [((0, 0), ONE), ((1, 0), ONE)]);
        assert_eq!(s.adic_order(&f, 2, 6).unwrap(), 3);
    }

    #[test]
    fn composition_matches_evaluation() {
        let f = BiSeries::from_terms(D, [((0, 1), ONE), ((1, 2), c(0.3)), ((0, 3), c(-1.0))]);
        let g = BiSeries::from_terms(D, [((0, 1), ONE), ((1, 0), c(0.2)), ((0, 2), c(0.5))]);
        let h = f.compose_y(&g).unwrap();
        let (x, y) = (C64::new(0.05, 0.01), C64::new(-0.04, 0.03));
        let direct = f.eval(x, g.eval(x, y));
        assert!((h.eval(x, y) - direct).norm() < 1e-12);
    }

    #[test]
    fn curve_set_validation() {
        assert!(FixedCurveSet::from_coeffs(&[(&[ZERO, ONE], 1)]).is_err());
        assert!(FixedCurveSet::from_coeffs(&[(&[ONE], 2)]).is_err());
        assert!(FixedCurveSet::from_coeffs(&[(&[ZERO, ONE], 1), (&[ZERO, ONE], 1)]).is_err());
        let s = FixedCurveSet::from_coeffs(&[(&[ZERO], 1), (&[ZERO, ONE], 2)]).unwrap();
        assert_eq!(s.nu(), 2);
    }
}
