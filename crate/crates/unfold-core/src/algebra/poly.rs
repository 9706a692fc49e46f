use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::num::{C64, ONE, ZERO};

/// Name of the variable a polynomial is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Var {
    #[default]
    W,
    X,
    Y,
}

/// Dense univariate polynomial with complex coefficients in ascending degree.
///
/// The trailing coefficient is nonzero unless the polynomial is zero, in
/// which case `coeffs` is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoly {
    coeffs: Vec<C64>,
    var: Var,
}

impl ComplexPoly {
    pub fn new(coeffs: Vec<C64>, var: Var) -> Self {
        let mut p = ComplexPoly { coeffs, var };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64], var: Var) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect(), var)
    }

    pub fn zero(var: Var) -> Self {
        ComplexPoly {
            coeffs: Vec::new(),
            var,
        }
    }

    pub fn constant(c: C64, var: Var) -> Self {
        Self::new(vec![c], var)
    }

    /// The monomial `w`.
    pub fn identity(var: Var) -> Self {
        Self::new(vec![ZERO, ONE], var)
    }

    /// `c · Π (w − r)^m`.
    pub fn from_roots(lead: C64, roots: &[(C64, usize)], var: Var) -> Self {
        let mut p = Self::constant(lead, var);
        for &(r, m) in roots {
            let lin = Self::new(vec![-r, ONE], var);
            for _ in 0..m {
                p = &p * &lin;
            }
        }
        p
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if *c == ZERO) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn eval(&self, w: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * w + c)
    }

    /// Value and first derivative at `w`.
    pub fn eval_d(&self, w: C64) -> (C64, C64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * w + p;
            p = p * w + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Self::new(coeffs, self.var)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect(), self.var)
    }

    /// Taylor coefficients at `a`: `p(a + h) = Σ t_k h^k`.
    pub fn taylor_at(&self, a: C64) -> Vec<C64> {
        let mut t = self.coeffs.clone();
        let n = t.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let next = t[j + 1];
                t[j] += a * next;
            }
        }
        t
    }

    /// `p(a + b·w)`.
    pub fn affine_substitute(&self, a: C64, b: C64) -> Self {
        let t = self.taylor_at(a);
        let mut bk = ONE;
        let coeffs = t
            .into_iter()
            .map(|c| {
                let v = c * bk;
                bk *= b;
                v
            })
            .collect();
        Self::new(coeffs, self.var)
    }

    /// Max-modulus coefficient norm.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        ComplexPoly::new(coeffs, self.var)
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect();
        ComplexPoly::new(coeffs, self.var)
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        if self.is_zero() || rhs.is_zero() {
            return ComplexPoly::zero(self.var);
        }
        let mut coeffs = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        ComplexPoly::new(coeffs, self.var)
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        self.scale(-ONE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> ComplexPoly {
        ComplexPoly::from_real(c, Var::W)
    }

    #[test]
    fn trims_trailing_zeros() {
        let q = p(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(q.degree(), Some(1));
        assert!(p(&[0.0]).is_zero());
        assert_eq!(p(&[]).degree(), None);
    }

    #[test]
    fn product_of_roots_expands() {
        let q = ComplexPoly::from_roots(ONE, &[(ZERO, 1), (ONE, 2)], Var::W);
        assert_eq!(q, p(&[0.0, 1.0, -2.0, 1.0]));
    }

    #[test]
    fn taylor_shift_matches_evaluation() {
        let q = p(&[1.0, -3.0, 0.5, 2.0]);
        let a = C64::new(0.7, -0.2);
        let t = ComplexPoly::new(q.taylor_at(a), Var::W);
        let h = C64::new(-0.3, 0.4);
        assert!((t.eval(h) - q.eval(a + h)).norm() < 1e-13);
    }

    #[test]
    fn derivative_and_eval_d_agree() {
        let q = p(&[1.0, -3.0, 0.5, 2.0]);
        let w = C64::new(0.3, 1.1);
        let (v, d) = q.eval_d(w);
        assert!((v - q.eval(w)).norm() < 1e-14);
        assert!((d - q.derivative().eval(w)).norm() < 1e-13);
    }

    #[test]
    fn affine_substitution() {
        let q = p(&[0.0, 0.0, 1.0]);
        let s = q.affine_substitute(ONE, C64::new(2.0, 0.0));
        assert_eq!(s, p(&[1.0, 4.0, 4.0]));
    }
}
