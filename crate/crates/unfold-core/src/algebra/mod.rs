//! Complex polynomials, their roots and residues, and truncated bivariate
//! power series in `(x, y)`.

mod poly;
mod roots;
mod series;

pub use poly::{ComplexPoly, Var};
pub use roots::{eval_partial_fractions, partial_fractions, residue, roots, PartialFraction, Root};
pub use series::{BiSeries, FixedCurve, FixedCurveSet};

/// Default tolerance for algebraic operations.
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Default tolerance for dynamical operations.
pub const DYNAMICAL_TOL: f64 = 1e-8;
/// Default total-degree truncation of bivariate series.
pub const DEFAULT_ORDER: u32 = 20;
