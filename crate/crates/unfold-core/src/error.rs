use alloc::string::String;
use core::fmt;

use crate::num::C64;

pub type Result<T> = core::result::Result<T, Error>;

/// Failures of the numerical routines. Each variant carries enough context
/// to be turned into a diagnostic by the caller.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed input violating an operation precondition.
    InvalidInput(String),
    /// An iteration hit its cap without meeting its tolerance.
    NoConvergence { what: &'static str, residual: f64 },
    /// The stated multiplicity of a root disagrees with the polynomial.
    MultiplicityMismatch { root: C64, multiplicity: usize },
    /// Truncation order too small for the requested quantity.
    TruncationTooLow { needed: u32, have: u32 },
    /// The unit of a vector field vanishes inside a seed at the configured radii.
    RadiiTooLarge { depth: usize },
    /// A point lies outside every basic set of the splitting.
    Unlocated { x: C64, y: C64 },
    /// An orbit left the domain before its sum converged.
    OrbitEscaped { point: C64, steps: usize },
    /// The orbit budget ran out before the tail fell below tolerance.
    BudgetExhausted { residual: f64 },
    /// A path or sample came too close to a singular point.
    NearSingular { point: C64 },
    /// The tangency function is degenerate on the requested circle.
    DegenerateCircle { radius: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::NoConvergence { what, residual } => {
                write!(f, "{what} did not converge (residual {residual:e})")
            }
            Error::MultiplicityMismatch { root, multiplicity } => write!(
                f,
                "root {} + {}i does not have multiplicity {multiplicity}",
                root.re, root.im
            ),
            Error::TruncationTooLow { needed, have } => {
                write!(f, "truncation order {have} too low, need {needed}")
            }
            Error::RadiiTooLarge { depth } => {
                write!(
                    f,
                    "unit vanishes inside a seed at depth {depth}; use smaller radii"
                )
            }
            Error::Unlocated { x, y } => write!(
                f,
                "point ({} + {}i, {} + {}i) is outside every basic set",
                x.re, x.im, y.re, y.im
            ),
            Error::OrbitEscaped { point, steps } => write!(
                f,
                "orbit escaped at {} + {}i after {steps} steps",
                point.re, point.im
            ),
            Error::BudgetExhausted { residual } => {
                write!(f, "orbit budget exhausted (residual {residual:e})")
            }
            Error::NearSingular { point } => {
                write!(
                    f,
                    "too close to a singular point at {} + {}i",
                    point.re, point.im
                )
            }
            Error::DegenerateCircle { radius } => {
                write!(
                    f,
                    "tangency function degenerate on the circle of radius {radius}"
                )
            }
        }
    }
}

#[cfg(test)]
impl std::error::Error for Error {}
