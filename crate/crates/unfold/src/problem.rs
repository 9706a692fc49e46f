//! Problem files: a JSON description of an unfolding and run options.

use std::path::Path;

use serde::{Deserialize, Serialize};

use unfold_core::algebra::{BiSeries, ComplexPoly, FixedCurve, FixedCurveSet, Var, DEFAULT_ORDER};
use unfold_core::fatou::UnfoldingMap;
use unfold_core::splitting::{RadiiConfig, VectorFieldUnfolding};
use unfold_core::C64;

use crate::error::CliError;

pub const SCHEMA: &str = "unfold/1";

/// `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complex(pub f64, pub f64);

impl From<Complex> for C64 {
    fn from(c: Complex) -> C64 {
        C64::new(c.0, c.1)
    }
}

impl From<C64> for Complex {
    fn from(c: C64) -> Complex {
        Complex(c.re, c.im)
    }
}

/// Coefficient `c` of `x^i y^j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub i: u32,
    pub j: u32,
    pub c: Complex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Curve {
    /// Coefficients of `γ(x)` in increasing powers of `x`.
    pub gamma: Vec<Complex>,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalFormSpec {
    pub unit: Vec<Term>,
    pub curves: Vec<Curve>,
    #[serde(default)]
    pub x_exponent: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    /// `y∘φ = exp(X)(y) + perturbation`, perturbation in `(F²)`.
    #[default]
    TimeOne,
    /// `y∘φ = y + unit·F + perturbation`, perturbation in `(F)`.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub delta: f64,
    pub epsilon: f64,
}

impl Default for Domain {
    fn default() -> Self {
        let r = RadiiConfig::default();
        Domain {
            delta: r.delta,
            epsilon: r.epsilon,
        }
    }
}

/// Command-specific settings; flags override them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Parameter value for single-fiber commands.
    pub x: Option<Complex>,
    /// Direction `λ` for compact-like polynomial fields.
    pub lambda: Option<Complex>,
    /// Rotation `μ` of the field in portraits.
    pub mu: Option<Complex>,
    /// Normal-form order `k`.
    pub k: Option<usize>,
    /// Flatness line `y = x·w`.
    pub w: Option<Complex>,
    /// `σ(x, y)` for the conjugacy check, `η = σ∘φ∘σ⁻¹`.
    pub conjugator: Option<Vec<Term>>,
    /// Horn-map sample count and stored modes.
    pub samples: Option<usize>,
    pub modes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema: String,
    pub normal_form: NormalFormSpec,
    #[serde(default)]
    pub form: Form,
    #[serde(default)]
    pub perturbation: Vec<Term>,
    #[serde(default = "default_order")]
    pub order: u32,
    #[serde(default)]
    pub domain: Domain,
    #[serde(default)]
    pub options: Options,
}

fn default_order() -> u32 {
    DEFAULT_ORDER
}

fn schema_err(location: impl Into<String>, message: impl ToString) -> CliError {
    CliError::Schema {
        location: location.into(),
        message: message.to_string(),
    }
}

pub fn series(terms: &[Term], order: u32) -> BiSeries {
    BiSeries::from_terms(order, terms.iter().map(|t| ((t.i, t.j), C64::from(t.c))))
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::parse(&text)
    }

    /// Parses and validates; every failure names its location.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let p: ProblemFile = serde_json::from_str(text)
            .map_err(|e| schema_err(format!("line {}, column {}", e.line(), e.column()), e))?;
        if p.schema != SCHEMA {
            return Err(schema_err(
                "schema",
                format!("expected \"{SCHEMA}\", found \"{}\"", p.schema),
            ));
        }
        if !(p.domain.delta > 0.0 && p.domain.epsilon > 0.0) {
            return Err(schema_err("domain", "delta and epsilon must be positive"));
        }
        for (k, c) in p.normal_form.curves.iter().enumerate() {
            if c.gamma.first().is_some_and(|g| g.0 != 0.0 || g.1 != 0.0) {
                return Err(schema_err(
                    format!("normal_form.curves[{k}].gamma"),
                    "γ(0) must be 0",
                ));
            }
            if c.multiplicity == 0 {
                return Err(schema_err(
                    format!("normal_form.curves[{k}].multiplicity"),
                    "must be positive",
                ));
            }
        }
        p.field()?;
        p.map()?;
        if let Some(sigma) = &p.options.conjugator {
            UnfoldingMap::conjugated(p.map()?, series(sigma, p.order))
                .map_err(|e| schema_err("options.conjugator", e))?;
        }
        Ok(p)
    }

    pub fn curves(&self) -> Result<FixedCurveSet, CliError> {
        let curves = self
            .normal_form
            .curves
            .iter()
            .map(|c| FixedCurve {
                gamma: ComplexPoly::new(c.gamma.iter().map(|&g| g.into()).collect(), Var::X),
                multiplicity: c.multiplicity,
            })
            .collect();
        FixedCurveSet::new(curves).map_err(|e| schema_err("normal_form.curves", e))
    }

    pub fn field(&self) -> Result<VectorFieldUnfolding, CliError> {
        let unit = series(&self.normal_form.unit, self.order);
        VectorFieldUnfolding::new(unit, self.curves()?, self.normal_form.x_exponent)
            .map_err(|e| schema_err("normal_form.unit", e))
    }

    pub fn map(&self) -> Result<UnfoldingMap, CliError> {
        let pert = series(&self.perturbation, self.order);
        let m = match self.form {
            Form::TimeOne => UnfoldingMap::time_one(self.field()?, pert, self.order),
            Form::Explicit => UnfoldingMap::explicit(
                series(&self.normal_form.unit, self.order),
                self.curves()?,
                pert,
                self.order,
            ),
        };
        m.map_err(|e| schema_err("perturbation", e))
    }

    /// `σ∘φ∘σ⁻¹` when a conjugator is given.
    pub fn conjugate(&self) -> Result<Option<UnfoldingMap>, CliError> {
        let Some(sigma) = &self.options.conjugator else {
            return Ok(None);
        };
        UnfoldingMap::conjugated(self.map()?, series(sigma, self.order))
            .map(Some)
            .map_err(|e| schema_err("options.conjugator", e))
    }

    pub fn radii(&self) -> RadiiConfig {
        RadiiConfig {
            delta: self.domain.delta,
            epsilon: self.domain.epsilon,
        }
    }
}
