use std::fmt;
use std::io;

use serde::Serialize;

/// Failure of a command, mapped to an exit code by [`CliError::exit_code`].
#[derive(Debug)]
pub enum CliError {
    /// The problem file or a flag does not match the schema.
    Schema {
        location: String,
        message: String,
    },
    /// A numerical routine failed on valid input.
    Numerical {
        command: &'static str,
        source: unfold_core::Error,
    },
    Io {
        path: String,
        source: io::Error,
    },
    /// At least one acceptance criterion failed.
    SelftestFailed {
        failed: Vec<&'static str>,
    },
}

impl CliError {
    pub fn numerical(command: &'static str) -> impl FnOnce(unfold_core::Error) -> CliError {
        move |source| CliError::Numerical { command, source }
    }

    pub fn flag(name: &str, message: impl fmt::Display) -> CliError {
        CliError::Schema {
            location: format!("--{name}"),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SelftestFailed { .. } => 1,
            CliError::Schema { .. } => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }

    /// Machine-readable description of a numerical failure.
    pub fn diagnostic(&self) -> Option<Diagnostic> {
        let CliError::Numerical { command, source } = self else {
            return None;
        };
        use unfold_core::Error as E;
        let (kind, residual) = match source {
            E::InvalidInput(_) => ("invalid_input", None),
            E::NoConvergence { residual, .. } => ("no_convergence", Some(*residual)),
            E::MultiplicityMismatch { .. } => ("multiplicity_mismatch", None),
            E::TruncationTooLow { .. } => ("truncation_too_low", None),
            E::RadiiTooLarge { .. } => ("radii_too_large", None),
            E::Unlocated { .. } => ("unlocated", None),
            E::OrbitEscaped { .. } => ("orbit_escaped", None),
            E::BudgetExhausted { residual } => ("budget_exhausted", Some(*residual)),
            E::NearSingular { .. } => ("near_singular", None),
            E::DegenerateCircle { .. } => ("degenerate_circle", None),
        };
        Some(Diagnostic {
            command,
            kind,
            message: source.to_string(),
            residual,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostic {
    pub command: &'static str,
    pub kind: &'static str,
    pub message: String,
    pub residual: Option<f64>,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Schema { location, message } => {
                write!(f, "schema error at {location}: {message}")
            }
            CliError::Numerical { command, source } => write!(f, "{command}: {source}"),
            CliError::Io { path, source } => write!(f, "{path}: {source}"),
            CliError::SelftestFailed { failed } => {
                write!(f, "selftest failed: {}", failed.join(", "))
            }
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CliError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}
