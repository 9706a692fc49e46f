//! File-based front end to `unfold-core`: problem files in, CSV/JSON/SVG out.

pub mod commands;
pub mod error;
pub mod output;
pub mod problem;
pub mod selftest;

pub use commands::{Ray, Settings};
pub use error::CliError;
pub use problem::ProblemFile;
