//! Analytic invariants read off the Fatou coordinates.

mod asymptotics;
mod cauchy_heine;
mod conjugacy;
mod flatness;
mod horn;
mod zeta;

pub use asymptotics::{lavaurs_asymptotics, richardson, LavaursCoefficients};
pub use cauchy_heine::{cauchy_heine, CauchyHeine};
pub use conjugacy::{conjugacy_translation, ConjugacyWitness, WitnessStatus};
pub use flatness::{
    fit_exponent, fit_flatness, line_difference, ray_differences, ExponentFit, FlatnessFit,
    FlatnessSample, RaySamples, Realization, FLATNESS_FLOOR,
};
pub use horn::{
    constant_sum, horn_map_on, horn_maps, overlap_height, HornCoeff, HornConfig, HornMap,
    RELIABLE_REL,
};
pub use zeta::{checked_zeta, homogeneous, homogeneous_offsets, residue_sum, zeta, ZetaValue};
