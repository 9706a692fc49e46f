//! Parabolic maps, their normal forms and Fatou coordinates.

mod coordinate;
mod map;
mod normal;
mod normal_fatou;
mod sector;
pub mod taylor;

pub use coordinate::{fatou_orbit, petals, FatouConfig, FatouFiber, FatouValue, OrbitSum, Petal};
pub use map::{orbit, FiberMap, MapForm, UnfoldingMap};
pub use normal::{generator_unit, infinitesimal_generator, k_normal_form, NormalForm, DEFAULT_K};
pub use normal_fatou::{gl_segment, NormalFatou};
pub use sector::SectorRegion;
