use serde::{Deserialize, Serialize};

use crate::num::{tan, C64};

/// `W_{θ,M} = {Re z > 0} ∪ {|Im z| + tan θ · Re z > M}`, the shape of the
/// image of an attracting petal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorRegion {
    pub theta: f64,
    pub m: f64,
}

impl SectorRegion {
    pub fn contains(&self, z: C64) -> bool {
        z.re > 0.0 || z.im.abs() + tan(self.theta) * z.re - self.m > 0.0
    }

    /// Image under `z ↦ −z`, for repelling petals.
    pub fn contains_reflected(&self, z: C64) -> bool {
        self.contains(-z)
    }
}
