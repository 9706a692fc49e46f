use serde::{Deserialize, Serialize};

use super::{integrate, FlowOptions, Termination};
use crate::directions::{aleph_star, MultiDirection};
use crate::error::{Error, Result};
use crate::num::C64;
use crate::splitting::{SplittingTree, VectorFieldUnfolding};

/// Where a trajectory of `Re(ℵ* X)` ends up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    /// Index of the fixed curve `y = γ_j(x)`.
    Singular(usize),
    /// Left the fiber `|y| ≤ ε`.
    Exterior,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointClass {
    pub alpha: Limit,
    pub omega: Limit,
}

/// α- and ω-limits of the trajectory of `Re(ℵ* X)` through `(x, y)` inside
/// the fiber `{x} × B(0, ε)`.
pub fn classify_point(
    aleph: &MultiDirection,
    tree: &SplittingTree,
    field: &VectorFieldUnfolding,
    x: C64,
    y: C64,
    max_steps: usize,
) -> Result<PointClass> {
    let pts: alloc::vec::Vec<C64> = field
        .curves
        .points_at(x)
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    let opts = FlowOptions {
        max_steps,
        ..FlowOptions::default().with_singular(pts.clone())
    };
    if pts
        .iter()
        .any(|p| (y - *p).norm() <= 10.0 * opts.stop_radius)
    {
        return Err(Error::NearSingular { point: y });
    }
    let eps = tree.radii.epsilon;
    let f = |w: C64| {
        if w.norm() > eps {
            return None;
        }
        let a = aleph_star(aleph, tree, x, w).ok()?;
        Some(a * field.eval(x, w))
    };
    let label = |t: Termination| match t {
        Termination::ReachedSingularity(p) => {
            let j = pts
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    (*a.1 - p)
                        .norm()
                        .partial_cmp(&(*b.1 - p).norm())
                        .unwrap_or(core::cmp::Ordering::Equal)
                })
                .map(|(j, _)| j)
                .unwrap_or(0);
            Limit::Singular(j)
        }
        Termination::LeftDomain | Termination::EscapedToInfinity => Limit::Exterior,
        Termination::StepLimit => Limit::Indeterminate,
    };
    let fwd = integrate(
        f,
        y,
        &FlowOptions {
            record: false,
            ..opts.clone()
        },
    );
    let bwd = integrate(
        f,
        y,
        &FlowOptions {
            record: false,
            backward: true,
            ..opts
        },
    );
    Ok(PointClass {
        alpha: label(bwd.termination),
        omega: label(fwd.termination),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FixedCurveSet;
    use crate::directions::{build_aleph, direction_atlas, AdmissibleTuple};
    use crate::num::{ONE, ZERO};
    use crate::splitting::{build_splitting, RadiiConfig};

    #[test]
    fn imaginary_flow_of_a_double_point() {
        let curves = FixedCurveSet::from_coeffs(&[(&[ZERO], 2)]).unwrap();
        let field = VectorFieldUnfolding::with_constant_unit(ONE, curves).unwrap();
        let tree = build_splitting(
            &field,
            RadiiConfig {
                delta: 0.1,
                epsilon: 0.5,
            },
        )
        .unwrap();
        let atlas = direction_atlas(&tree).unwrap();
        let t = AdmissibleTuple::new(&atlas, alloc::vec::Vec::new()).unwrap();
        let m = build_aleph(&atlas, &t, ONE, 0).unwrap();
        // i y² has circles through 0 tangent to the imaginary axis; a small
        // one lies inside the disk and starts and ends at 0
        let c = classify_point(&m, &tree, &field, ZERO, C64::new(0.1, 0.1), 100_000).unwrap();
        assert_eq!(
            c,
            PointClass {
                alpha: Limit::Singular(0),
                omega: Limit::Singular(0)
            }
        );
        // a point on a circle that leaves the disk
        let c = classify_point(&m, &tree, &field, ZERO, C64::new(0.45, 0.0), 100_000).unwrap();
        assert_eq!((c.alpha, c.omega), (Limit::Singular(0), Limit::Singular(0)));
        let c = classify_point(&m, &tree, &field, ZERO, C64::new(0.0, 0.45), 100_000).unwrap();
        assert!(c.alpha == Limit::Exterior || c.omega == Limit::Exterior);
    }

    #[test]
    fn rejects_points_on_the_fixed_set() {
        let curves = FixedCurveSet::from_coeffs(&[(&[ZERO], 2)]).unwrap();
        let field = VectorFieldUnfolding::with_constant_unit(ONE, curves).unwrap();
        let tree = build_splitting(&field, RadiiConfig::default()).unwrap();
        let atlas = direction_atlas(&tree).unwrap();
        let t = AdmissibleTuple::new(&atlas, alloc::vec::Vec::new()).unwrap();
        let m = build_aleph(&atlas, &t, ONE, 0).unwrap();
        assert!(classify_point(&m, &tree, &field, ZERO, ZERO, 10).is_err());
    }
}
