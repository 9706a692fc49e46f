use std::f64::consts::PI;

use proptest::prelude::*;
use unfold_core::algebra::{BiSeries, FixedCurveSet};
use unfold_core::fatou::{
    k_normal_form, FatouConfig, FatouFiber, Petal, SectorRegion, UnfoldingMap,
};
use unfold_core::num::cis;
use unfold_core::splitting::VectorFieldUnfolding;
use unfold_core::{Error, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Time-one map of `(1 + 0.3y) y (y − x) ∂/∂y` plus `0.3 F²`.
fn two_point_map() -> UnfoldingMap {
    let order = 20;
    let curves = FixedCurveSet::from_coeffs(&[(&[ZERO], 1), (&[ZERO, ONE], 1)]).unwrap();
    let unit = BiSeries::from_terms(order, [((0, 0), ONE), ((0, 1), C64::new(0.3, 0.0))]);
    let field = VectorFieldUnfolding::new(unit, curves.clone(), 0).unwrap();
    let f = curves.product(order);
    UnfoldingMap::time_one(field, (&f * &f).scale(C64::new(0.3, 0.0)), order).unwrap()
}

fn fiber(x: C64, config: FatouConfig) -> FatouFiber {
    let map = two_point_map();
    let nf = k_normal_form(&map, config.k).unwrap();
    FatouFiber::new(&map, &nf, x, config).unwrap()
}

/// A point of the petal sector around the anchor.
fn petal_point(petal: &Petal, s: f64, t: f64) -> C64 {
    cis(petal.anchor.arg() + 0.8 * (t - 0.5)) * (petal.anchor.norm() * (0.2 + 0.7 * s))
}

fn skip(e: &Error) -> bool {
    matches!(
        e,
        Error::OrbitEscaped { .. } | Error::BudgetExhausted { .. } | Error::NearSingular { .. }
    )
}

#[test]
fn anchors_alternate_in_orientation() {
    for x in [ZERO, C64::new(0.02, 0.0), cis(1.0) * 0.03] {
        let fib = fiber(x, FatouConfig::default());
        let mut petals = fib.petals().to_vec();
        assert_eq!(petals.len(), 2 * two_point_map().nu() as usize);
        petals.sort_by(|a, b| a.anchor.arg().total_cmp(&b.anchor.arg()));
        for (a, b) in petals.iter().zip(petals.iter().cycle().skip(1)) {
            assert_eq!(a.orientation, -b.orientation);
        }
    }
}

/// `|Δ| / |F|^k` stays bounded as `q` approaches a fixed point: `φ` and
/// `exp(X_k)` agree modulo `F^{k+1}`.
#[test]
fn delta_is_flat_along_the_fixed_curve() {
    let x = C64::new(0.02, 0.0);
    let config = FatouConfig {
        k: 2,
        ..FatouConfig::default()
    };
    let fib = fiber(x, config);
    let curves = two_point_map().curves().clone();
    for dir in [cis(2.0), cis(-2.5)] {
        let ratios: Vec<f64> = (0..7)
            .map(|m| {
                let q = dir * (0.1 * 0.5f64.powi(m));
                let f = curves
                    .curves()
                    .iter()
                    .fold(ONE, |acc, cv| acc * (q - cv.gamma.eval(x)));
                fib.delta(q).unwrap().norm() / f.norm().powi(config.k as i32)
            })
            .collect();
        let top = ratios.iter().cloned().fold(0.0, f64::max);
        assert!(top.is_finite() && top > 0.0);
        assert!(top <= 10.0 * ratios[0], "{ratios:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn abel_residual_is_within_the_reported_bound(
        j in 0usize..2,
        s in 0.0f64..1.0,
        t in 0.0f64..1.0,
    ) {
        let fib = fiber(C64::new(0.02, 0.0), FatouConfig::default());
        let y = petal_point(&fib.petals()[j], s, t);
        let (a, b) = match (fib.psi(j, y), fib.map().apply(y).and_then(|fy| fib.psi(j, fy))) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                prop_assert!(skip(&e), "{}", e);
                return Ok(());
            }
        };
        let abel = (b.value - a.value - 1.0).norm();
        prop_assert!(abel <= a.residual + b.residual + 1e-12 * (1.0 + a.value.norm()),
            "{abel} vs {} + {}", a.residual, b.residual);
    }

    /// A tighter tail tolerance moves ψ by less than the looser run's
    /// reported residual.
    #[test]
    fn reported_tail_bounds_are_honest(
        j in 0usize..2,
        s in 0.0f64..1.0,
        t in 0.0f64..1.0,
    ) {
        let x = C64::new(0.02, 0.0);
        let loose = fiber(x, FatouConfig { tol: 1e-7, ..FatouConfig::default() });
        let tight = fiber(x, FatouConfig { tol: 1e-14, ..FatouConfig::default() });
        let y = petal_point(&loose.petals()[j], s, t);
        match (loose.psi(j, y), tight.psi(j, y)) {
            (Ok(a), Ok(b)) => {
                prop_assert!((a.value - b.value).norm() <= a.residual + b.residual + 1e-12,
                    "{} vs {}", (a.value - b.value).norm(), a.residual);
            }
            (Err(e), _) | (_, Err(e)) => prop_assert!(skip(&e), "{}", e),
        }
    }

    /// Forward orbits whose normal-form Fatou image starts in `W_{θ,M}` and
    /// whose steps stay within `sin θ / 2` of a unit translation never leave it.
    #[test]
    fn forward_orbits_stay_in_the_sector(
        s in 0.0f64..1.0,
        t in 0.0f64..1.0,
    ) {
        let fib = fiber(C64::new(0.02, 0.0), FatouConfig::default());
        let petal = *fib.petals().iter().find(|p| p.orientation == 1).unwrap();
        let w = SectorRegion { theta: PI / 4.0, m: 2.0 };
        let bound = (PI / 4.0).sin() / 2.0;
        let mut q = petal_point(&petal, s, t);
        let mut z = fib.normal().segment(petal.anchor, q).unwrap();
        prop_assume!(w.contains(z));
        for _ in 0..300 {
            let d = fib.delta(q).unwrap();
            if d.norm() > bound {
                break;
            }
            z += 1.0 + d;
            q = fib.map().apply(q).unwrap();
            prop_assert!(w.contains(z), "left W at {z}");
        }
    }
}
