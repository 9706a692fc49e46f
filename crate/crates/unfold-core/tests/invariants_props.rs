use std::f64::consts::PI;

use proptest::prelude::*;
use unfold_core::algebra::{BiSeries, FixedCurveSet};
use unfold_core::fatou::{k_normal_form, FatouConfig, FatouFiber, UnfoldingMap};
use unfold_core::invariants::{
    conjugacy_translation, homogeneous, horn_maps, zeta, HornCoeff, HornConfig, HornMap,
    WitnessStatus,
};
use unfold_core::num::cis;
use unfold_core::splitting::VectorFieldUnfolding;
use unfold_core::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn two_point_map() -> UnfoldingMap {
    let order = 20;
    let curves = FixedCurveSet::from_coeffs(&[(&[ZERO], 1), (&[ZERO, ONE], 1)]).unwrap();
    let unit = BiSeries::from_terms(order, [((0, 0), ONE), ((0, 1), C64::new(0.3, 0.0))]);
    let field = VectorFieldUnfolding::new(unit, curves.clone(), 0).unwrap();
    let f = curves.product(order);
    UnfoldingMap::time_one(field, (&f * &f).scale(C64::new(0.3, 0.0)), order).unwrap()
}

fn synthetic(values: &[Vec<C64>]) -> Vec<HornMap> {
    values
        .iter()
        .enumerate()
        .map(|(j, vals)| HornMap {
            petal: j,
            upsilon: if j % 2 == 0 { -1 } else { 1 },
            height: 1.0,
            coeffs: vals
                .iter()
                .enumerate()
                .map(|(l, &value)| HornCoeff {
                    l,
                    value,
                    uncertainty: 0.0,
                    reliable: true,
                })
                .collect(),
            noise_floor: 0.0,
            periodicity_residual: 0.0,
        })
        .collect()
}

/// Conjugating by the translation `z ↦ z + c`.
fn translate(maps: &[HornMap], c: C64) -> Vec<HornMap> {
    maps.iter()
        .map(|m| {
            let mut out = m.clone();
            for k in out.coeffs.iter_mut().filter(|k| k.l > 0) {
                k.value *= (C64::new(0.0, 2.0 * PI * m.upsilon as f64 * k.l as f64) * c).exp();
            }
            out
        })
        .collect()
}

fn coeff() -> impl Strategy<Value = C64> {
    (0.1f64..2.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, a)| cis(a) * r)
}

fn system() -> impl Strategy<Value = Vec<Vec<C64>>> {
    (1usize..=2, 2usize..=4).prop_flat_map(|(nu, modes)| {
        proptest::collection::vec(proptest::collection::vec(coeff(), modes), 2 * nu)
    })
}

fn same_mod_one(a: C64, b: C64) -> bool {
    let d = a - b;
    (d.re - d.re.round()).abs() < 1e-9 && d.im.abs() < 1e-9
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn translation_witnesses_compose(
        values in system(),
        c1 in (-0.5f64..0.5, -0.05f64..0.05),
        c2 in (-0.5f64..0.5, -0.05f64..0.05),
    ) {
        let (c1, c2) = (C64::new(c1.0, c1.1), C64::new(c2.0, c2.1));
        let phi = synthetic(&values);
        let eta = translate(&phi, c1);
        let chi = translate(&eta, c2);
        let ab = conjugacy_translation(ZERO, &phi, &eta, 1e-9);
        let bc = conjugacy_translation(ZERO, &eta, &chi, 1e-9);
        let ac = conjugacy_translation(ZERO, &phi, &chi, 1e-9);
        for w in [&ab, &bc, &ac] {
            prop_assert_eq!(w.status, WitnessStatus::Consistent);
        }
        prop_assert!(same_mod_one(ab.c.unwrap() + bc.c.unwrap(), ac.c.unwrap()));
        prop_assert!(same_mod_one(ab.c.unwrap(), c1));
    }

    #[test]
    fn homogeneous_constants_equal_zeta(values in system()) {
        let maps = synthetic(&values);
        let z = maps.iter().map(|m| m.coeffs[0].value).sum::<C64>() / maps.len() as f64;
        for m in homogeneous(&maps, z) {
            prop_assert!((m.coeffs[0].value - z).norm() < 1e-12);
        }
    }
}

#[test]
fn computed_horn_maps_are_periodic_and_match_zeta() {
    let map = two_point_map();
    let config = HornConfig::default();
    let nf = k_normal_form(&map, config.fatou.k).unwrap();
    for x in [C64::new(0.02, 0.0), cis(0.3) * 0.02] {
        let fib = FatouFiber::new(&map, &nf, x, FatouConfig::default()).unwrap();
        let maps = horn_maps(&fib, &config).unwrap();
        assert_eq!(maps.len(), 2);
        for m in &maps {
            assert!(m.periodicity_residual < 1e-8, "{}", m.periodicity_residual);
        }
        let z = zeta(&fib, Some(&maps));
        assert!(z.discrepancy < 1e-6, "{}", z.discrepancy);
    }
}
