use std::f64::consts::TAU;

use proptest::prelude::*;
use unfold_core::algebra::FixedCurveSet;
use unfold_core::splitting::{
    build_splitting, locate, NodeKind, RadiiConfig, SplitNode, VectorFieldUnfolding,
};
use unfold_core::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn three_curve_field() -> VectorFieldUnfolding {
    let curves =
        FixedCurveSet::from_coeffs(&[(&[ZERO], 1), (&[ZERO, ZERO, ONE], 1), (&[ZERO, ONE], 1)])
            .unwrap();
    VectorFieldUnfolding::with_constant_unit(ONE, curves).unwrap()
}

fn check_ladder(n: &SplitNode) {
    match n.kind {
        NodeKind::Exterior if n.children.is_empty() => assert_eq!(n.iota, n.e),
        NodeKind::Exterior => {
            let c = &n.children[0];
            assert_eq!(n.iota, n.e + n.nu);
            assert_eq!(c.e, n.iota);
            assert_eq!(c.iota, c.e);
            for child in &c.children {
                assert_eq!(child.e, c.e);
            }
        }
        NodeKind::CompactLike => {
            let p = n.poly_field.as_ref().unwrap();
            assert_eq!(p.degree(), Some(n.nu as usize + 1));
        }
    }
    for c in &n.children {
        assert!(c.e >= n.e);
        check_ladder(c);
    }
}

#[test]
fn exponent_ladder_on_the_three_curve_example() {
    let tree = build_splitting(&three_curve_field(), RadiiConfig::default()).unwrap();
    check_ladder(&tree.root);
    for c in tree.compact_nodes() {
        assert!(c.e >= tree.nu0);
    }
}

#[test]
fn locate_partitions_random_samples() {
    use rand::{Rng, SeedableRng};
    let radii = RadiiConfig {
        delta: 0.05,
        epsilon: 0.5,
    };
    let tree = build_splitting(&three_curve_field(), radii).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut kinds = std::collections::BTreeSet::new();
    for _ in 0..1000 {
        let x = C64::from_polar(rng.gen_range(1e-4..radii.delta), rng.gen_range(0.0..TAU));
        // log-uniform radius so that small scales are visited
        let r = radii.epsilon * 10f64.powf(-rng.gen_range(0.0..4.0));
        let y = C64::from_polar(r, rng.gen_range(0.0..TAU));
        let got = locate(&tree, x, y).unwrap();
        let back = got.node.coord.to_y(x, got.t);
        assert!((back - y).norm() < 1e-9 * (1.0 + y.norm()));
        kinds.insert((got.node.beta.len(), got.node.kind == NodeKind::CompactLike));
    }
    assert!(
        kinds.len() >= 4,
        "samples should reach several depths: {kinds:?}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn poly_field_roots_are_the_slopes(
        slopes in proptest::collection::vec(-3i32..=3, 2..5),
        extra in 0u32..2,
    ) {
        let mut seen = std::collections::BTreeSet::new();
        let mut curves = Vec::new();
        for (k, s) in slopes.iter().enumerate() {
            // distinct curves: slope s plus a k-dependent quadratic term
            if !seen.insert((*s, k)) {
                continue;
            }
            let g = vec![ZERO, C64::new(*s as f64, 0.0), C64::new(k as f64, 0.0)];
            curves.push((g, 1 + if k == 0 { extra } else { 0 }));
        }
        let refs: Vec<(&[C64], u32)> = curves.iter().map(|(g, m)| (g.as_slice(), *m)).collect();
        let set = FixedCurveSet::from_coeffs(&refs).unwrap();
        let field = VectorFieldUnfolding::with_constant_unit(ONE, set).unwrap();
        let tree = build_splitting(&field, RadiiConfig { delta: 0.01, epsilon: 0.5 }).unwrap();
        check_ladder(&tree.root);
        let c0 = &tree.root.children[0];
        let p = c0.poly_field.as_ref().unwrap();
        for (z, m) in c0.slopes() {
            let t = p.taylor_at(z);
            for c in t.iter().take(m as usize) {
                prop_assert!(c.norm() < 1e-9);
            }
            prop_assert!(t[m as usize].norm() > 1e-9);
        }
    }
}
