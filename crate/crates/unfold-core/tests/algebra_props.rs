use proptest::prelude::*;
use unfold_core::algebra::{
    partial_fractions, residue, roots, BiSeries, ComplexPoly, Var, ALGEBRAIC_TOL,
};
use unfold_core::C64;

fn poly_strategy(max_deg: usize) -> impl Strategy<Value = ComplexPoly> {
    (2..=max_deg)
        .prop_flat_map(|d| proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), d + 1))
        .prop_filter_map("leading coefficient too small", |c| {
            let coeffs: Vec<C64> = c.into_iter().map(|(a, b)| C64::new(a, b)).collect();
            (coeffs.last().unwrap().norm() > 0.1).then(|| ComplexPoly::new(coeffs, Var::W))
        })
}

fn eval_terms(terms: &[unfold_core::algebra::PartialFraction], w: C64) -> C64 {
    terms
        .iter()
        .map(|t| t.coeff / (w - t.root).powi(t.order as i32))
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residues_sum_to_zero(p in poly_strategy(6)) {
        let rs = roots(&p, ALGEBRAIC_TOL).unwrap();
        let total: C64 = rs
            .iter()
            .map(|r| residue(&p, r.value, r.multiplicity, ALGEBRAIC_TOL).unwrap())
            .sum();
        let scale: f64 = rs
            .iter()
            .map(|r| residue(&p, r.value, r.multiplicity, ALGEBRAIC_TOL).unwrap().norm())
            .fold(1.0, f64::max);
        prop_assert!(total.norm() < 1e-10 * scale, "sum {total}");
    }

    #[test]
    fn partial_fractions_round_trip(
        p in poly_strategy(6),
        ws in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 20),
    ) {
        let pf = partial_fractions(&p, ALGEBRAIC_TOL).unwrap();
        for (a, b) in ws {
            let w = C64::new(a, b);
            let exact = 1.0 / p.eval(w);
            if !exact.is_finite() || exact.norm() > 1e6 {
                continue;
            }
            let got = eval_terms(&pf, w);
            prop_assert!((got - exact).norm() <= 1e-9 * exact.norm().max(1e-3));
        }
    }

    #[test]
    fn series_inversion_is_an_involution(
        c in proptest::collection::vec(-1.0f64..1.0, 5),
    ) {
        let d = 10;
        let f = BiSeries::from_terms(d, [
            ((0, 1), C64::new(1.0, 0.0)),
            ((0, 2), C64::new(c[0], 0.0)),
            ((1, 1), C64::new(c[1], 0.0)),
            ((0, 3), C64::new(c[2], c[3])),
            ((2, 1), C64::new(c[4], 0.0)),
        ]);
        let g = f.inverse_y().unwrap();
        let back = g.inverse_y().unwrap();
        prop_assert!((&back - &f).max_abs() < 1e-9);
        let id = f.compose_y(&g).unwrap();
        prop_assert!((&id - &BiSeries::y(d)).max_abs() < 1e-9);
    }
}
