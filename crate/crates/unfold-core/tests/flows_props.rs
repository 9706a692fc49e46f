use proptest::prelude::*;
use unfold_core::algebra::{ComplexPoly, Var};
use unfold_core::fatou::NormalFatou;
use unfold_core::flows::{
    circle_tangencies, detect_homoclinic, escape_radius, integrate, FlowOptions, Homoclinic,
};
use unfold_core::num::cis;
use unfold_core::{Error, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn from_roots(roots: &[C64]) -> ComplexPoly {
    let simple: Vec<(C64, usize)> = roots.iter().map(|&r| (r, 1)).collect();
    ComplexPoly::from_roots(c(1.0, 0.0), &simple, Var::W)
}

/// Two or three simple roots in the unit disk, pairwise at least 0.3 apart.
fn simple_roots() -> impl Strategy<Value = Vec<C64>> {
    proptest::collection::vec((0.0f64..1.0, 0.0f64..std::f64::consts::TAU), 2..=3)
        .prop_map(|v| v.into_iter().map(|(r, a)| cis(a) * r).collect::<Vec<_>>())
        .prop_filter("roots too close", |rs| {
            rs.iter()
                .enumerate()
                .all(|(i, a)| rs[i + 1..].iter().all(|b| (a - b).norm() > 0.3))
        })
}

/// Increments of the time form `∫ dw/P` between consecutive samples.
fn time_increments(nf: &NormalFatou, samples: &[(f64, C64)]) -> Vec<(f64, C64)> {
    samples
        .windows(2)
        .map(|w| (w[1].0 - w[0].0, nf.segment(w[0].1, w[1].1).unwrap()))
        .collect()
}

fn start_point(roots: &[C64], a: f64) -> C64 {
    let center = roots.iter().sum::<C64>() / roots.len() as f64;
    center + cis(a) * 1.7
}

fn trajectory(p: &ComplexPoly, mu: C64, start: C64, roots: &[C64]) -> Vec<(f64, C64)> {
    let opts = FlowOptions {
        max_steps: 400,
        escape_radius: Some(50.0),
        ..FlowOptions::default().with_singular(roots.to_vec())
    };
    let mut t = integrate(|w| Some(mu * p.eval(w)), start, &opts);
    // stay clear of the singular points, where the time form is large
    t.samples
        .retain(|s| roots.iter().all(|r| (s.1 - r).norm() > 0.05));
    t.samples
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn real_time_trajectories_advance_the_time_form(
        roots in simple_roots(),
        a in 0.0f64..std::f64::consts::TAU,
    ) {
        let p = from_roots(&roots);
        let nf = NormalFatou::new(p.clone()).unwrap();
        let samples = trajectory(&p, c(1.0, 0.0), start_point(&roots, a), &roots);
        for (dt, dpsi) in time_increments(&nf, &samples) {
            prop_assert!(dpsi.re > 0.0, "Re ψ decreased: {dpsi}");
            prop_assert!(dpsi.im.abs() < 1e-6 * (1.0 + dt), "Im ψ drifted: {dpsi}");
        }
    }

    #[test]
    fn rotated_trajectories_raise_im_psi(
        roots in simple_roots(),
        a in 0.0f64..std::f64::consts::TAU,
        arg_mu in 0.2f64..2.9,
    ) {
        let p = from_roots(&roots);
        let nf = NormalFatou::new(p.clone()).unwrap();
        let mu = cis(arg_mu);
        let samples = trajectory(&p, mu, start_point(&roots, a), &roots);
        for (dt, dpsi) in time_increments(&nf, &samples) {
            prop_assert!(dpsi.im > 0.0, "Im ψ decreased: {dpsi}");
            prop_assert!((dpsi - mu * dt).norm() < 1e-6 * (1.0 + dt));
        }
    }

    #[test]
    fn homoclinic_detection_is_mu_symmetric(
        roots in simple_roots(),
        arg_mu in 0.0f64..std::f64::consts::TAU,
    ) {
        let p = from_roots(&roots);
        let r = escape_radius(&p).unwrap();
        let mu = cis(arg_mu);
        let a = detect_homoclinic(&p, mu, r, 1e-3, None).unwrap();
        let b = detect_homoclinic(&p, -mu, r, 1e-3, None).unwrap();
        if a != Homoclinic::Indeterminate && b != Homoclinic::Indeterminate {
            prop_assert_eq!(a.is_found(), b.is_found());
        }
    }

    #[test]
    fn large_circles_carry_two_nu_convex_tangencies(
        roots in simple_roots(),
        arg_mu in 0.0f64..std::f64::consts::TAU,
        r in 20.0f64..40.0,
    ) {
        let p = from_roots(&roots);
        let nu = roots.len() - 1;
        let mu = cis(arg_mu);
        let res = (
            circle_tangencies(|w| Some(mu * p.eval(w)), r, true),
            circle_tangencies(|w| Some(mu * c(0.0, 1.0) * p.eval(w)), r, true),
        );
        match res {
            (Ok(t), Ok(u)) => {
                prop_assert_eq!(t.points.len(), 2 * nu);
                prop_assert!(t.all_convex());
                prop_assert!(t.alternates_with(&u));
            }
            (Err(Error::DegenerateCircle { .. }), _) | (_, Err(Error::DegenerateCircle { .. })) => {}
            (Err(e), _) | (_, Err(e)) => prop_assert!(false, "{e}"),
        }
    }
}
