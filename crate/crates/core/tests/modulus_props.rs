use morrey_core::modulus::{conf_square_bounds, hyperbolic_distance, theta, theta0, theta_for, ThetaCase, ThetaParams};
use morrey_core::{HalfSpacePoint, Params};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = HalfSpacePoint> {
    (-5.0f64..5.0, -2.0f64..1.0).prop_map(|(h, e)| HalfSpacePoint::new(&[h], 10f64.powf(e)).unwrap())
}

fn params() -> impl Strategy<Value = Params> {
    (1usize..4, -3.0f64..4.0, 0.2f64..3.0).prop_map(|(n, gamma, excess)| Params::new(n, gamma, n as f64 + excess).unwrap())
}

fn point_n(n: usize) -> impl Strategy<Value = HalfSpacePoint> {
    (prop::collection::vec(-5.0f64..5.0, n - 1), -2.0f64..1.0).prop_map(|(h, e)| HalfSpacePoint::new(&h, 10f64.powf(e)).unwrap())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #[test]
    fn symmetric_and_positive((params, x, y) in params().prop_flat_map(|p| (Just(p), point_n(p.n), point_n(p.n)))) {
        let v = theta_for(&params, &x, &y);
        prop_assert!(v > 0.0 || x == y);
        prop_assert!(close(v, theta_for(&params, &y, &x), 1e-12));
        prop_assert_eq!(theta_for(&params, &x, &x), 0.0);
    }

    #[test]
    fn homogeneous_of_degree_kappa(
        (params, x, y) in params().prop_flat_map(|p| (Just(p), point_n(p.n), point_n(p.n))),
        e in -1.0f64..1.0,
    ) {
        let t = 10f64.powf(e);
        let tp = params.theta_params();
        let lhs = theta(&tp, &x.scaled(t), &y.scaled(t));
        let rhs = t.powf(tp.kappa) * theta(&tp, &x, &y);
        prop_assert!(close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
    }

    #[test]
    fn horizontally_translation_invariant(
        (params, x, y, h) in params().prop_flat_map(|p| (Just(p), point_n(p.n), point_n(p.n), prop::collection::vec(-10.0f64..10.0, p.n - 1))),
    ) {
        let v = theta_for(&params, &x, &y);
        prop_assert!(close(theta_for(&params, &x.translated(&h), &y.translated(&h)), v, 1e-12));
    }

    /// Near the diagonal every branch reduces to `|x−y|^β · x_n^{κ−β}` up to
    /// bounded factors: `|x − y| ≤ x_n/2` keeps both heights comparable.
    #[test]
    fn near_diagonal_is_euclidean_power(params in params(), x in point(), a in 0.0f64..6.3, r in 0.01f64..0.5) {
        let x = HalfSpacePoint::new(&vec![x.horizontal()[0]; params.n - 1], x.height()).unwrap();
        let mut c = x.coords().to_vec();
        c[0] += r * x.height() * a.cos();
        if params.n > 1 {
            c[params.n - 1] += r * x.height() * a.sin();
        }
        let y = HalfSpacePoint::from_coords(c).unwrap();
        let tp = params.theta_params();
        let model = x.distance(&y).powf(tp.beta) * x.height().powf(tp.kappa - tp.beta);
        let ratio = theta(&tp, &x, &y) / model;
        let bound = 4f64.powf(tp.alpha.abs() + tp.beta.abs() + tp.kappa.abs() + 1.0);
        prop_assert!(ratio > 1.0 / bound && ratio < bound, "ratio {ratio}");
    }

    #[test]
    fn hyperbolic_triangle_inequality(x in point(), y in point(), z in point()) {
        let d = hyperbolic_distance(&x, &y);
        prop_assert!(d <= hyperbolic_distance(&x, &z) + hyperbolic_distance(&z, &y) + 1e-9 * d.max(1.0));
        prop_assert!(conf_square_bounds(&x, &y).holds());
    }

    #[test]
    fn log_sandwich(e in -8.0f64..8.0) {
        let t = 10f64.powf(e);
        let s = t.asinh();
        prop_assert!(t.ln_1p() <= s && s <= (2.0 * t).ln_1p());
    }
}

#[test]
fn vertical_geodesics_are_logarithmic() {
    for (a, b) in [(1.0, 2.0), (0.01, 10.0), (3.0, 0.5)] {
        let x = HalfSpacePoint::new(&[0.7], a).unwrap();
        let y = HalfSpacePoint::new(&[0.7], b).unwrap();
        let d = hyperbolic_distance(&x, &y);
        assert!((d - (b / a).ln().abs()).abs() < 1e-13, "{d}");
    }
}

#[test]
fn branches_are_selected_by_kappa() {
    let case = |n, g, p| Params::new(n, g, p).unwrap().theta_params().case();
    assert_eq!(case(2, 4.0, 3.0), ThetaCase::Negative);
    assert_eq!(case(2, 1.0, 3.0), ThetaCase::Logarithmic);
    assert_eq!(case(1, 0.0, 2.0), ThetaCase::Intermediate);
    assert_eq!(case(2, -2.0, 3.0), ThetaCase::Saturated);
}

#[test]
fn one_dimensional_modulus_matches_power_law() {
    // n = 1, γ = 0: β = κ = 1 − 1/p, so Θ = |x − y|^{1−1/p} whichever height is larger.
    for p in [1.5, 2.0, 3.0, 7.0] {
        let tp = Params::new(1, 0.0, p).unwrap().theta_params();
        assert_eq!(tp.case(), ThetaCase::Intermediate);
        for (a, b) in [(1.0, 5.0), (0.01, 0.02), (3.0, 100.0)] {
            let x = HalfSpacePoint::new(&[], a).unwrap();
            let y = HalfSpacePoint::new(&[], b).unwrap();
            let expected = (b - a).abs().powf(1.0 - 1.0 / p);
            assert!(close(theta(&tp, &x, &y), expected, 1e-13));
        }
    }
}

#[test]
fn compact_modulus_is_smaller_for_positive_kappa() {
    // κ > 0: Θ⁰ uses the larger height and the full modulus uses max(height, |x−y|).
    let tp = Params::new(2, 0.0, 3.0).unwrap().theta_params();
    let x = HalfSpacePoint::new(&[0.0], 0.1).unwrap();
    let y = HalfSpacePoint::new(&[4.0], 0.2).unwrap();
    assert!(theta0(tp.beta, tp.kappa, &x, &y) < theta(&tp, &x, &y));
    assert!(ThetaParams::new(0.0, 0.5, 0.1).is_err());
}
