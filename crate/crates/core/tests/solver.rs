use morrey_core::error::Error;
use morrey_core::grid::default_grading;
use morrey_core::modulus::theta_for;
use morrey_core::omega_star::{oned_exact, sandwich_report, solve};
use morrey_core::{BoxRegion, GridSpec, HalfSpacePoint, Params, Resolution, SolverConfig};

fn pt(h: &[f64], z: f64) -> HalfSpacePoint {
    HalfSpacePoint::new(h, z).unwrap()
}

#[test]
fn one_dimensional_estimates_converge_to_closed_form() {
    let params = Params::new(1, 0.5, 3.0).unwrap();
    let (a, b) = (1.0, 3.0);
    let exact = oned_exact(&params, a, b).unwrap();
    let errors: Vec<f64> = [64, 256, 1024]
        .into_iter()
        .map(|cells| {
            let grid = GridSpec::uniform(BoxRegion::new(vec![0.2], vec![10.0]).unwrap(), cells, 1.0).unwrap();
            let est = solve(&pt(&[], a), &pt(&[], b), &params, &grid, &SolverConfig::default_for(&params)).unwrap();
            assert!(est.converged);
            (est.value - exact).abs() / exact
        })
        .collect();
    assert!(errors[2] < errors[0] && errors[2] < 1e-2, "{errors:?}");
}

#[test]
fn two_dimensional_estimate_is_symmetric_and_pinned() {
    let params = Params::new(2, 0.0, 3.0).unwrap();
    let x = pt(&[0.0], 1.0);
    let y = pt(&[1.0], 1.0);
    let grid = GridSpec::around_pair(&x, &y, 32, default_grading(0.0)).unwrap();
    let cfg = SolverConfig::default_for(&params);
    let a = solve(&x, &y, &params, &grid, &cfg).unwrap();
    let b = solve(&y, &x, &params, &grid, &cfg).unwrap();
    assert_eq!(a.value, b.value);
    assert!(a.converged);
    assert!(a.energy_history.windows(2).all(|w| w[1] <= w[0]));
    let (lo, hi) = a.nodal_values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    assert!(lo >= -1e-9 && hi <= 1.0 + 1e-9, "minimiser leaves [0, 1]: {lo} {hi}");
    let ratio = a.value / theta_for(&params, &x, &y);
    assert!(ratio > 0.2 && ratio < 5.0, "{ratio}");
}

#[test]
fn larger_boxes_do_not_lower_the_modulus() {
    // Enlarging the domain enlarges the admissible class, so the minimal energy drops and ω̂ grows.
    let params = Params::new(2, 1.0, 3.0).unwrap();
    let x = pt(&[0.0], 0.5);
    let y = pt(&[0.5], 0.5);
    let cfg = SolverConfig::default_for(&params);
    let small = GridSpec::uniform(BoxRegion::new(vec![-1.0, 0.0], vec![1.5, 2.5]).unwrap(), 32, 1.0).unwrap();
    let large = GridSpec::uniform(BoxRegion::new(vec![-3.5, 0.0], vec![4.0, 7.5]).unwrap(), 96, 1.0).unwrap();
    let a = solve(&x, &y, &params, &small, &cfg).unwrap().value;
    let b = solve(&x, &y, &params, &large, &cfg).unwrap().value;
    assert!(b >= a * 0.99, "{a} vs {b}");
}

#[test]
fn rejects_bad_inputs() {
    let params = Params::new(2, 0.0, 3.0).unwrap();
    let grid = GridSpec::uniform(BoxRegion::new(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap(), 8, 1.0).unwrap();
    let cfg = SolverConfig::default();
    let x = pt(&[0.0], 1.0);
    assert!(matches!(solve(&x, &x, &params, &grid, &cfg), Err(Error::Precondition(_))));
    assert!(matches!(solve(&x, &pt(&[0.01], 1.0), &params, &grid, &cfg), Err(Error::InvalidGrid(_))));
    assert!(solve(&x, &pt(&[5.0], 1.0), &params, &grid, &cfg).is_err());
    let bad = SolverConfig { line_search_shrink: 1.5, ..SolverConfig::default() };
    assert!(solve(&x, &pt(&[0.5], 1.0), &params, &grid, &bad).is_err());
    let high = GridSpec::uniform(BoxRegion::new(vec![0.0; 4], vec![1.0; 4]).unwrap(), 4, 1.0).unwrap();
    let p4 = Params::new(4, 0.0, 5.0).unwrap();
    assert!(solve(&pt(&[0.2, 0.2, 0.2], 0.5), &pt(&[0.8, 0.8, 0.8], 0.5), &p4, &high, &cfg).is_err());
}

#[test]
fn three_dimensional_solve_runs() {
    let params = Params::new(3, 0.0, 4.0).unwrap();
    let x = pt(&[0.0, 0.0], 1.0);
    let y = pt(&[1.0, 0.0], 1.0);
    let grid = GridSpec::around_pair(&x, &y, 16, 1.0).unwrap();
    let est = solve(&x, &y, &params, &grid, &SolverConfig::default_for(&params)).unwrap();
    assert!(est.value.is_finite() && est.value > 0.0);
    assert!(est.converged);
}

/// Measured range of `oned_exact / Θ` over a log-spaced sweep of 61² pairs in `[0.001, 1000]`.
const ONED_BRACKETS: [((f64, f64), (f64, f64)); 4] =
    [((2.0, 0.0), (1.0, 1.0)), ((2.0, 1.0), (1.0, 1.0)), ((3.0, 1.0), (1.0379, 1.5864)), ((3.0, -1.5), (0.6886, 0.9470))];

#[test]
fn one_dimensional_modulus_is_equivalent_to_theta() {
    for ((p, gamma), (lo, hi)) in ONED_BRACKETS {
        let params = Params::new(1, gamma, p).unwrap();
        let (mut min, mut max) = (f64::INFINITY, 0.0f64);
        for i in -30..=30 {
            for j in -30..=30 {
                if i == j {
                    continue;
                }
                let (a, b) = (10f64.powf(i as f64 / 10.0), 10f64.powf(j as f64 / 10.0));
                let r = oned_exact(&params, a, b).unwrap() / theta_for(&params, &pt(&[], a), &pt(&[], b));
                min = min.min(r);
                max = max.max(r);
            }
        }
        assert!(min >= lo - 1e-4 && max <= hi + 1e-4, "(p, γ) = ({p}, {gamma}): [{min}, {max}]");
    }
}

#[test]
fn one_dimensional_sandwich_ratios_stay_in_bracket() {
    let pairs = [(pt(&[], 1.0), pt(&[], 2.0)), (pt(&[], 1.0), pt(&[], 8.0)), (pt(&[], 0.25), pt(&[], 0.5))];
    for ((p, gamma), (lo, hi)) in ONED_BRACKETS {
        let params = Params::new(1, gamma, p).unwrap();
        let report = sandwich_report(&pairs, &params, &Resolution::new(4096), &SolverConfig::default_for(&params)).unwrap();
        assert!(report.min_ratio >= 0.95 * lo && report.max_ratio <= 1.05 * hi, "(p, γ) = ({p}, {gamma}): {report:?}");
    }
}

#[test]
fn refinement_does_not_raise_the_minimum() {
    // Both points are nodes at every resolution, so the discrete spaces are nested.
    for (p, gamma) in [(2.0, 0.0), (3.0, 1.0), (3.0, -1.5)] {
        let params = Params::new(1, gamma, p).unwrap();
        let energies: Vec<f64> = [512, 1024, 2048]
            .into_iter()
            .map(|cells| {
                let grid = GridSpec::uniform(BoxRegion::new(vec![0.125], vec![16.125]).unwrap(), cells, 1.0).unwrap();
                solve(&pt(&[], 1.0), &pt(&[], 2.0), &params, &grid, &SolverConfig::default_for(&params)).unwrap().min_energy
            })
            .collect();
        assert!(energies.windows(2).all(|w| w[1] <= w[0] * 1.01), "(p, γ) = ({p}, {gamma}): {energies:?}");
    }
}
