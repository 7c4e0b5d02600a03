use morrey_core::certify::{lower_bound_omega, run_certification, sample_pairs, Variant};
use morrey_core::error::Error;
use morrey_core::extremals::{bump, log_bump, poly_bump};
use morrey_core::field::{Dilated, NamedField, Scaled};
use morrey_core::omega_star::{oned_exact, solve};
use morrey_core::{BoxRegion, GridSpec, HalfSpacePoint, Params, SolverConfig};

fn pt(h: &[f64], z: f64) -> HalfSpacePoint {
    HalfSpacePoint::new(h, z).unwrap()
}

fn grid() -> GridSpec {
    GridSpec::uniform(BoxRegion::new(vec![-2.0, 0.0], vec![2.0, 3.0]).unwrap(), 96, 1.0).unwrap()
}

fn pairs() -> Vec<(HalfSpacePoint, HalfSpacePoint)> {
    sample_pairs(&BoxRegion::new(vec![-1.0, 0.05], vec![1.0, 2.0]).unwrap(), 48, 11).unwrap()
}

#[test]
fn ratios_are_invariant_under_field_scaling() {
    let params = Params::new(2, 0.5, 3.0).unwrap();
    let f = bump(&pt(&[0.1], 0.9), 0.6).unwrap();
    let base = run_certification(&[NamedField::new("f", f.clone())], &pairs(), &params, Variant::Full, &grid()).unwrap();
    for lambda in [1e-3, 7.5, -2.0] {
        let scaled = NamedField::new("f", Scaled { inner: f.clone(), factor: lambda });
        let rep = run_certification(&[scaled], &pairs(), &params, Variant::Full, &grid()).unwrap();
        for (a, b) in base.records.iter().zip(&rep.records) {
            assert!((a.ratio - b.ratio).abs() <= 1e-12 * a.ratio.max(1e-300), "{} vs {}", a.ratio, b.ratio);
        }
    }
}

#[test]
fn ratios_are_invariant_under_dilation() {
    // E scales by t^{n+γ−p} and Θ by t^κ with κ = (p−n−γ)/p, so the ratio is dilation invariant.
    for gamma in [-0.5, 1.0, 2.0] {
        let params = Params::new(2, gamma, 3.0).unwrap();
        let f = poly_bump(&pt(&[0.0], 1.0), 0.7, &[0.3, 0.2], -0.2).unwrap();
        let ps = pairs();
        let base = run_certification(&[NamedField::new("f", f.clone())], &ps, &params, Variant::Full, &grid()).unwrap();
        let t = 2.5;
        let dilated_pairs: Vec<_> = ps.iter().map(|(x, y)| (x.scaled(t), y.scaled(t))).collect();
        let dilated = NamedField::new("f", Dilated { inner: f, t });
        let rep = run_certification(&[dilated], &dilated_pairs, &params, Variant::Full, &grid().scaled(t)).unwrap();
        let rel = (rep.sup_ratio - base.sup_ratio).abs() / base.sup_ratio;
        assert!(rel < 0.01, "γ={gamma}: {} vs {}", rep.sup_ratio, base.sup_ratio);
    }
}

#[test]
fn compact_variants_reject_fields_touching_the_boundary() {
    let params = Params::new(2, 1.0, 3.0).unwrap();
    let low = NamedField::new("low", bump(&pt(&[0.0], 0.3), 0.5).unwrap());
    let err = run_certification(std::slice::from_ref(&low), &pairs(), &params, Variant::Compact, &grid()).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
    assert!(run_certification(&[low], &pairs(), &params, Variant::Full, &grid()).is_ok());
}

#[test]
fn report_is_field_major_and_argmax_attains_sup() {
    let params = Params::new(2, 1.0, 3.0).unwrap();
    let corpus =
        vec![NamedField::new("a", bump(&pt(&[0.0], 1.0), 0.5).unwrap()), NamedField::new("b", log_bump(&pt(&[0.0], 0.2), 1.0).unwrap())];
    let ps = pairs();
    let rep = run_certification(&corpus, &ps, &params, Variant::Hyperbolic, &grid()).unwrap();
    assert_eq!(rep.records.len(), 2 * ps.len());
    assert!(rep.records[..ps.len()].iter().all(|r| r.field_id == "a"));
    assert_eq!(rep.records[rep.argmax].ratio, rep.sup_ratio);
    assert!(rep.records.iter().all(|r| r.ratio <= rep.sup_ratio));
    let empty = run_certification(&corpus, &[], &params, Variant::Full, &grid()).unwrap();
    assert!(empty.records.is_empty());
    assert_eq!(empty.sup_ratio, 0.0);
}

#[test]
fn lower_bound_stays_below_one_dimensional_optimum() {
    for (gamma, p) in [(0.0, 2.0), (1.0, 3.0), (-1.5, 3.0)] {
        let params = Params::new(1, gamma, p).unwrap();
        let g = GridSpec::uniform(BoxRegion::new(vec![0.05], vec![20.0]).unwrap(), 4096, 1.0).unwrap();
        let (a, b) = (0.5, 2.5);
        let lb = lower_bound_omega(&pt(&[], a), &pt(&[], b), &params, false, &g).unwrap();
        let exact = oned_exact(&params, a, b).unwrap();
        assert!(lb <= exact * 1.001 && lb >= 0.5 * exact, "γ={gamma}: {lb} vs {exact}");
        let est = solve(&pt(&[], a), &pt(&[], b), &params, &g, &SolverConfig::default_for(&params)).unwrap();
        assert!(lb <= est.value * 1.001);
    }
}
