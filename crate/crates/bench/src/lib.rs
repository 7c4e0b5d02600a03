//! Shared fixtures for the benchmarks.

use morrey_core::certify::sample_pairs;
use morrey_core::extremals::{bump, log_bump, poly_bump};
use morrey_core::{BoxRegion, GridSpec, HalfSpacePoint, NamedField, Params};

pub type Pair = (HalfSpacePoint, HalfSpacePoint);

pub fn point(h: &[f64], z: f64) -> HalfSpacePoint {
    HalfSpacePoint::new(h, z).expect("fixture point lies in the half-space")
}

/// `count` seeded pairs in `[−1, 1] × [0.05, 2]`.
pub fn planar_pairs(count: usize) -> Vec<Pair> {
    sample_pairs(&BoxRegion::new(vec![-1.0, 0.05], vec![1.0, 2.0]).unwrap(), count, 7).unwrap()
}

/// One parameter set per branch of the modulus.
pub fn branch_params() -> [(&'static str, Params); 4] {
    [
        ("negative", Params::new(2, 4.0, 3.0).unwrap()),
        ("logarithmic", Params::new(2, 1.0, 3.0).unwrap()),
        ("intermediate", Params::new(2, 0.0, 3.0).unwrap()),
        ("saturated", Params::new(2, -2.0, 3.0).unwrap()),
    ]
}

pub fn corpus() -> Vec<NamedField> {
    vec![
        NamedField::new("bump", bump(&point(&[0.0], 1.0), 0.5).unwrap()),
        NamedField::new("log_bump", log_bump(&point(&[0.0], 0.2), 1.0).unwrap()),
        NamedField::new("poly_bump", poly_bump(&point(&[-0.4], 0.8), 0.6, &[0.7, -0.3], 0.4).unwrap()),
    ]
}

pub fn planar_grid(cells: usize) -> GridSpec {
    GridSpec::uniform(BoxRegion::new(vec![-2.0, 0.0], vec![2.0, 3.0]).unwrap(), cells, 1.0).unwrap()
}
