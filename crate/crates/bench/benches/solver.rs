use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use morrey_bench::point;
use morrey_core::omega_star::solve;
use morrey_core::{BoxRegion, GridSpec, Params, SolverConfig};

fn solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);

    let p1 = Params::new(1, 1.0, 3.0).unwrap();
    for cells in [1024, 4096] {
        let grid = GridSpec::uniform(BoxRegion::new(vec![0.125], vec![16.0]).unwrap(), cells, 1.0).unwrap();
        group.bench_with_input(BenchmarkId::new("1d", cells), &grid, |b, grid| {
            b.iter(|| solve(&point(&[], 1.0), &point(&[], 2.0), &p1, grid, &SolverConfig::default_for(&p1)).unwrap())
        });
    }

    let p2 = Params::new(2, 0.0, 3.0).unwrap();
    let (x, y) = (point(&[0.0], 1.0), point(&[1.0], 1.0));
    for cells in [32, 64] {
        let grid = GridSpec::around_pair(&x, &y, cells, 1.0).unwrap();
        group.bench_with_input(BenchmarkId::new("2d", cells), &grid, |b, grid| {
            b.iter(|| solve(&x, &y, &p2, grid, &SolverConfig::default_for(&p2)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, solver);
criterion_main!(benches);
