use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use morrey_bench::{corpus, planar_grid, planar_pairs};
use morrey_core::certify::{field_grid, run_certification};
use morrey_core::quadrature::{gagliardo_seminorm, weighted_energy};
use morrey_core::{Params, Variant};

fn quadrature(c: &mut Criterion) {
    let params = Params::new(2, 1.0, 3.0).unwrap();
    let fields = corpus();
    let mut group = c.benchmark_group("weighted_energy");
    for cells in [64, 128, 256] {
        let grid = field_grid(&*fields[0].field, &planar_grid(cells)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(cells), &grid, |b, grid| {
            b.iter(|| weighted_energy(&*fields[0].field, &params, black_box(grid)).unwrap())
        });
    }
    group.finish();

    let trace = |t: f64| (t - 1.0).abs().min(0.5);
    c.bench_function("gagliardo_1024_cells", |b| b.iter(|| gagliardo_seminorm(&trace, 0.5, 3.0, (0.0, 2.0), black_box(1024)).unwrap()));

    let pairs = planar_pairs(64);
    c.bench_function("certification_3_fields_64_pairs", |b| {
        b.iter(|| run_certification(&fields, &pairs, &params, Variant::Full, &planar_grid(64)).unwrap())
    });
}

criterion_group!(benches, quadrature);
criterion_main!(benches);
