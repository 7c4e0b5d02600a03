//! Midpoint-rule integration on graded tensor grids.
//!
//! The weight `z_n^γ` is only ever sampled at cell centres, so the rule never
//! touches the boundary singularity; grading in the height coordinate takes
//! care of the accuracy loss near it. Error estimates come from comparing two
//! dyadic resolutions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::GridSpec;
use crate::modulus::{pow, Params};
use crate::point::BoxRegion;

/// Cells per parallel work unit. Fixed so that reductions are deterministic.
const CHUNK: usize = 4096;

/// Gagliardo value growth under one refinement that counts as divergence.
pub const DEFAULT_DIVERGENCE_FACTOR: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    /// `∫ |Du|^p z_n^γ dz` at the finer resolution.
    pub value: f64,
    /// The same integral at half the resolution.
    pub coarse_value: f64,
    pub cells_used: usize,
    /// `|value − coarse_value| / value` (0 when both vanish).
    pub refinement_delta: f64,
}

pub(crate) fn relative_gap(fine: f64, coarse: f64) -> f64 {
    let scale = fine.abs().max(coarse.abs());
    if scale == 0.0 {
        0.0
    } else {
        (fine - coarse).abs() / scale
    }
}

/// Visits every cell centre of `grid` in parallel and sums `integrand(centre, volume)`.
///
/// Chunks are summed sequentially in index order, so results are bit-for-bit
/// reproducible regardless of the thread count.
pub fn integrate_cells<F>(grid: &GridSpec, integrand: F) -> f64
where
    F: Fn(&[f64], f64) -> f64 + Sync,
{
    let n = grid.dim();
    let edges: Vec<Vec<f64>> = (0..n).map(|k| grid.edges(k)).collect();
    let cells = &grid.cells_per_axis;
    let total = grid.cell_count();
    let chunks = total.div_ceil(CHUNK);
    let partials: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut centre = vec![0.0; n];
            let mut acc = 0.0;
            for flat in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let mut rest = flat;
                let mut volume = 1.0;
                for k in 0..n {
                    let i = rest % cells[k];
                    rest /= cells[k];
                    let (lo, hi) = (edges[k][i], edges[k][i + 1]);
                    centre[k] = 0.5 * (lo + hi);
                    volume *= hi - lo;
                }
                acc += integrand(&centre, volume);
            }
            acc
        })
        .collect();
    partials.iter().sum()
}

/// Single-resolution midpoint approximation of `∫ |Du|^p z_n^γ dz` over the grid box.
pub fn energy_on_grid(field: &dyn ScalarField, p: f64, gamma: f64, grid: &GridSpec) -> f64 {
    assert_eq!(field.dim(), grid.dim(), "field and grid dimensions differ");
    let n = grid.dim();
    integrate_cells(grid, |z, vol| {
        let mut g = [0.0; 8];
        let g = if n <= 8 { &mut g[..n] } else { unreachable!("dimension > 8 unsupported") };
        field.gradient(z, g);
        let norm2: f64 = g.iter().map(|c| c * c).sum();
        if norm2 == 0.0 {
            return 0.0;
        }
        pow(norm2, 0.5 * p) * pow(z[n - 1], gamma) * vol
    })
}

/// Weighted p-energy with a two-resolution error estimate.
///
/// `grid` is the fine resolution; the coarse one halves every cell count.
/// For `γ ≤ −1` on a box touching the boundary a third level is computed and
/// [`Error::NonIntegrable`] is returned when the increments stop shrinking.
pub fn weighted_energy(field: &dyn ScalarField, params: &Params, grid: &GridSpec) -> Result<EnergyReport> {
    params.validate()?;
    grid.validate()?;
    if field.dim() != grid.dim() || grid.dim() != params.n {
        return Err(Error::Precondition(format!("dimension mismatch: field {}, grid {}, params {}", field.dim(), grid.dim(), params.n)));
    }
    let coarse_grid = grid.coarsened();
    let fine = energy_on_grid(field, params.p, params.gamma, grid);
    let coarse = energy_on_grid(field, params.p, params.gamma, &coarse_grid);

    if params.gamma <= -1.0 && grid.region.floor() == 0.0 {
        let coarsest = energy_on_grid(field, params.p, params.gamma, &coarse_grid.coarsened());
        let inc_fine = fine - coarse;
        let inc_coarse = coarse - coarsest;
        if inc_fine > 1e-3 * fine && inc_coarse > 0.0 && inc_fine >= 0.5 * inc_coarse {
            return Err(Error::NonIntegrable(format!(
                "energy keeps growing under refinement ({coarsest} -> {coarse} -> {fine}) with gamma = {}",
                params.gamma
            )));
        }
    }

    Ok(EnergyReport { value: fine, coarse_value: coarse, cells_used: grid.cell_count(), refinement_delta: relative_gap(fine, coarse) })
}

/// Volume of the unit ball in `R^k`, with `|B^0| = 1`.
pub fn unit_ball_volume(k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(k - 2) * 2.0 * std::f64::consts::PI / k as f64,
    }
}

/// `|C_R(x)| = |B^{n−1}|·R^n / n` for the upward cone `{|z′−x′| < z_n − x_n < R}`.
pub fn cone_volume(n: usize, r: f64) -> f64 {
    assert!(n >= 1 && r > 0.0);
    unit_ball_volume(n - 1) * r.powi(n as i32) / n as f64
}

/// Integrates the cone indicator with the midpoint rule on `cells` per axis
/// and returns the relative error against [`cone_volume`].
pub fn cone_volume_check(n: usize, r: f64, cells: usize) -> f64 {
    let mut lower = vec![-r; n];
    let mut upper = vec![r; n];
    lower[n - 1] = 0.0;
    upper[n - 1] = r;
    let grid = GridSpec::uniform(BoxRegion { lower, upper }, cells, 1.0).expect("cone box is valid");
    let measured = integrate_cells(&grid, |z, vol| {
        let radial = z[..n - 1].iter().map(|c| c * c).sum::<f64>().sqrt();
        if radial < z[n - 1] && z[n - 1] < r {
            vol
        } else {
            0.0
        }
    });
    let exact = cone_volume(n, r);
    (measured - exact).abs() / exact
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GagliardoReport {
    /// Midpoint double sum of `|v(x)−v(y)|^p / |x−y|^{1+sp}`, diagonal cells excluded.
    pub value: f64,
    pub coarse_value: f64,
    /// Crude bound on the excluded diagonal band, from a Lipschitz estimate of `v`.
    pub band_remainder: f64,
}

impl GagliardoReport {
    pub fn refinement_delta(&self) -> f64 {
        relative_gap(self.value, self.coarse_value)
    }
}

fn gagliardo_sum(trace: &(dyn Fn(f64) -> f64 + Sync), s: f64, p: f64, a: f64, b: f64, cells: usize) -> (f64, f64) {
    let h = (b - a) / cells as f64;
    let values: Vec<f64> = (0..cells).map(|i| trace(a + (i as f64 + 0.5) * h)).collect();
    let kernel = 1.0 + s * p;
    let rows: Vec<f64> = (0..cells)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..cells {
                if i == j {
                    continue;
                }
                let diff = (values[i] - values[j]).abs();
                if diff == 0.0 {
                    continue;
                }
                let dist = (i as f64 - j as f64).abs() * h;
                acc += pow(diff, p) / pow(dist, kernel);
            }
            acc * h * h
        })
        .collect();
    let value = rows.iter().sum();

    let lipschitz = values.windows(2).map(|w| (w[1] - w[0]).abs() / h).fold(0.0, f64::max);
    let e = p - s * p;
    let band = cells as f64 * pow(lipschitz, p) * 2.0 * pow(h, e + 1.0) / (e * (e + 1.0));
    (value, band)
}

/// Gagliardo double integral of a one-dimensional trace over `interval²`.
pub fn gagliardo_seminorm(
    trace: &(dyn Fn(f64) -> f64 + Sync),
    s: f64,
    p: f64,
    interval: (f64, f64),
    cells: usize,
) -> Result<GagliardoReport> {
    gagliardo_seminorm_with(trace, s, p, interval, cells, DEFAULT_DIVERGENCE_FACTOR)
}

/// As [`gagliardo_seminorm`] with an explicit divergence factor.
pub fn gagliardo_seminorm_with(
    trace: &(dyn Fn(f64) -> f64 + Sync),
    s: f64,
    p: f64,
    interval: (f64, f64),
    cells: usize,
    divergence_factor: f64,
) -> Result<GagliardoReport> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Precondition(format!("smoothness s = {s} must lie in (0, 1)")));
    }
    if !(p > 1.0) {
        return Err(Error::Precondition(format!("p = {p} must exceed 1")));
    }
    let (a, b) = interval;
    if !(a < b) || cells < 4 {
        return Err(Error::Precondition("need a < b and at least 4 cells".into()));
    }
    let (value, band_remainder) = gagliardo_sum(trace, s, p, a, b, cells);
    let (coarse_value, _) = gagliardo_sum(trace, s, p, a, b, cells / 2);
    if coarse_value > 0.0 && value > divergence_factor * coarse_value {
        return Err(Error::Divergence(format!("Gagliardo sum grew from {coarse_value} to {value} under refinement (s = {s}, p = {p})")));
    }
    Ok(GagliardoReport { value, coarse_value, band_remainder })
}

/// Largest discrepancy between `field.gradient` and central differences at
/// `samples` seeded random points, relative to the largest gradient seen.
///
/// Points are drawn from the support box, else the energy box, else
/// `[−1, 1]^{n−1} × [1/4, 2]`.
pub fn finite_difference_gradient_check(field: &dyn ScalarField, samples: usize, step: f64, seed: u64) -> f64 {
    let n = field.dim();
    let region = field.support_box().or_else(|| field.energy_box()).unwrap_or_else(|| {
        let mut lower = vec![-1.0; n];
        let mut upper = vec![1.0; n];
        lower[n - 1] = 0.25;
        upper[n - 1] = 2.0;
        BoxRegion { lower, upper }
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_abs: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut g = vec![0.0; n];
    for _ in 0..samples {
        let z: Vec<f64> = (0..n)
            .map(|k| {
                let lo = if k + 1 == n { region.lower[k].max(2.0 * step) } else { region.lower[k] };
                rng.gen_range(lo..region.upper[k])
            })
            .collect();
        field.gradient(&z, &mut g);
        for k in 0..n {
            let mut plus = z.clone();
            let mut minus = z.clone();
            plus[k] += step;
            minus[k] -= step;
            let fd = (field.value(&plus) - field.value(&minus)) / (2.0 * step);
            worst_abs = worst_abs.max((fd - g[k]).abs());
            scale = scale.max(g[k].abs()).max(fd.abs());
        }
    }
    if worst_abs == 0.0 {
        0.0
    } else {
        worst_abs / scale.max(f64::MIN_POSITIVE)
    }
}
