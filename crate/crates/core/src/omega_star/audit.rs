//! Distance-axiom audit and the `ω̂/Θ` sandwich report.

use rayon::prelude::*;

use super::{solve, OmegaEstimate, SolverConfig};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, Resolution};
use crate::modulus::{pow, theta_for, Params};
use crate::point::HalfSpacePoint;

/// Dilation factor used by the homogeneity check.
pub const AUDIT_DILATION: f64 = 2.0;

/// Worst relative defect of one axiom, with where it occurred.
#[derive(Debug, Clone, PartialEq)]
pub struct Defect {
    pub value: f64,
    pub location: String,
}

impl Defect {
    fn none() -> Self {
        Self { value: 0.0, location: String::new() }
    }

    fn record(&mut self, value: f64, location: impl FnOnce() -> String) {
        if value > self.value || (self.location.is_empty() && value >= self.value) {
            self.value = value;
            self.location = location();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub symmetry: Defect,
    pub triangle: Defect,
    pub homogeneity: Defect,
    /// Zero with an empty location when `n = 1` (no horizontal directions).
    pub translation: Defect,
    pub all_converged: bool,
}

fn label(points: &[HalfSpacePoint], i: usize, j: usize) -> String {
    format!("({});({})", points[i], points[j])
}

/// Solves every ordered pair of `points` on `grid`, the dilated pairs on the
/// dilated grid and the translated pairs on the translated grid, and reports
/// the worst relative violation of each distance property.
pub fn distance_axiom_audit(points: &[HalfSpacePoint], params: &Params, grid: &GridSpec, cfg: &SolverConfig) -> Result<AuditReport> {
    let m = points.len();
    if m < 3 {
        return Err(Error::Precondition(format!("audit needs at least 3 points, got {m}")));
    }
    let n = params.n;
    let t = AUDIT_DILATION;
    let shift: Vec<f64> = (0..n - 1).map(|k| 0.25 * (grid.region.upper[k] - grid.region.lower[k])).collect();
    let scaled_grid = grid.scaled(t);
    let moved_grid = grid.translated(&shift);

    // (i, j, kind): 0 plain, 1 dilated, 2 translated.
    let mut jobs = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                jobs.push((i, j, 0u8));
            }
            if i < j {
                jobs.push((i, j, 1));
                if n > 1 {
                    jobs.push((i, j, 2));
                }
            }
        }
    }
    let results: Vec<Result<OmegaEstimate>> = jobs
        .par_iter()
        .map(|&(i, j, kind)| match kind {
            0 => solve(&points[i], &points[j], params, grid, cfg),
            1 => solve(&points[i].scaled(t), &points[j].scaled(t), params, &scaled_grid, cfg),
            _ => solve(&points[i].translated(&shift), &points[j].translated(&shift), params, &moved_grid, cfg),
        })
        .collect();

    let mut omega = vec![vec![0.0; m]; m];
    let mut dilated = vec![vec![0.0; m]; m];
    let mut moved = vec![vec![0.0; m]; m];
    let mut all_converged = true;
    for (&(i, j, kind), r) in jobs.iter().zip(results) {
        let est = r?;
        all_converged &= est.converged;
        match kind {
            0 => omega[i][j] = est.value,
            1 => dilated[i][j] = est.value,
            _ => moved[i][j] = est.value,
        }
    }

    let mut symmetry = Defect::none();
    let mut triangle = Defect::none();
    let mut homogeneity = Defect::none();
    let mut translation = Defect::none();
    let factor = pow(t, params.homogeneity_exponent());
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let w = omega[i][j];
            symmetry.record((w - omega[j][i]).abs() / w, || label(points, i, j));
            for k in 0..m {
                if k != i && k != j {
                    let excess = (w - omega[i][k] - omega[k][j]).max(0.0) / w;
                    triangle.record(excess, || format!("({});({});({})", points[i], points[k], points[j]));
                }
            }
            if i < j {
                homogeneity.record((dilated[i][j] - factor * w).abs() / w, || label(points, i, j));
                if n > 1 {
                    translation.record((moved[i][j] - w).abs() / w, || label(points, i, j));
                }
            }
        }
    }
    Ok(AuditReport { symmetry, triangle, homogeneity, translation, all_converged })
}

#[derive(Debug, Clone)]
pub struct SandwichRow {
    pub x: HalfSpacePoint,
    pub y: HalfSpacePoint,
    pub estimate: OmegaEstimate,
    pub theta: f64,
    /// `ω̂ / Θ`.
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct SandwichReport {
    pub rows: Vec<SandwichRow>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl SandwichReport {
    /// `max_ratio / min_ratio`.
    pub fn spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

/// Solves each pair on its default box at resolution `res` and compares with Θ.
pub fn sandwich_report(
    pairs: &[(HalfSpacePoint, HalfSpacePoint)],
    params: &Params,
    res: &Resolution,
    cfg: &SolverConfig,
) -> Result<SandwichReport> {
    let rows: Vec<Result<SandwichRow>> = pairs
        .par_iter()
        .map(|(x, y)| {
            if x == y {
                return Err(Error::Precondition("sandwich pairs must be distinct".into()));
            }
            let grid = res.grid_around_pair(x, y, params.gamma)?;
            let estimate = solve(x, y, params, &grid, cfg)?;
            let theta = theta_for(params, x, y);
            let ratio = estimate.value / theta;
            Ok(SandwichRow { x: x.clone(), y: y.clone(), estimate, theta, ratio })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(SandwichReport { rows, min_ratio, max_ratio })
}
