//! Tensor-product grids, graded toward the boundary in the height coordinate.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::point::{BoxRegion, HalfSpacePoint};

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub region: BoxRegion,
    pub cells_per_axis: Vec<usize>,
    /// Exponent `q ≥ 1`: height edges sit at `lo + (hi − lo)·(j/J)^q`.
    pub grading_exponent: f64,
}

/// Default grading: `2/(1+γ)` for `γ ∈ (−1, 0)`, otherwise uniform.
pub fn default_grading(gamma: f64) -> f64 {
    if gamma > -1.0 && gamma < 0.0 {
        (2.0 / (1.0 + gamma)).max(1.0)
    } else {
        1.0
    }
}

impl GridSpec {
    pub fn new(region: BoxRegion, cells_per_axis: Vec<usize>, grading_exponent: f64) -> Result<Self> {
        let grid = Self { region, cells_per_axis, grading_exponent };
        grid.validate()?;
        Ok(grid)
    }

    /// Same number of cells along every axis.
    pub fn uniform(region: BoxRegion, cells: usize, grading_exponent: f64) -> Result<Self> {
        let n = region.dim();
        Self::new(region, vec![cells; n], grading_exponent)
    }

    pub fn validate(&self) -> Result<()> {
        // Re-run the box checks; the fields are public.
        BoxRegion::new(self.region.lower.clone(), self.region.upper.clone())?;
        if self.cells_per_axis.len() != self.region.dim() {
            return Err(Error::InvalidGrid("one cell count per axis required".into()));
        }
        if self.cells_per_axis.contains(&0) {
            return Err(Error::InvalidGrid("cell counts must be positive".into()));
        }
        if !(self.grading_exponent >= 1.0 && self.grading_exponent.is_finite()) {
            return Err(Error::InvalidGrid(format!("grading exponent {} must be >= 1", self.grading_exponent)));
        }
        if self.region.floor() < 0.0 {
            return Err(Error::InvalidGrid(format!("box floor {} lies below the boundary", self.region.floor())));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.region.dim()
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_axis.iter().product()
    }

    pub fn node_count(&self) -> usize {
        self.cells_per_axis.iter().map(|c| c + 1).product()
    }

    /// Cell edges along `axis`; only the last axis is graded.
    pub fn edges(&self, axis: usize) -> Vec<f64> {
        let lo = self.region.lower[axis];
        let hi = self.region.upper[axis];
        let cells = self.cells_per_axis[axis];
        let q = if axis + 1 == self.dim() { self.grading_exponent } else { 1.0 };
        (0..=cells)
            .map(|j| {
                if j == cells {
                    hi
                } else {
                    let s = j as f64 / cells as f64;
                    lo + (hi - lo) * if q == 1.0 { s } else { s.powf(q) }
                }
            })
            .collect()
    }

    /// Twice as many cells along every axis.
    pub fn refined(&self) -> GridSpec {
        GridSpec { cells_per_axis: self.cells_per_axis.iter().map(|c| c * 2).collect(), ..self.clone() }
    }

    /// Half as many cells along every axis (at least one).
    pub fn coarsened(&self) -> GridSpec {
        GridSpec { cells_per_axis: self.cells_per_axis.iter().map(|c| (c / 2).max(1)).collect(), ..self.clone() }
    }

    pub fn scaled(&self, t: f64) -> GridSpec {
        GridSpec { region: self.region.scaled(t), ..self.clone() }
    }

    pub fn translated(&self, shift: &[f64]) -> GridSpec {
        GridSpec { region: self.region.translated(shift), ..self.clone() }
    }

    /// Default solver box for a pair: cube centred at the midpoint with side
    /// `8·max(|x−y|, x_n, y_n)`, clipped to the closed half-space.
    pub fn around_pair(x: &HalfSpacePoint, y: &HalfSpacePoint, cells: usize, grading: f64) -> Result<Self> {
        let scale = x.distance(y).max(x.height()).max(y.height());
        let mid: Vec<f64> = x.coords().iter().zip(y.coords()).map(|(a, b)| 0.5 * (a + b)).collect();
        let region = BoxRegion::cube(&mid, 4.0 * scale).clipped_to_half_space().expect("midpoint lies in the half-space");
        Self::uniform(region, cells, grading)
    }
}

/// Cells per axis plus grading; the box is chosen per field or per pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    pub cells: usize,
    /// `None` means [`default_grading`] for the γ in force.
    pub grading: Option<f64>,
}

impl Resolution {
    pub fn new(cells: usize) -> Self {
        Self { cells, grading: None }
    }

    pub fn graded(cells: usize, grading: f64) -> Self {
        Self { cells, grading: Some(grading) }
    }

    pub fn grading_for(&self, gamma: f64) -> f64 {
        self.grading.unwrap_or_else(|| default_grading(gamma))
    }

    pub fn refined(&self) -> Resolution {
        Resolution { cells: self.cells * 2, ..*self }
    }

    /// Grid over the field's energy box clipped to the half-space, falling
    /// back to `fallback` for fields without a bounded energy box.
    pub fn grid_for_field(&self, field: &dyn ScalarField, gamma: f64, fallback: Option<&BoxRegion>) -> Result<GridSpec> {
        let region = match field.energy_box() {
            Some(b) => {
                b.clipped_to_half_space().ok_or_else(|| Error::Precondition("field energy box lies outside the half-space".into()))?
            }
            None => fallback
                .cloned()
                .ok_or_else(|| Error::Precondition("field has no bounded energy box and no fallback box was given".into()))?,
        };
        GridSpec::uniform(region, self.cells, self.grading_for(gamma))
    }

    pub fn grid_around_pair(&self, x: &HalfSpacePoint, y: &HalfSpacePoint, gamma: f64) -> Result<GridSpec> {
        GridSpec::around_pair(x, y, self.cells, self.grading_for(gamma))
    }
}
