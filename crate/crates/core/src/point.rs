//! Points of the open half-space and axis-aligned boxes.
//!
//! Coordinates are stored as a flat vector whose last entry is the height
//! (distance to the boundary hyperplane).

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpacePoint {
    coords: Vec<f64>,
}

impl HalfSpacePoint {
    pub fn new(horizontal: &[f64], height: f64) -> Result<Self> {
        let mut coords = horizontal.to_vec();
        coords.push(height);
        Self::from_coords(coords)
    }

    /// Builds a point from its full coordinate vector, last entry = height.
    pub fn from_coords(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::OutsideHalfSpace("empty coordinate list".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::OutsideHalfSpace(format!("non-finite coordinate in {coords:?}")));
        }
        let h = *coords.last().unwrap();
        if h <= 0.0 {
            return Err(Error::OutsideHalfSpace(format!("height {h} must be > 0")));
        }
        Ok(Self { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn height(&self) -> f64 {
        self.coords[self.coords.len() - 1]
    }

    pub fn horizontal(&self) -> &[f64] {
        &self.coords[..self.coords.len() - 1]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn distance(&self, other: &HalfSpacePoint) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        euclid(&self.coords, &other.coords)
    }

    /// Dilation `t·x` about the origin of the boundary; `t > 0`.
    pub fn scaled(&self, t: f64) -> HalfSpacePoint {
        assert!(t > 0.0 && t.is_finite(), "scale must be positive");
        HalfSpacePoint { coords: self.coords.iter().map(|c| c * t).collect() }
    }

    /// Horizontal translation by `shift` (length `dim - 1`).
    pub fn translated(&self, shift: &[f64]) -> HalfSpacePoint {
        assert_eq!(shift.len() + 1, self.dim(), "shift must be horizontal");
        let mut coords = self.coords.clone();
        for (c, s) in coords.iter_mut().zip(shift) {
            *c += s;
        }
        HalfSpacePoint { coords }
    }
}

impl fmt::Display for HalfSpacePoint {
    /// Comma-separated coordinates, no spaces, shortest round-trip decimals.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

pub(crate) fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Closed axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRegion {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::InvalidGrid("box corners must have equal, nonzero length".into()));
        }
        for (lo, hi) in lower.iter().zip(&upper) {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidGrid(format!("degenerate box [{lo}, {hi}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Cube of half-width `r` around `center`.
    pub fn cube(center: &[f64], r: f64) -> Self {
        Self { lower: center.iter().map(|c| c - r).collect(), upper: center.iter().map(|c| c + r).collect() }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).product()
    }

    /// Lower height bound (last coordinate).
    pub fn floor(&self) -> f64 {
        self.lower[self.dim() - 1]
    }

    /// Intersection with the closed half-space `{z_n >= 0}`; `None` if nothing remains.
    pub fn clipped_to_half_space(&self) -> Option<BoxRegion> {
        let mut out = self.clone();
        let k = self.dim() - 1;
        if out.upper[k] <= 0.0 {
            return None;
        }
        out.lower[k] = out.lower[k].max(0.0);
        Some(out)
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        z.iter().zip(self.lower.iter().zip(&self.upper)).all(|(c, (l, u))| *l <= *c && *c <= *u)
    }

    pub fn scaled(&self, t: f64) -> BoxRegion {
        BoxRegion { lower: self.lower.iter().map(|c| c * t).collect(), upper: self.upper.iter().map(|c| c * t).collect() }
    }

    pub fn translated(&self, shift: &[f64]) -> BoxRegion {
        let mut out = self.clone();
        for (k, s) in shift.iter().enumerate() {
            out.lower[k] += s;
            out.upper[k] += s;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_boundary_and_below() {
        assert!(HalfSpacePoint::new(&[0.0], 0.0).is_err());
        assert!(HalfSpacePoint::new(&[0.0], -1.0).is_err());
        assert!(HalfSpacePoint::new(&[f64::NAN], 1.0).is_err());
        assert!(HalfSpacePoint::from_coords(vec![]).is_err());
    }

    #[test]
    fn display_is_comma_list() {
        let x = HalfSpacePoint::new(&[0.0, -1.5], 2.0).unwrap();
        assert_eq!(x.to_string(), "0,-1.5,2");
        assert_eq!(x.horizontal(), &[0.0, -1.5]);
    }

    #[test]
    fn clipping() {
        let b = BoxRegion::cube(&[0.0, 0.5], 1.0);
        let c = b.clipped_to_half_space().unwrap();
        assert_eq!(c.lower, vec![-1.0, 0.0]);
        assert!(BoxRegion::cube(&[0.0, -2.0], 1.0).clipped_to_half_space().is_none());
    }
}
