use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniformly spaced axis `min, min + h, …, max` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAxis", into = "RawAxis")]
pub struct AxisGrid {
    min: f64,
    max: f64,
    count: usize,
}

#[derive(Serialize, Deserialize)]
struct RawAxis {
    min: f64,
    max: f64,
    count: usize,
}

impl TryFrom<RawAxis> for AxisGrid {
    type Error = Error;

    fn try_from(r: RawAxis) -> Result<Self> {
        AxisGrid::new(r.min, r.max, r.count)
    }
}

impl From<AxisGrid> for RawAxis {
    fn from(a: AxisGrid) -> Self {
        RawAxis { min: a.min, max: a.max, count: a.count }
    }
}

impl AxisGrid {
    pub const MIN_COUNT: usize = 16;
    /// Default half-width in units of `√ħ`.
    pub const DEFAULT_EXTENT: f64 = 8.0;
    /// Default point count; odd so that the origin is a grid point.
    pub const DEFAULT_COUNT: usize = 257;

    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::InvalidParameter(format!("axis needs min < max, got [{min}, {max}]")));
        }
        if count < Self::MIN_COUNT {
            return Err(Error::InvalidParameter(format!(
                "axis needs at least {} points, got {count}",
                Self::MIN_COUNT
            )));
        }
        Ok(Self { min, max, count })
    }

    /// `[-extent, extent]`.
    pub fn symmetric(extent: f64, count: usize) -> Result<Self> {
        Self::new(-extent, extent, count)
    }

    /// `[-8√ħ, 8√ħ]` with 257 points.
    pub fn default_for(hbar: f64) -> Self {
        Self::symmetric(Self::DEFAULT_EXTENT * hbar.sqrt(), Self::DEFAULT_COUNT)
            .expect("positive hbar gives a valid axis")
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    /// Points laid out symmetrically about the centre, so that symmetric
    /// axes have exactly mirrored coordinates.
    pub fn point(&self, i: usize) -> f64 {
        let centre = 0.5 * (self.min + self.max);
        let mid = 0.5 * (self.count - 1) as f64;
        centre + (i as f64 - mid) * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (self.min + self.max).abs() <= 1e-12 * self.max.abs()
    }

    /// Index of the point closest to `v`, if `v` lies on the axis.
    pub fn index_of(&self, v: f64) -> Option<usize> {
        let t = (v - self.min) / self.spacing();
        let i = t.round();
        if i < 0.0 || i >= self.count as f64 || (t - i).abs() > 1e-9 {
            None
        } else {
            Some(i as usize)
        }
    }

    pub fn same_as(&self, other: &Self) -> bool {
        let tol = 1e-12 * (self.max - self.min);
        self.count == other.count && (self.min - other.min).abs() <= tol && (self.max - other.max).abs() <= tol
    }
}
