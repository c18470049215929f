//! Regular grid over behavior space.

use crate::behavior::BehaviorDescriptor;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Axis-aligned discretization of behavior space into
/// `resolution[0] * resolution[1] * ...` cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "F: Scalar", deserialize = "F: Scalar"))]
pub struct GridSpec<F: Scalar> {
    lower: Vec<F>,
    upper: Vec<F>,
    resolution: Vec<usize>,
}

impl<F: Scalar> GridSpec<F> {
    pub fn new(lower: Vec<F>, upper: Vec<F>, resolution: Vec<usize>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() || lower.len() != resolution.len() {
            return Err(Error::config(format!(
                "grid needs matching nonempty bounds and resolution, got {}/{}/{} entries",
                lower.len(),
                upper.len(),
                resolution.len()
            )));
        }
        for d in 0..lower.len() {
            if !lower[d].is_finite() || !upper[d].is_finite() || lower[d] >= upper[d] {
                return Err(Error::config(format!(
                    "grid bounds on dimension {d} must satisfy lower < upper"
                )));
            }
            if resolution[d] == 0 {
                return Err(Error::config(format!(
                    "grid resolution on dimension {d} must be positive"
                )));
            }
        }
        Ok(GridSpec {
            lower,
            upper,
            resolution,
        })
    }

    pub fn dims(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[F] {
        &self.lower
    }

    pub fn upper(&self) -> &[F] {
        &self.upper
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    /// Total number of cells.
    pub fn cell_count(&self) -> usize {
        self.resolution.iter().product()
    }

    /// Maps a descriptor to its cell.
    ///
    /// Per dimension the bin is `floor((c - lower) * res / (upper - lower))`;
    /// coordinates outside the bounds clamp to the boundary cell and
    /// `c == upper` lands in the last bin. Bins flatten row-major (last
    /// dimension fastest).
    pub fn cell_index(&self, descriptor: &BehaviorDescriptor<F>) -> Result<usize> {
        if descriptor.dims() != self.dims() {
            return Err(Error::config(format!(
                "descriptor has {} dimensions but the grid has {}",
                descriptor.dims(),
                self.dims()
            )));
        }
        let mut index = 0usize;
        for (d, &c) in descriptor.coords().iter().enumerate() {
            let res = self.resolution[d];
            let span = self.upper[d] - self.lower[d];
            let scaled = (c - self.lower[d]) * F::cast_from(res as f64) / span;
            let bin = if scaled <= F::zero() {
                0
            } else {
                let b = scaled.floor().as_f64() as usize;
                b.min(res - 1)
            };
            index = index * res + bin;
        }
        Ok(index)
    }
}
