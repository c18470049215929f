//! Flat parameter vectors and the layer metadata that gives them structure.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Shape of one dense layer: `output_width x input_width` weights plus an
/// optional bias of length `output_width`.
///
/// Weights are stored row-major (one row per output unit), bias last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerShape {
    pub input_width: usize,
    pub output_width: usize,
    pub has_bias: bool,
}

impl LayerShape {
    pub fn new(input_width: usize, output_width: usize, has_bias: bool) -> Result<Self> {
        if input_width == 0 || output_width == 0 {
            return Err(Error::config(format!(
                "layer widths must be positive, got {input_width}x{output_width}"
            )));
        }
        Ok(LayerShape {
            input_width,
            output_width,
            has_bias,
        })
    }

    /// Number of parameters the layer occupies in a flat vector.
    pub fn param_count(&self) -> usize {
        let bias = if self.has_bias { self.output_width } else { 0 };
        self.input_width * self.output_width + bias
    }
}

/// Total parameter count of a sequence of layers.
pub fn total_params(shapes: &[LayerShape]) -> usize {
    shapes.iter().map(LayerShape::param_count).sum()
}

/// Fixed-length vector of finite reals.
///
/// Every constructor and arithmetic operation re-checks finiteness, so a
/// `ParamVector` can never hold a NaN or infinity. Operations that could
/// produce one return `Err(Error::NonFinite)` instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<F>", into = "Vec<F>")]
#[serde(bound(serialize = "F: Scalar", deserialize = "F: Scalar"))]
pub struct ParamVector<F: Scalar> {
    values: Vec<F>,
}

impl<F: Scalar> ParamVector<F> {
    pub fn new(values: Vec<F>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("parameter vector entry {i}")));
        }
        Ok(ParamVector { values })
    }

    pub fn zeros(len: usize) -> Self {
        ParamVector {
            values: vec![F::zero(); len],
        }
    }

    pub fn empty() -> Self {
        ParamVector { values: Vec::new() }
    }

    /// Builds a vector by drawing each entry from `f`; rejects non-finite draws.
    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> F) -> Result<Self> {
        Self::new((0..len).map(|i| f(i)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[F] {
        &self.values
    }

    pub fn iter(&self) -> std::slice::Iter<'_, F> {
        self.values.iter()
    }

    /// `self + scale * other`, checked for finiteness.
    pub fn add_scaled(&self, other: &Self, scale: F) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::config(format!(
                "length mismatch in add_scaled: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Self::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a + scale * b)
                .collect(),
        )
    }

    /// Concatenation `[self, other]`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut values = Vec::with_capacity(self.len() + other.len());
        values.extend_from_slice(&self.values);
        values.extend_from_slice(&other.values);
        ParamVector { values }
    }

    /// Splits into `([0, mid), [mid, len))`. `mid` must not exceed the length.
    pub fn split_at(&self, mid: usize) -> Result<(Self, Self)> {
        if mid > self.len() {
            return Err(Error::config(format!(
                "split point {mid} exceeds vector length {}",
                self.len()
            )));
        }
        let (a, b) = self.values.split_at(mid);
        Ok((
            ParamVector { values: a.to_vec() },
            ParamVector { values: b.to_vec() },
        ))
    }

    /// Euclidean norm, for diagnostics.
    pub fn norm(&self) -> F {
        self.values
            .iter()
            .fold(F::zero(), |acc, &v| acc + v * v)
            .sqrt()
    }
}

impl<F: Scalar> std::ops::Index<usize> for ParamVector<F> {
    type Output = F;
    fn index(&self, i: usize) -> &F {
        &self.values[i]
    }
}

impl<F: Scalar> TryFrom<Vec<F>> for ParamVector<F> {
    type Error = String;
    fn try_from(values: Vec<F>) -> std::result::Result<Self, String> {
        ParamVector::new(values).map_err(|e| e.to_string())
    }
}

impl<F: Scalar> From<ParamVector<F>> for Vec<F> {
    fn from(v: ParamVector<F>) -> Vec<F> {
        v.values
    }
}
