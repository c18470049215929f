//! Behavior descriptors and evaluation results.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Point in behavior space. Coordinates are always finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<F>", into = "Vec<F>")]
#[serde(bound(serialize = "F: Scalar", deserialize = "F: Scalar"))]
pub struct BehaviorDescriptor<F: Scalar> {
    coords: Vec<F>,
}

impl<F: Scalar> BehaviorDescriptor<F> {
    pub fn new(coords: Vec<F>) -> Result<Self> {
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("descriptor coordinate {i}")));
        }
        Ok(BehaviorDescriptor { coords })
    }

    pub fn dims(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[F] {
        &self.coords
    }
}

impl<F: Scalar> TryFrom<Vec<F>> for BehaviorDescriptor<F> {
    type Error = String;
    fn try_from(coords: Vec<F>) -> std::result::Result<Self, String> {
        BehaviorDescriptor::new(coords).map_err(|e| e.to_string())
    }
}

impl<F: Scalar> From<BehaviorDescriptor<F>> for Vec<F> {
    fn from(d: BehaviorDescriptor<F>) -> Vec<F> {
        d.coords
    }
}

/// Outcome of evaluating one solution: a finite fitness plus where the
/// solution landed in behavior space. Evaluation is pure, so equal inputs
/// produce bit-identical results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "F: Scalar", deserialize = "F: Scalar"))]
pub struct EvalResult<F: Scalar> {
    pub fitness: F,
    pub descriptor: BehaviorDescriptor<F>,
}

impl<F: Scalar> EvalResult<F> {
    pub fn new(fitness: F, descriptor: BehaviorDescriptor<F>) -> Result<Self> {
        if !fitness.is_finite() {
            return Err(Error::NonFinite("fitness".into()));
        }
        Ok(EvalResult {
            fitness,
            descriptor,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_coordinates_and_fitness_are_rejected() {
        assert!(BehaviorDescriptor::new(vec![0.0, f64::NAN]).is_err());
        let d = BehaviorDescriptor::new(vec![0.0, 1.0]).unwrap();
        assert!(EvalResult::new(f64::INFINITY, d.clone()).is_err());
        assert!(EvalResult::new(-1.0, d).is_ok());
    }
}
