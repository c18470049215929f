//! Floating-point abstraction for the numeric core.
//!
//! All vector math, tasks, and the engine are generic over [`Scalar`] so the
//! same code runs at `f32` or `f64`. The crate root exports `f64` aliases,
//! which is what the CLI and the persisted formats use.

use serde::{de::DeserializeOwned, Serialize};
use std::fmt::{Debug, Display};

/// Floating-point scalar used throughout the crate.
///
/// A blanket impl covers `f32` and `f64`; nothing implements this trait
/// by hand.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used for constants and RNG draws.
    fn cast_from(v: f64) -> Self {
        num_traits::FromPrimitive::from_f64(v).expect("finite f64 converts to Scalar")
    }

    /// Widening (or identity) conversion into `f64` for reporting.
    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("Scalar converts to f64")
    }
}

impl<T> Scalar for T where
    T: num_traits::Float
        + num_traits::FromPrimitive
        + num_traits::ToPrimitive
        + Debug
        + Display
        + Serialize
        + DeserializeOwned
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_float_widths_are_scalars() {
        fn takes_scalar<F: Scalar>(v: F) -> f64 {
            v.as_f64()
        }
        assert_eq!(takes_scalar(1.5f32), 1.5);
        assert_eq!(takes_scalar(1.5f64), 1.5);
    }

    #[test]
    fn from_f64_round_trips_exact_values() {
        assert_eq!(<f64 as Scalar>::cast_from(0.1), 0.1);
        assert_eq!(<f32 as Scalar>::cast_from(0.25), 0.25f32);
    }
}
