//! Variation operators: line recombination, gradient ascent on decision
//! parts, parent selection, and the representation learning-rate schedule.

use crate::archive::DeepDecisionArchive;
use crate::error::{Error, Result};
use crate::params::ParamVector;
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::tasks::{Part, Task};

/// Scales of the line recombination operator.
///
/// An offspring of parents `x1, x2` is
/// `x1 + sigma1 * g + sigma2 * s * (x2 - x1)` with `g` a standard normal
/// vector and `s` a single standard normal scalar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoLineParams<F: Scalar> {
    pub sigma1: F,
    pub sigma2: F,
}

impl<F: Scalar> IsoLineParams<F> {
    pub fn new(sigma1: F, sigma2: F) -> Result<Self> {
        if !sigma1.is_finite() || !sigma2.is_finite() || sigma1 < F::zero() || sigma2 < F::zero() {
            return Err(Error::config("isoline sigmas must be finite and >= 0"));
        }
        Ok(IsoLineParams { sigma1, sigma2 })
    }
}

impl<F: Scalar> Default for IsoLineParams<F> {
    fn default() -> Self {
        IsoLineParams {
            sigma1: F::cast_from(0.005),
            sigma2: F::cast_from(0.05),
        }
    }
}

/// Line recombination. Draws the normal vector first, then the line scalar,
/// so the consumed randomness is independent of evaluation order.
pub fn isoline_dd<F: Scalar>(
    x1: &ParamVector<F>,
    x2: &ParamVector<F>,
    params: &IsoLineParams<F>,
    rng: &mut RngStream,
) -> Result<ParamVector<F>> {
    if x1.len() != x2.len() {
        return Err(Error::config(format!(
            "isoline parents differ in length: {} vs {}",
            x1.len(),
            x2.len()
        )));
    }
    if params.sigma1 == F::zero() && params.sigma2 == F::zero() {
        // Bit-exact copy; no randomness consumed.
        return Ok(x1.clone());
    }
    let noise: Vec<F> = (0..x1.len()).map(|_| rng.normal()).collect();
    let line: F = rng.normal();
    ParamVector::new(
        x1.iter()
            .zip(x2.iter())
            .zip(noise)
            .map(|((&a, &b), g)| a + params.sigma1 * g + params.sigma2 * line * (b - a))
            .collect(),
    )
}

/// Exponentially decaying learning rate with a floor:
/// `lr(t) = max(initial_lr * decay_rate^t, floor_lr)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrSchedule<F: Scalar> {
    pub initial_lr: F,
    pub decay_rate: F,
    pub floor_lr: F,
}

impl<F: Scalar> LrSchedule<F> {
    pub fn new(initial_lr: F, decay_rate: F, floor_lr: F) -> Result<Self> {
        if !initial_lr.is_finite() || initial_lr <= F::zero() {
            return Err(Error::config("initial_lr must be positive"));
        }
        if !decay_rate.is_finite() || decay_rate <= F::zero() || decay_rate > F::one() {
            return Err(Error::config("decay_rate must lie in (0, 1]"));
        }
        if !floor_lr.is_finite() || floor_lr < F::zero() {
            return Err(Error::config("floor_lr must be >= 0"));
        }
        Ok(LrSchedule {
            initial_lr,
            decay_rate,
            floor_lr,
        })
    }

    /// Default decay of 0.999 per step with a floor at one percent of the
    /// initial rate.
    pub fn with_defaults(initial_lr: F) -> Result<Self> {
        Self::new(
            initial_lr,
            F::cast_from(0.999),
            initial_lr / F::cast_from(100.0),
        )
    }

    pub fn lr_at(&self, t: u64) -> F {
        let decayed = self.initial_lr * self.decay_rate.powf(F::cast_from(t as f64));
        decayed.max(self.floor_lr)
    }
}

/// Split of a batch between the line operator and gradient variation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorMix<F: Scalar> {
    pub ga_fraction: F,
}

impl<F: Scalar> OperatorMix<F> {
    pub fn new(ga_fraction: F) -> Result<Self> {
        if !ga_fraction.is_finite() || ga_fraction < F::zero() || ga_fraction > F::one() {
            return Err(Error::config("ga_fraction must lie in [0, 1]"));
        }
        Ok(OperatorMix { ga_fraction })
    }

    /// Number of offspring produced by the line operator; the remainder use
    /// gradient variation. Rounding favors the line operator on odd splits.
    pub fn isoline_count(&self, batch: usize) -> usize {
        let n = (self.ga_fraction.as_f64() * batch as f64).round() as usize;
        n.min(batch)
    }
}

impl<F: Scalar> Default for OperatorMix<F> {
    fn default() -> Self {
        OperatorMix {
            ga_fraction: F::cast_from(0.5),
        }
    }
}

/// Where parents are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParentSource {
    /// Only the best slot of each occupied cell (the default).
    Level1,
    /// Every occupied slot, all levels.
    AllLevels,
}

/// Draws `n` parent decision parts uniformly with replacement.
pub fn select_parents<F: Scalar>(
    archive: &DeepDecisionArchive<F>,
    n: usize,
    source: ParentSource,
    rng: &mut RngStream,
) -> Result<Vec<ParamVector<F>>> {
    let pool = match source {
        ParentSource::Level1 => archive.level1_slots(),
        ParentSource::AllLevels => archive.all_slots(),
    };
    if pool.is_empty() {
        return Err(Error::config("cannot select parents from an empty archive"));
    }
    Ok((0..n)
        .map(|_| pool[rng.index(pool.len())].decision.clone())
        .collect())
}

/// Hill-climbs a decision part along the task's analytic fitness gradient,
/// keeping the representation fixed.
///
/// If a step would produce a non-finite value the walk stops and the last
/// finite iterate is returned.
pub fn gradient_variation<F: Scalar>(
    task: &dyn Task<F>,
    rep: &ParamVector<F>,
    start: &ParamVector<F>,
    steps: usize,
    step_size: F,
) -> Result<ParamVector<F>> {
    if !task.differentiable() {
        return Err(Error::config(format!(
            "gradient variation needs a differentiable task, {} is not",
            task.name()
        )));
    }
    let mut current = start.clone();
    for _ in 0..steps {
        let grad = task.gradient(rep, &current, Part::Decision)?;
        match current.add_scaled(&grad, step_size) {
            Ok(next) => current = next,
            Err(_) => {
                log::warn!("gradient step produced a non-finite value; stopping early");
                break;
            }
        }
    }
    Ok(current)
}
