//! Planar robot arm with equal-length links.
//!
//! Raw genome entries are squashed to joint angles `theta_i = pi * tanh(raw_i)`.
//! The descriptor is the end-effector position under cumulative-angle forward
//! kinematics with link lengths summing to one, so it always lies in the unit
//! square `[-1, 1]^2`. Fitness is the negated standard deviation of the
//! squashed angles: arms that bend evenly score best, and the offset `pi`
//! makes every reachable fitness non-negative after shifting.

use crate::behavior::{BehaviorDescriptor, EvalResult};
use crate::error::Result;
use crate::params::ParamVector;
use crate::rng::RngStream;
use crate::scalar::Scalar;

use super::{check_part_lengths, GenomeLayout, Task};

/// Squash raw entries into joint angles in `(-pi, pi)`.
pub(crate) fn angles_from_raw<F: Scalar>(raw: &[F]) -> Vec<F> {
    let pi = F::cast_from(std::f64::consts::PI);
    raw.iter().map(|&r| pi * r.tanh()).collect()
}

/// End-effector position for equal links summing to length one.
pub(crate) fn end_effector<F: Scalar>(angles: &[F]) -> (F, F) {
    let link = F::one() / F::cast_from(angles.len() as f64);
    let mut heading = F::zero();
    let mut x = F::zero();
    let mut y = F::zero();
    for &a in angles {
        heading = heading + a;
        x = x + link * heading.cos();
        y = y + link * heading.sin();
    }
    (x, y)
}

/// Negated population standard deviation of the angles.
pub(crate) fn angle_fitness<F: Scalar>(angles: &[F]) -> F {
    let n = F::cast_from(angles.len() as f64);
    let mean = angles.iter().fold(F::zero(), |acc, &a| acc + a) / n;
    let var = angles
        .iter()
        .fold(F::zero(), |acc, &a| acc + (a - mean) * (a - mean))
        / n;
    -var.sqrt()
}

/// Direct-genome arm task: one raw entry per joint.
pub struct ArmTask {
    joints: usize,
    layout: GenomeLayout,
}

impl ArmTask {
    pub fn new(joints: usize) -> Result<Self> {
        if joints < 2 {
            return Err(crate::error::Error::config(
                "the arm needs at least two joints",
            ));
        }
        Ok(ArmTask {
            joints,
            layout: GenomeLayout::Direct { dim: joints },
        })
    }

    pub fn joints(&self) -> usize {
        self.joints
    }
}

impl<F: Scalar> Task<F> for ArmTask {
    fn name(&self) -> &str {
        "arm"
    }

    fn layout(&self) -> &GenomeLayout {
        &self.layout
    }

    fn grid_bounds(&self) -> (Vec<F>, Vec<F>) {
        (vec![-F::one(); 2], vec![F::one(); 2])
    }

    fn fitness_offset(&self) -> F {
        F::cast_from(std::f64::consts::PI)
    }

    fn differentiable(&self) -> bool {
        false
    }

    fn evaluate(&self, rep: &ParamVector<F>, dec: &ParamVector<F>) -> Result<EvalResult<F>> {
        check_part_lengths(self, rep, dec)?;
        let angles = angles_from_raw(dec.as_slice());
        let (x, y) = end_effector(&angles);
        EvalResult::new(angle_fitness(&angles), BehaviorDescriptor::new(vec![x, y])?)
    }

    fn init_representation(&self, _rng: &mut RngStream) -> ParamVector<F> {
        ParamVector::empty()
    }

    fn init_decision(&self, rng: &mut RngStream) -> ParamVector<F> {
        ParamVector::from_fn(self.joints, |_| rng.uniform_in(-F::one(), F::one()))
            .expect("uniform draws are finite")
    }
}
