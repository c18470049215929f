//! Rastrigin task with a coordinate-projection descriptor.
//!
//! Fitness is the negated Rastrigin value of the search point after clipping
//! every coordinate to [-5.12, 5.12]; the descriptor is the first two clipped
//! coordinates. Highly multimodal, cheap, and handy for archive-dynamics
//! tests that should not depend on a network.

use crate::behavior::{BehaviorDescriptor, EvalResult};
use crate::error::{Error, Result};
use crate::params::ParamVector;
use crate::rng::RngStream;
use crate::scalar::Scalar;

use super::{check_part_lengths, GenomeLayout, Task};

const BOUND: f64 = 5.12;

pub struct RastriginProjTask {
    dim: usize,
    layout: GenomeLayout,
}

impl RastriginProjTask {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::config(
                "rastrigin projection needs at least two dimensions",
            ));
        }
        Ok(RastriginProjTask {
            dim,
            layout: GenomeLayout::Direct { dim },
        })
    }
}

impl<F: Scalar> Task<F> for RastriginProjTask {
    fn name(&self) -> &str {
        "rastrigin_proj"
    }

    fn layout(&self) -> &GenomeLayout {
        &self.layout
    }

    fn grid_bounds(&self) -> (Vec<F>, Vec<F>) {
        let b = F::cast_from(BOUND);
        (vec![-b; 2], vec![b; 2])
    }

    fn fitness_offset(&self) -> F {
        // Upper bound on the Rastrigin value over the clipped box:
        // each term is at most bound^2 + 20.
        F::cast_from(self.dim as f64 * (BOUND * BOUND + 20.0))
    }

    fn differentiable(&self) -> bool {
        false
    }

    fn evaluate(&self, rep: &ParamVector<F>, dec: &ParamVector<F>) -> Result<EvalResult<F>> {
        check_part_lengths(self, rep, dec)?;
        let b = F::cast_from(BOUND);
        let clipped: Vec<F> = dec.iter().map(|&v| v.max(-b).min(b)).collect();
        let ten = F::cast_from(10.0);
        let two_pi = F::cast_from(2.0 * std::f64::consts::PI);
        let value = clipped.iter().fold(F::zero(), |acc, &x| {
            acc + x * x - ten * (two_pi * x).cos() + ten
        });
        EvalResult::new(
            -value,
            BehaviorDescriptor::new(clipped[..2].to_vec())?,
        )
    }

    fn init_representation(&self, _rng: &mut RngStream) -> ParamVector<F> {
        ParamVector::empty()
    }

    fn init_decision(&self, rng: &mut RngStream) -> ParamVector<F> {
        let b = F::cast_from(BOUND);
        ParamVector::from_fn(self.dim, |_| rng.uniform_in(-b, b))
            .expect("uniform draws are finite")
    }
}
