//! Quadratic bowls used as surrogates in gradient and ascent tests.
//!
//! Fitness is the negated squared distance to a target, so the analytic
//! gradient is trivial to verify by hand. These tasks exist for testing and
//! are not selectable from config files.

use crate::behavior::{BehaviorDescriptor, EvalResult};
use crate::error::Result;
use crate::params::{LayerShape, ParamVector};
use crate::rng::RngStream;
use crate::scalar::Scalar;

use super::{check_part_lengths, GenomeLayout, Part, Task};

fn clip_unit<F: Scalar>(v: F) -> F {
    v.max(-F::one()).min(F::one())
}

fn first_two_clipped<F: Scalar>(v: &ParamVector<F>) -> Result<BehaviorDescriptor<F>> {
    BehaviorDescriptor::new(vec![clip_unit(v[0]), clip_unit(v[1])])
}

fn neg_sq_dist<F: Scalar>(v: &ParamVector<F>, target: &ParamVector<F>) -> F {
    -v.iter()
        .zip(target.iter())
        .fold(F::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
}

/// `fitness = -||x - target||^2` over a single flat genome.
pub struct DirectQuadratic<F: Scalar> {
    target: ParamVector<F>,
    layout: GenomeLayout,
}

impl<F: Scalar> DirectQuadratic<F> {
    /// Target must have at least two entries (the descriptor uses the first
    /// two coordinates).
    pub fn new(target: ParamVector<F>) -> Result<Self> {
        assert!(target.len() >= 2, "quadratic target needs >= 2 entries");
        let layout = GenomeLayout::Direct { dim: target.len() };
        Ok(DirectQuadratic { target, layout })
    }
}

impl<F: Scalar> Task<F> for DirectQuadratic<F> {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn layout(&self) -> &GenomeLayout {
        &self.layout
    }

    fn grid_bounds(&self) -> (Vec<F>, Vec<F>) {
        (vec![-F::one(); 2], vec![F::one(); 2])
    }

    fn fitness_offset(&self) -> F {
        F::zero()
    }

    fn differentiable(&self) -> bool {
        true
    }

    fn evaluate(&self, rep: &ParamVector<F>, dec: &ParamVector<F>) -> Result<EvalResult<F>> {
        check_part_lengths(self, rep, dec)?;
        EvalResult::new(neg_sq_dist(dec, &self.target), first_two_clipped(dec)?)
    }

    fn gradient(
        &self,
        rep: &ParamVector<F>,
        dec: &ParamVector<F>,
        wrt: Part,
    ) -> Result<ParamVector<F>> {
        check_part_lengths(self, rep, dec)?;
        match wrt {
            Part::Representation => Ok(ParamVector::empty()),
            Part::Decision => ParamVector::from_fn(dec.len(), |i| {
                -(F::one() + F::one()) * (dec[i] - self.target[i])
            }),
        }
    }

    fn init_representation(&self, _rng: &mut RngStream) -> ParamVector<F> {
        ParamVector::empty()
    }

    fn init_decision(&self, rng: &mut RngStream) -> ParamVector<F> {
        ParamVector::from_fn(self.target.len(), |_| rng.uniform_in(-F::one(), F::one()))
            .expect("uniform draws are finite")
    }
}

/// `fitness = -||rep - rep_target||^2 - ||dec - dec_target||^2` over a
/// decomposed genome. The descriptor is the first two decision coordinates.
pub struct DecomposedQuadratic<F: Scalar> {
    rep_target: ParamVector<F>,
    dec_target: ParamVector<F>,
    layout: GenomeLayout,
}

impl<F: Scalar> DecomposedQuadratic<F> {
    pub fn new(rep_target: ParamVector<F>, dec_target: ParamVector<F>) -> Result<Self> {
        assert!(!rep_target.is_empty(), "representation target is empty");
        assert!(dec_target.len() >= 2, "decision target needs >= 2 entries");
        // The shape metadata only records part sizes; this task never
        // composes a network.
        let layout = GenomeLayout::Decomposed {
            rep_shapes: vec![LayerShape::new(rep_target.len(), 1, false)?],
            dec_shapes: vec![LayerShape::new(1, dec_target.len(), false)?],
        };
        Ok(DecomposedQuadratic {
            rep_target,
            dec_target,
            layout,
        })
    }
}

impl<F: Scalar> Task<F> for DecomposedQuadratic<F> {
    fn name(&self) -> &str {
        "quadratic_decomposed"
    }

    fn layout(&self) -> &GenomeLayout {
        &self.layout
    }

    fn grid_bounds(&self) -> (Vec<F>, Vec<F>) {
        (vec![-F::one(); 2], vec![F::one(); 2])
    }

    fn fitness_offset(&self) -> F {
        F::zero()
    }

    fn differentiable(&self) -> bool {
        true
    }

    fn evaluate(&self, rep: &ParamVector<F>, dec: &ParamVector<F>) -> Result<EvalResult<F>> {
        check_part_lengths(self, rep, dec)?;
        let fitness = neg_sq_dist(rep, &self.rep_target) + neg_sq_dist(dec, &self.dec_target);
        EvalResult::new(fitness, first_two_clipped(dec)?)
    }

    fn gradient(
        &self,
        rep: &ParamVector<F>,
        dec: &ParamVector<F>,
        wrt: Part,
    ) -> Result<ParamVector<F>> {
        check_part_lengths(self, rep, dec)?;
        let two = F::one() + F::one();
        match wrt {
            Part::Representation => {
                ParamVector::from_fn(rep.len(), |i| -two * (rep[i] - self.rep_target[i]))
            }
            Part::Decision => {
                ParamVector::from_fn(dec.len(), |i| -two * (dec[i] - self.dec_target[i]))
            }
        }
    }

    fn init_representation(&self, rng: &mut RngStream) -> ParamVector<F> {
        ParamVector::from_fn(self.rep_target.len(), |_| rng.uniform_in(-F::one(), F::one()))
            .expect("uniform draws are finite")
    }

    fn init_decision(&self, rng: &mut RngStream) -> ParamVector<F> {
        ParamVector::from_fn(self.dec_target.len(), |_| rng.uniform_in(-F::one(), F::one()))
            .expect("uniform draws are finite")
    }
}
