//! Benchmark tasks: deterministic, cheap, and (where stated) analytically
//! differentiable.
//!
//! A task owns the genome layout, the behavior-space bounds, and a fitness
//! offset large enough that `fitness + offset >= 0` for every reachable
//! fitness. Decomposed tasks evaluate `(representation, decision)` pairs;
//! direct tasks expect an empty representation and treat the decision vector
//! as the whole genome.

mod arm;
mod neural_arm;
mod quadratic;
mod rastrigin;

pub mod fd;

pub use arm::ArmTask;
pub use neural_arm::NeuralArmTask;
pub use quadratic::{DecomposedQuadratic, DirectQuadratic};
pub use rastrigin::RastriginProjTask;

use crate::behavior::EvalResult;
use crate::error::{Error, Result};
use crate::params::{total_params, LayerShape, ParamVector};
use crate::rng::RngStream;
use crate::scalar::Scalar;

/// How a task's genome decomposes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenomeLayout {
    /// One flat vector, no shared part.
    Direct { dim: usize },
    /// Front layers are the shared representation, the rest the decision part.
    Decomposed {
        rep_shapes: Vec<LayerShape>,
        dec_shapes: Vec<LayerShape>,
    },
}

impl GenomeLayout {
    pub fn rep_len(&self) -> usize {
        match self {
            GenomeLayout::Direct { .. } => 0,
            GenomeLayout::Decomposed { rep_shapes, .. } => total_params(rep_shapes),
        }
    }

    pub fn dec_len(&self) -> usize {
        match self {
            GenomeLayout::Direct { dim } => *dim,
            GenomeLayout::Decomposed { dec_shapes, .. } => total_params(dec_shapes),
        }
    }

    pub fn full_len(&self) -> usize {
        self.rep_len() + self.dec_len()
    }

    pub fn is_decomposed(&self) -> bool {
        matches!(self, GenomeLayout::Decomposed { .. })
    }
}

/// Which part of a decomposed genome a gradient is taken with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Representation,
    Decision,
}

/// A deterministic optimization problem.
///
/// Evaluation is pure: equal parameters give bit-identical results.
pub trait Task<F: Scalar>: Send + Sync {
    fn name(&self) -> &str;

    fn layout(&self) -> &GenomeLayout;

    /// Behavior-space bounds, one `(lower, upper)` pair per descriptor
    /// dimension.
    fn grid_bounds(&self) -> (Vec<F>, Vec<F>);

    fn descriptor_dims(&self) -> usize {
        self.grid_bounds().0.len()
    }

    /// Offset making `fitness + offset` non-negative for every reachable
    /// fitness value.
    fn fitness_offset(&self) -> F;

    /// Whether analytic gradients are available.
    fn differentiable(&self) -> bool;

    fn evaluate(&self, rep: &ParamVector<F>, dec: &ParamVector<F>) -> Result<EvalResult<F>>;

    /// Analytic fitness gradient with respect to one genome part.
    fn gradient(&self, rep: &ParamVector<F>, dec: &ParamVector<F>, wrt: Part)
        -> Result<ParamVector<F>> {
        let _ = (rep, dec, wrt);
        Err(Error::config(format!(
            "task {} has no analytic gradient",
            self.name()
        )))
    }

    /// Draws a fresh representation part. Empty for direct tasks.
    fn init_representation(&self, rng: &mut RngStream) -> ParamVector<F>;

    /// Draws a fresh decision part (the whole genome for direct tasks).
    fn init_decision(&self, rng: &mut RngStream) -> ParamVector<F>;
}

/// Checks that the parts handed to a task match its layout.
pub(crate) fn check_part_lengths<F: Scalar>(
    task: &dyn Task<F>,
    rep: &ParamVector<F>,
    dec: &ParamVector<F>,
) -> Result<()> {
    let layout = task.layout();
    if rep.len() != layout.rep_len() || dec.len() != layout.dec_len() {
        return Err(Error::config(format!(
            "task {} expects parts of size {}+{}, got {}+{}",
            task.name(),
            layout.rep_len(),
            layout.dec_len(),
            rep.len(),
            dec.len()
        )));
    }
    Ok(())
}
