//! Arm controlled by a multilayer perceptron.
//!
//! The network maps a fixed context vector (drawn once per task instance) to
//! raw joint outputs; angles, descriptor, and fitness then follow the plain
//! arm task. Because the context never changes, evaluation is a pure function
//! of the parameters, and the fitness gradient with respect to either genome
//! part is available in closed form via backpropagation.

use crate::behavior::{BehaviorDescriptor, EvalResult};
use crate::error::{Error, Result};
use crate::genome::{forward_trace, DecomposedGenome};
use crate::params::{LayerShape, ParamVector};
use crate::rng::RngStream;
use crate::scalar::Scalar;

use super::arm::{angle_fitness, angles_from_raw, end_effector};
use super::{check_part_lengths, GenomeLayout, Part, Task};

pub struct NeuralArmTask<F: Scalar> {
    context: Vec<F>,
    shapes: Vec<LayerShape>,
    split_index: usize,
    layout: GenomeLayout,
}

impl<F: Scalar> NeuralArmTask<F> {
    /// Builds the task and draws its context vector from `rng`.
    ///
    /// The network is `context_dim -> hidden[0] -> ... -> joints`, every
    /// layer with bias and tanh between layers. Layers before `split_index`
    /// form the representation part.
    pub fn new(
        joints: usize,
        context_dim: usize,
        hidden: &[usize],
        split_index: usize,
        rng: &mut RngStream,
    ) -> Result<Self> {
        if joints < 2 {
            return Err(Error::config("the arm needs at least two joints"));
        }
        if context_dim == 0 {
            return Err(Error::config("context dimension must be positive"));
        }
        let mut shapes = Vec::with_capacity(hidden.len() + 1);
        let mut input = context_dim;
        for &width in hidden {
            shapes.push(LayerShape::new(input, width, true)?);
            input = width;
        }
        shapes.push(LayerShape::new(input, joints, true)?);
        if split_index > shapes.len() {
            return Err(Error::config(format!(
                "split index {split_index} out of range for {} layers",
                shapes.len()
            )));
        }
        let context: Vec<F> = (0..context_dim)
            .map(|_| rng.uniform_in(-F::one(), F::one()))
            .collect();
        let layout = GenomeLayout::Decomposed {
            rep_shapes: shapes[..split_index].to_vec(),
            dec_shapes: shapes[split_index..].to_vec(),
        };
        Ok(NeuralArmTask {
            context,
            shapes,
            split_index,
            layout,
        })
    }

    /// Full-scale network: 8 joints, two hidden layers of 256, context 16,
    /// and the last layer as the decision part.
    pub fn with_defaults(rng: &mut RngStream) -> Result<Self> {
        Self::new(8, 16, &[256, 256], 2, rng)
    }

    pub fn context(&self) -> &[F] {
        &self.context
    }

    fn genome(&self, rep: &ParamVector<F>, dec: &ParamVector<F>) -> Result<DecomposedGenome<F>> {
        DecomposedGenome::new(
            rep.clone(),
            dec.clone(),
            self.shapes[..self.split_index].to_vec(),
            self.shapes[self.split_index..].to_vec(),
        )
    }
}

impl<F: Scalar> Task<F> for NeuralArmTask<F> {
    fn name(&self) -> &str {
        "neural_arm"
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
        true
    }

    fn evaluate(&self, rep: &ParamVector<F>, dec: &ParamVector<F>) -> Result<EvalResult<F>> {
        check_part_lengths(self, rep, dec)?;
        let genome = self.genome(rep, dec)?;
        let trace = forward_trace(&genome, &self.context)?;
        let out = trace.last().expect("network has layers");
        let angles = angles_from_raw(out);
        let (x, y) = end_effector(&angles);
        EvalResult::new(angle_fitness(&angles), BehaviorDescriptor::new(vec![x, y])?)
    }

    fn gradient(
        &self,
        rep: &ParamVector<F>,
        dec: &ParamVector<F>,
        wrt: Part,
    ) -> Result<ParamVector<F>> {
        check_part_lengths(self, rep, dec)?;
        let genome = self.genome(rep, dec)?;
        let trace = forward_trace(&genome, &self.context)?;
        let full_grad = backprop_fitness(&self.shapes, rep, dec, &self.context, &trace);
        let flat = ParamVector::new(full_grad)?;
        let (rep_grad, dec_grad) = flat.split_at(rep.len())?;
        Ok(match wrt {
            Part::Representation => rep_grad,
            Part::Decision => dec_grad,
        })
    }

    fn init_representation(&self, rng: &mut RngStream) -> ParamVector<F> {
        crate::genome::init_layer_params(&self.shapes[..self.split_index], rng)
    }

    fn init_decision(&self, rng: &mut RngStream) -> ParamVector<F> {
        crate::genome::init_layer_params(&self.shapes[self.split_index..], rng)
    }
}

/// Backpropagates the arm fitness through angle squashing and every layer,
/// returning the gradient over the full flat parameter vector.
///
/// At the symmetric point (zero angle deviation) the standard deviation has
/// no derivative; the gradient is defined as zero there, which agrees with
/// central differences by symmetry.
fn backprop_fitness<F: Scalar>(
    shapes: &[LayerShape],
    rep: &ParamVector<F>,
    dec: &ParamVector<F>,
    context: &[F],
    trace: &[Vec<F>],
) -> Vec<F> {
    let pi = F::cast_from(std::f64::consts::PI);
    let out = trace.last().expect("network has layers");
    let n = F::cast_from(out.len() as f64);

    let tanh_out: Vec<F> = out.iter().map(|&o| o.tanh()).collect();
    let angles: Vec<F> = tanh_out.iter().map(|&t| pi * t).collect();
    let mean = angles.iter().fold(F::zero(), |acc, &a| acc + a) / n;
    let var = angles
        .iter()
        .fold(F::zero(), |acc, &a| acc + (a - mean) * (a - mean))
        / n;
    let std = var.sqrt();

    // delta = d fitness / d raw_output
    let mut delta: Vec<F> = if std == F::zero() {
        vec![F::zero(); out.len()]
    } else {
        angles
            .iter()
            .zip(&tanh_out)
            .map(|(&a, &t)| {
                let d_fit_d_angle = -(a - mean) / (n * std);
                d_fit_d_angle * pi * (F::one() - t * t)
            })
            .collect()
    };

    let rep_len = rep.len();
    let total: usize = shapes.iter().map(LayerShape::param_count).sum();
    let mut grad = vec![F::zero(); total];

    // Layer parameter slices in forward order.
    let mut offsets = Vec::with_capacity(shapes.len());
    let mut offset = 0usize;
    for shape in shapes {
        offsets.push(offset);
        offset += shape.param_count();
    }

    for l in (0..shapes.len()).rev() {
        let shape = shapes[l];
        let input: &[F] = if l == 0 { context } else { &trace[l - 1] };
        let base = offsets[l];
        let params: &[F] = if base + shape.param_count() <= rep_len {
            &rep.as_slice()[base..base + shape.param_count()]
        } else {
            &dec.as_slice()[base - rep_len..base - rep_len + shape.param_count()]
        };
        let n_w = shape.input_width * shape.output_width;
        for o in 0..shape.output_width {
            let row = base + o * shape.input_width;
            for i in 0..shape.input_width {
                grad[row + i] = delta[o] * input[i];
            }
            if shape.has_bias {
                grad[base + n_w + o] = delta[o];
            }
        }
        if l > 0 {
            // Push the signal through the weights and the previous tanh.
            let mut prev = vec![F::zero(); shape.input_width];
            for (i, p) in prev.iter_mut().enumerate() {
                let mut acc = F::zero();
                for o in 0..shape.output_width {
                    acc = acc + params[o * shape.input_width + i] * delta[o];
                }
                let z = trace[l - 1][i];
                *p = acc * (F::one() - z * z);
            }
            delta = prev;
        }
    }
    grad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::compose;
    use crate::rng::StreamId;

    fn small_task() -> NeuralArmTask<f64> {
        let mut rng = RngStream::new(77, StreamId::Task);
        NeuralArmTask::new(4, 5, &[8, 7], 2, &mut rng).unwrap()
    }

    fn random_parts(task: &NeuralArmTask<f64>, seed: u64) -> (ParamVector<f64>, ParamVector<f64>) {
        let mut rng = RngStream::new(seed, StreamId::Init);
        (task.init_representation(&mut rng), task.init_decision(&mut rng))
    }

    #[test]
    fn evaluation_chains_network_and_kinematics() {
        let task = small_task();
        let (rep, dec) = random_parts(&task, 1);
        let result = task.evaluate(&rep, &dec).unwrap();

        let genome = task.genome(&rep, &dec).unwrap();
        let raw = compose(&genome, task.context()).unwrap();
        let angles = angles_from_raw(&raw);
        let (x, y) = end_effector(&angles);
        assert_eq!(result.descriptor.coords(), &[x, y]);
        assert_eq!(result.fitness, angle_fitness(&angles));
    }

    #[test]
    fn same_seed_same_context_same_result() {
        let mut r1 = RngStream::new(5, StreamId::Task);
        let mut r2 = RngStream::new(5, StreamId::Task);
        let t1 = NeuralArmTask::<f64>::new(3, 4, &[6], 1, &mut r1).unwrap();
        let t2 = NeuralArmTask::<f64>::new(3, 4, &[6], 1, &mut r2).unwrap();
        assert_eq!(t1.context(), t2.context());
        let (rep, dec) = random_parts(&t1, 9);
        assert_eq!(t1.evaluate(&rep, &dec).unwrap(), t2.evaluate(&rep, &dec).unwrap());
    }

    #[test]
    fn part_sizes_follow_the_split() {
        let task = small_task();
        // 5->8 (48) + 8->7 (63) shared, 7->4 (32) decision.
        assert_eq!(task.layout().rep_len(), 48 + 63);
        assert_eq!(task.layout().dec_len(), 32);
        let (rep, dec) = random_parts(&task, 2);
        assert_eq!(rep.len(), 111);
        assert_eq!(dec.len(), 32);
    }

    #[test]
    fn zero_decision_part_kills_the_representation_gradient() {
        let mut rng = RngStream::new(13, StreamId::Task);
        // No-bias output layer via a custom build: use a zeroed decision on
        // the standard task; the biased output is zero too, so the angles sit
        // at the symmetric point and the gradient is zero by convention.
        let task = NeuralArmTask::<f64>::new(4, 5, &[8], 1, &mut rng).unwrap();
        let (rep, _) = random_parts(&task, 3);
        let dec = ParamVector::zeros(task.layout().dec_len());
        let g = task.gradient(&rep, &dec, Part::Representation).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gradients_have_matching_lengths_and_are_finite() {
        let task = small_task();
        let (rep, dec) = random_parts(&task, 4);
        let gr = task.gradient(&rep, &dec, Part::Representation).unwrap();
        let gd = task.gradient(&rep, &dec, Part::Decision).unwrap();
        assert_eq!(gr.len(), rep.len());
        assert_eq!(gd.len(), dec.len());
        assert!(gr.iter().chain(gd.iter()).all(|v| v.is_finite()));
        // Random genomes are not at a critical point.
        assert!(gd.norm() > 0.0);
    }
}
