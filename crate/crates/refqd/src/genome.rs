//! Decomposed genomes and the shared forward pass.
//!
//! A genome is a multilayer perceptron stored as two flat parameter vectors:
//! a representation part (the front layers, shared across an archive) and a
//! decision part (the remaining layers, one per stored solution). `compose`
//! runs the network: tanh after every hidden layer, raw output from the last
//! layer. Any output squashing is the evaluating task's business.

use crate::error::{Error, Result};
use crate::params::{total_params, LayerShape, ParamVector};
use crate::rng::RngStream;
use crate::scalar::Scalar;

/// A network split into a shared representation part and a per-solution
/// decision part. `concat(representation, decision)` is exactly the full
/// parameter vector the split was made from.
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposedGenome<F: Scalar> {
    pub representation: ParamVector<F>,
    pub decision: ParamVector<F>,
    pub rep_shapes: Vec<LayerShape>,
    pub dec_shapes: Vec<LayerShape>,
}

impl<F: Scalar> DecomposedGenome<F> {
    pub fn new(
        representation: ParamVector<F>,
        decision: ParamVector<F>,
        rep_shapes: Vec<LayerShape>,
        dec_shapes: Vec<LayerShape>,
    ) -> Result<Self> {
        validate_chain(&rep_shapes, &dec_shapes)?;
        if representation.len() != total_params(&rep_shapes) {
            return Err(Error::config(format!(
                "representation holds {} parameters but its layers need {}",
                representation.len(),
                total_params(&rep_shapes)
            )));
        }
        if decision.len() != total_params(&dec_shapes) {
            return Err(Error::config(format!(
                "decision part holds {} parameters but its layers need {}",
                decision.len(),
                total_params(&dec_shapes)
            )));
        }
        Ok(DecomposedGenome {
            representation,
            decision,
            rep_shapes,
            dec_shapes,
        })
    }

    pub fn full(&self) -> ParamVector<F> {
        self.representation.concat(&self.decision)
    }
}

/// Checks that consecutive layers have matching widths and that at least one
/// layer exists overall.
fn validate_chain(rep_shapes: &[LayerShape], dec_shapes: &[LayerShape]) -> Result<()> {
    let all: Vec<LayerShape> = rep_shapes.iter().chain(dec_shapes).copied().collect();
    if all.is_empty() {
        return Err(Error::config("genome needs at least one layer"));
    }
    for w in all.windows(2) {
        if w[0].output_width != w[1].input_width {
            return Err(Error::config(format!(
                "layer widths do not chain: {} outputs feed a layer expecting {} inputs",
                w[0].output_width, w[1].input_width
            )));
        }
    }
    Ok(())
}

/// Splits a flat parameter vector into a decomposed genome: layers
/// `[0, split_index)` become the representation, the rest the decision part.
pub fn split_genome<F: Scalar>(
    full: &ParamVector<F>,
    shapes: &[LayerShape],
    split_index: usize,
) -> Result<DecomposedGenome<F>> {
    if split_index > shapes.len() {
        return Err(Error::config(format!(
            "split index {split_index} out of range for {} layers",
            shapes.len()
        )));
    }
    if full.len() != total_params(shapes) {
        return Err(Error::config(format!(
            "genome holds {} parameters but its layers need {}",
            full.len(),
            total_params(shapes)
        )));
    }
    let rep_shapes = shapes[..split_index].to_vec();
    let dec_shapes = shapes[split_index..].to_vec();
    let (rep, dec) = full.split_at(total_params(&rep_shapes))?;
    DecomposedGenome::new(rep, dec, rep_shapes, dec_shapes)
}

/// Runs the network on `input` and returns the raw output layer values.
pub fn compose<F: Scalar>(genome: &DecomposedGenome<F>, input: &[F]) -> Result<Vec<F>> {
    let trace = forward_trace(genome, input)?;
    Ok(trace.into_iter().next_back().expect("at least one layer"))
}

/// Runs the network and keeps every layer's post-activation output
/// (raw for the final layer). Needed by analytic gradients.
pub fn forward_trace<F: Scalar>(genome: &DecomposedGenome<F>, input: &[F]) -> Result<Vec<Vec<F>>> {
    let shapes: Vec<LayerShape> = genome
        .rep_shapes
        .iter()
        .chain(&genome.dec_shapes)
        .copied()
        .collect();
    let first = shapes.first().ok_or_else(|| Error::config("empty genome"))?;
    if input.len() != first.input_width {
        return Err(Error::config(format!(
            "input has {} entries but the first layer expects {}",
            input.len(),
            first.input_width
        )));
    }

    let rep_len = genome.representation.len();
    let mut outputs = Vec::with_capacity(shapes.len());
    let mut current: Vec<F> = input.to_vec();
    let mut offset = 0usize;
    for (i, shape) in shapes.iter().enumerate() {
        let count = shape.param_count();
        let params = if offset + count <= rep_len {
            &genome.representation.as_slice()[offset..offset + count]
        } else {
            &genome.decision.as_slice()[offset - rep_len..offset - rep_len + count]
        };
        let last = i + 1 == shapes.len();
        let mut out = layer_forward(*shape, params, &current);
        if !last {
            for v in &mut out {
                *v = v.tanh();
            }
        }
        offset += count;
        outputs.push(out.clone());
        current = out;
    }
    Ok(outputs)
}

/// One dense layer: row-major weights, then bias.
pub(crate) fn layer_forward<F: Scalar>(shape: LayerShape, params: &[F], input: &[F]) -> Vec<F> {
    debug_assert_eq!(params.len(), shape.param_count());
    debug_assert_eq!(input.len(), shape.input_width);
    let n_w = shape.input_width * shape.output_width;
    let mut out = Vec::with_capacity(shape.output_width);
    for o in 0..shape.output_width {
        let row = &params[o * shape.input_width..(o + 1) * shape.input_width];
        let mut acc = F::zero();
        for (w, x) in row.iter().zip(input) {
            acc = acc + *w * *x;
        }
        if shape.has_bias {
            acc = acc + params[n_w + o];
        }
        out.push(acc);
    }
    out
}

/// Draws layer parameters uniformly in `[-1/sqrt(fan_in), 1/sqrt(fan_in))`
/// per layer, weights first, bias last.
pub fn init_layer_params<F: Scalar>(shapes: &[LayerShape], rng: &mut RngStream) -> ParamVector<F> {
    let mut values = Vec::with_capacity(total_params(shapes));
    for shape in shapes {
        let bound = F::one() / F::cast_from(shape.input_width as f64).sqrt();
        for _ in 0..shape.param_count() {
            values.push(rng.uniform_in(-bound, bound));
        }
    }
    ParamVector::new(values).expect("uniform draws are finite")
}
