//! Central-difference gradient oracle.
//!
//! Estimates fitness gradients purely through `Task::evaluate`, never through
//! a task's own `gradient`, so analytic derivatives can be checked against an
//! implementation that shares no code with them.

use crate::error::Result;
use crate::params::ParamVector;
use crate::scalar::Scalar;

use super::{Part, Task};

/// Central-difference estimate of the fitness gradient with respect to one
/// genome part. Error is O(h^2) for smooth fitness.
pub fn fd_gradient<F: Scalar>(
    task: &dyn Task<F>,
    rep: &ParamVector<F>,
    dec: &ParamVector<F>,
    wrt: Part,
    h: F,
) -> Result<ParamVector<F>> {
    let base = match wrt {
        Part::Representation => rep,
        Part::Decision => dec,
    };
    let mut grad = Vec::with_capacity(base.len());
    let two_h = h + h;
    for i in 0..base.len() {
        let mut plus = base.as_slice().to_vec();
        plus[i] = plus[i] + h;
        let mut minus = base.as_slice().to_vec();
        minus[i] = minus[i] - h;
        let plus = ParamVector::new(plus)?;
        let minus = ParamVector::new(minus)?;
        let (f_plus, f_minus) = match wrt {
            Part::Representation => (
                task.evaluate(&plus, dec)?.fitness,
                task.evaluate(&minus, dec)?.fitness,
            ),
            Part::Decision => (
                task.evaluate(rep, &plus)?.fitness,
                task.evaluate(rep, &minus)?.fitness,
            ),
        };
        grad.push((f_plus - f_minus) / two_h);
    }
    ParamVector::new(grad)
}

/// Outcome of comparing an analytic gradient against the oracle.
#[derive(Debug, Clone, Copy)]
pub struct GradCheck {
    /// Largest relative error among compared components.
    pub max_rel_err: f64,
    /// Index where the largest error occurred, if anything was compared.
    pub worst_index: Option<usize>,
    pub compared: usize,
    /// Components skipped because the analytic value was below the cutoff.
    pub skipped: usize,
}

/// Componentwise relative error |analytic - estimate| / |analytic|, skipping
/// components with |analytic| below `cutoff` where the ratio is meaningless.
pub fn compare_gradients<F: Scalar>(
    analytic: &ParamVector<F>,
    estimate: &ParamVector<F>,
    cutoff: f64,
) -> GradCheck {
    assert_eq!(analytic.len(), estimate.len(), "gradient lengths differ");
    let mut check = GradCheck {
        max_rel_err: 0.0,
        worst_index: None,
        compared: 0,
        skipped: 0,
    };
    for (i, (&a, &e)) in analytic.iter().zip(estimate.iter()).enumerate() {
        let a = a.as_f64();
        let e = e.as_f64();
        if a.abs() < cutoff {
            check.skipped += 1;
            continue;
        }
        check.compared += 1;
        let rel = (a - e).abs() / a.abs();
        if rel > check.max_rel_err {
            check.max_rel_err = rel;
            check.worst_index = Some(i);
        }
    }
    check
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::{BehaviorDescriptor, EvalResult};
    use crate::rng::{RngStream, StreamId};
    use crate::tasks::{DecomposedQuadratic, GenomeLayout, NeuralArmTask};

    /// Fitness ignores the genome entirely.
    struct FlatTask {
        layout: GenomeLayout,
    }

    impl Task<f64> for FlatTask {
        fn name(&self) -> &str {
            "flat"
        }
        fn layout(&self) -> &GenomeLayout {
            &self.layout
        }
        fn grid_bounds(&self) -> (Vec<f64>, Vec<f64>) {
            (vec![0.0; 2], vec![1.0; 2])
        }
        fn fitness_offset(&self) -> f64 {
            0.0
        }
        fn differentiable(&self) -> bool {
            false
        }
        fn evaluate(&self, _: &ParamVector<f64>, _: &ParamVector<f64>) -> Result<EvalResult<f64>> {
            EvalResult::new(3.5, BehaviorDescriptor::new(vec![0.5, 0.5])?)
        }
        fn init_representation(&self, _: &mut RngStream) -> ParamVector<f64> {
            ParamVector::empty()
        }
        fn init_decision(&self, _: &mut RngStream) -> ParamVector<f64> {
            ParamVector::zeros(3)
        }
    }

    #[test]
    fn quadratic_gradient_is_recovered() {
        let task = DecomposedQuadratic::new(
            ParamVector::new(vec![0.5, -1.0]).unwrap(),
            ParamVector::new(vec![2.0, 0.0, 1.0]).unwrap(),
        )
        .unwrap();
        let rep = ParamVector::new(vec![1.0, 1.0]).unwrap();
        let dec = ParamVector::new(vec![0.0, 0.25, -0.5]).unwrap();
        for wrt in [Part::Representation, Part::Decision] {
            let fd = fd_gradient(&task, &rep, &dec, wrt, 1e-5).unwrap();
            let exact = task.gradient(&rep, &dec, wrt).unwrap();
            let check = compare_gradients(&exact, &fd, 1e-8);
            assert!(check.compared > 0);
            assert!(check.max_rel_err < 1e-8, "rel err {}", check.max_rel_err);
        }
    }

    #[test]
    fn constant_fitness_yields_zero_gradient() {
        let task = FlatTask {
            layout: GenomeLayout::Direct { dim: 3 },
        };
        let rep = ParamVector::empty();
        let dec = ParamVector::zeros(3);
        let fd = fd_gradient(&task, &rep, &dec, Part::Decision, 1e-5).unwrap();
        assert!(fd.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn neural_arm_backprop_matches_central_differences() {
        let mut task_rng = RngStream::new(21, StreamId::Task);
        let task = NeuralArmTask::<f64>::new(4, 5, &[8, 7], 2, &mut task_rng).unwrap();
        let mut rng = RngStream::new(22, StreamId::Init);
        for round in 0..10 {
            let rep = task.init_representation(&mut rng);
            let dec = task.init_decision(&mut rng);
            for wrt in [Part::Representation, Part::Decision] {
                let exact = task.gradient(&rep, &dec, wrt).unwrap();
                let fd = fd_gradient(&task, &rep, &dec, wrt, 1e-5).unwrap();
                let check = compare_gradients(&exact, &fd, 1e-8);
                assert!(check.compared > 0, "round {round}: nothing compared");
                assert!(
                    check.max_rel_err < 1e-4,
                    "round {round} {wrt:?}: rel err {} at {:?}",
                    check.max_rel_err,
                    check.worst_index
                );
            }
        }
    }

    #[test]
    fn comparison_skips_tiny_analytic_components() {
        let analytic = ParamVector::new(vec![1e-12, 2.0]).unwrap();
        let estimate = ParamVector::new(vec![5.0, 2.0]).unwrap();
        let check = compare_gradients(&analytic, &estimate, 1e-8);
        assert_eq!(check.skipped, 1);
        assert_eq!(check.compared, 1);
        assert_eq!(check.max_rel_err, 0.0);
    }
}
