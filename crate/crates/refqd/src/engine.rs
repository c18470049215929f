//! The generation loop and its baseline variants.
//!
//! One run owns a single shared representation vector, an optional greedy
//! decision part, and the multi-level archive. Every generation:
//!
//! 1. train the representation (and the greedy part) on decision parts
//!    sampled from level 1, when the algorithm shares a representation and
//!    the task has analytic gradients;
//! 2. select parents and produce a batch of offspring, mixing the line
//!    operator with gradient ascent on the decision part;
//! 3. evaluate offspring (plus the greedy part) and insert them;
//! 4. when the post-increment generation counter divides the re-evaluation
//!    period, pull the top levels, re-score them against the current
//!    representation, and insert them back.
//!
//! Baselines reuse the same loop with knobs pinned: the vanilla variants
//! disable levels, re-evaluation, or decay; `classic_me` and `pga_lite`
//! evolve full genomes with no sharing at all.

use crate::archive::{Candidate, DeepDecisionArchive, QDMetrics};
use crate::behavior::EvalResult;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::io::RunRecord;
use crate::params::ParamVector;
use crate::rng::{RngStream, StreamId};
use crate::scalar::Scalar;
use crate::tasks::{Part, Task};
use crate::variation::{
    gradient_variation, isoline_dd, select_parents, IsoLineParams, LrSchedule, OperatorMix,
    ParentSource,
};

/// Which variant of the loop to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Shared representation, K-level archive, periodic top-k re-evaluation,
    /// learning-rate decay.
    RefQd,
    /// Shared representation with none of the mitigations: one level, no
    /// re-evaluation, constant learning rate.
    VanillaRefQd,
    /// Vanilla plus periodic re-survivor selection: one level, full
    /// re-evaluation every period, constant learning rate.
    VanillaRefQdReSs,
    /// Full genomes, one level, line operator only.
    ClassicMe,
    /// Full genomes, one level, line operator mixed with gradient ascent.
    PgaLite,
}

impl Algorithm {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "refqd" => Ok(Algorithm::RefQd),
            "vanilla_refqd" => Ok(Algorithm::VanillaRefQd),
            "vanilla_refqd_ress" => Ok(Algorithm::VanillaRefQdReSs),
            "classic_me" => Ok(Algorithm::ClassicMe),
            "pga_lite" => Ok(Algorithm::PgaLite),
            other => Err(Error::config(format!(
                "unknown algorithm {other:?}; expected one of refqd, vanilla_refqd, \
                 vanilla_refqd_ress, classic_me, pga_lite"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::RefQd => "refqd",
            Algorithm::VanillaRefQd => "vanilla_refqd",
            Algorithm::VanillaRefQdReSs => "vanilla_refqd_ress",
            Algorithm::ClassicMe => "classic_me",
            Algorithm::PgaLite => "pga_lite",
        }
    }

    /// Archive stores decision parts against one shared representation.
    pub fn shares_representation(self) -> bool {
        matches!(
            self,
            Algorithm::RefQd | Algorithm::VanillaRefQd | Algorithm::VanillaRefQdReSs
        )
    }

    /// Maintains and trains a greedy decision part alongside the
    /// representation.
    pub fn uses_greedy(self) -> bool {
        self.shares_representation()
    }

    pub fn uses_gradient_variation(self) -> bool {
        !matches!(self, Algorithm::ClassicMe)
    }

}

/// Every knob of a run. Construct with [`EngineConfig::defaults`] and adjust;
/// [`EngineConfig::validate_for`] checks the result against a task.
#[derive(Debug, Clone)]
pub struct EngineConfig<F: Scalar> {
    pub algorithm: Algorithm,
    /// Total generations T.
    pub generations: usize,
    /// Offspring per generation N.
    pub batch_size: usize,
    /// Cells per behavior dimension; bounds come from the task.
    pub grid_resolution: Vec<usize>,
    /// Archive depth K.
    pub dda_levels: usize,
    /// Re-evaluate whenever the post-increment generation counter divides
    /// this period; `None` disables re-evaluation.
    pub reeval_period: Option<usize>,
    /// Levels pulled per re-evaluation (top k).
    pub reeval_top_k: usize,
    pub mix: OperatorMix<F>,
    pub iso: IsoLineParams<F>,
    pub lr: LrSchedule<F>,
    /// Decision parts sampled from level 1 per representation step.
    pub rep_train_batch: usize,
    /// Gradient steps on the representation per generation.
    pub rep_train_steps: usize,
    /// Ascent steps per gradient-variation offspring.
    pub variation_steps: usize,
    pub variation_step_size: F,
    pub greedy_step_size: F,
    pub parent_source: ParentSource,
    pub seed: u64,
}

impl<F: Scalar> EngineConfig<F> {
    /// Documented defaults with the algorithm's pinned knobs applied.
    pub fn defaults(algorithm: Algorithm) -> Self {
        let mut config = EngineConfig {
            algorithm,
            generations: 200,
            batch_size: 32,
            grid_resolution: vec![16, 16],
            dda_levels: 4,
            reeval_period: Some(50),
            reeval_top_k: 1,
            mix: OperatorMix::default(),
            iso: IsoLineParams::default(),
            lr: LrSchedule::with_defaults(F::cast_from(1e-3)).expect("valid default schedule"),
            rep_train_batch: 8,
            rep_train_steps: 4,
            variation_steps: 8,
            variation_step_size: F::cast_from(1e-2),
            greedy_step_size: F::cast_from(1e-2),
            parent_source: ParentSource::Level1,
            seed: 42,
        };
        config.apply_algorithm_constraints();
        config
    }

    /// Overwrites the knobs the chosen algorithm pins to fixed values.
    pub fn apply_algorithm_constraints(&mut self) {
        match self.algorithm {
            Algorithm::RefQd => {}
            Algorithm::VanillaRefQd => {
                self.dda_levels = 1;
                self.reeval_period = None;
                self.lr = constant_schedule(&self.lr);
            }
            Algorithm::VanillaRefQdReSs => {
                self.dda_levels = 1;
                self.reeval_top_k = 1;
                self.reeval_period = Some(self.reeval_period.unwrap_or(50));
                self.lr = constant_schedule(&self.lr);
            }
            Algorithm::ClassicMe => {
                self.dda_levels = 1;
                self.reeval_period = None;
                self.mix = OperatorMix::new(F::one()).expect("1.0 is a valid fraction");
            }
            Algorithm::PgaLite => {
                self.dda_levels = 1;
                self.reeval_period = None;
            }
        }
        if self.dda_levels == 1 {
            self.reeval_top_k = 1;
        }
    }

    /// Checks structural invariants and compatibility with the task.
    pub fn validate_for(&self, task: &dyn Task<F>) -> Result<()> {
        if self.generations == 0 {
            return Err(Error::config("generations must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch_size must be at least 1"));
        }
        if self.dda_levels == 0 {
            return Err(Error::config("dda_levels must be at least 1"));
        }
        if self.reeval_top_k == 0 || self.reeval_top_k > self.dda_levels {
            return Err(Error::config(format!(
                "reeval_top_k must lie in 1..={}, got {}",
                self.dda_levels, self.reeval_top_k
            )));
        }
        if self.reeval_period == Some(0) {
            return Err(Error::config("reeval_period must be at least 1"));
        }
        if self.rep_train_batch == 0 {
            return Err(Error::config("rep_train_batch must be at least 1"));
        }
        for (name, v) in [
            ("variation_step_size", self.variation_step_size),
            ("greedy_step_size", self.greedy_step_size),
        ] {
            if !v.is_finite() || v <= F::zero() {
                return Err(Error::config(format!("{name} must be positive and finite")));
            }
        }
        if self.grid_resolution.len() != task.descriptor_dims() {
            return Err(Error::config(format!(
                "grid_resolution has {} dimensions but task {} describes behavior in {}",
                self.grid_resolution.len(),
                task.name(),
                task.descriptor_dims()
            )));
        }
        match self.algorithm {
            Algorithm::RefQd => {}
            Algorithm::VanillaRefQd => {
                if self.dda_levels != 1
                    || self.reeval_period.is_some()
                    || self.lr.decay_rate != F::one()
                {
                    return Err(Error::config(
                        "vanilla_refqd pins dda_levels = 1, no re-evaluation, and a constant \
                         learning rate",
                    ));
                }
            }
            Algorithm::VanillaRefQdReSs => {
                if self.dda_levels != 1
                    || self.reeval_period.is_none()
                    || self.lr.decay_rate != F::one()
                {
                    return Err(Error::config(
                        "vanilla_refqd_ress pins dda_levels = 1, periodic re-evaluation, and a \
                         constant learning rate",
                    ));
                }
            }
            Algorithm::ClassicMe => {
                if self.dda_levels != 1 {
                    return Err(Error::config("classic_me requires dda_levels = 1"));
                }
                if self.reeval_period.is_some() {
                    return Err(Error::config("classic_me never re-evaluates"));
                }
                if self.mix.ga_fraction != F::one() {
                    return Err(Error::config(
                        "classic_me uses the line operator for every offspring (ga_fraction = 1)",
                    ));
                }
            }
            Algorithm::PgaLite => {
                if self.dda_levels != 1 || self.reeval_period.is_some() {
                    return Err(Error::config(
                        "pga_lite pins dda_levels = 1 and never re-evaluates",
                    ));
                }
            }
        }
        if self.algorithm.shares_representation() {
            let layout = task.layout();
            if !layout.is_decomposed() || layout.rep_len() == 0 || layout.dec_len() == 0 {
                return Err(Error::config(format!(
                    "{} needs a task with a decomposed genome (non-empty representation and \
                     decision parts); task {} does not provide one",
                    self.algorithm.name(),
                    task.name()
                )));
            }
        }
        Ok(())
    }
}

fn constant_schedule<F: Scalar>(lr: &LrSchedule<F>) -> LrSchedule<F> {
    LrSchedule::new(lr.initial_lr, F::one(), lr.floor_lr).expect("constant schedule is valid")
}

/// Everything a run leaves behind besides its history.
#[derive(Debug)]
pub struct EngineState<F: Scalar> {
    /// The single shared representation (empty for full-genome algorithms).
    pub representation: ParamVector<F>,
    pub greedy_decision: Option<ParamVector<F>>,
    pub archive: DeepDecisionArchive<F>,
    pub generation: usize,
    /// Task evaluations performed over the whole run.
    pub evaluations: usize,
}

#[derive(Debug)]
pub struct RunOutput<F: Scalar> {
    pub state: EngineState<F>,
    pub history: Vec<RunRecord<F>>,
}

/// Passed to the observer right after a re-evaluation pass.
pub struct ReevalEvent<'a, F: Scalar> {
    /// The post-increment generation counter that triggered the pass.
    pub counter: usize,
    /// How many slots were pulled and re-scored.
    pub touched: usize,
    pub archive: &'a DeepDecisionArchive<F>,
    pub representation: &'a ParamVector<F>,
}

/// Exact parameter counts for the sharing-vs-full-genome comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceReport {
    /// Representation + one batch of candidates + the greedy part.
    pub live_params: usize,
    /// Stored decision parameters across all levels, plus the representation
    /// once.
    pub archive_params: usize,
    /// What a full genome per occupied level-1 cell would cost.
    pub baseline_archive_params: usize,
    /// archive_params / baseline_archive_params; 1.0 for an empty archive.
    pub compression_ratio: f64,
}

pub fn run<F: Scalar>(config: &EngineConfig<F>, task: &dyn Task<F>) -> Result<RunOutput<F>> {
    run_with_observer(config, task, |_| {})
}

pub fn run_with_observer<F: Scalar>(
    config: &EngineConfig<F>,
    task: &dyn Task<F>,
    mut on_reeval: impl FnMut(ReevalEvent<'_, F>),
) -> Result<RunOutput<F>> {
    config.validate_for(task)?;
    let layout = task.layout();
    let shared = config.algorithm.shares_representation();
    let candidate_len = if shared {
        layout.dec_len()
    } else {
        layout.full_len()
    };

    let (lower, upper) = task.grid_bounds();
    let grid = GridSpec::new(lower, upper, config.grid_resolution.clone())?;
    let mut archive = DeepDecisionArchive::new(grid, config.dda_levels)?;

    // Fixed draw order on the init stream: representation, greedy part, then
    // the first batch of candidates.
    let mut init_rng = RngStream::new(config.seed, StreamId::Init);
    let mut representation = if shared {
        task.init_representation(&mut init_rng)
    } else {
        ParamVector::empty()
    };
    let mut greedy = config
        .algorithm
        .uses_greedy()
        .then(|| task.init_decision(&mut init_rng));

    let mut select_rng = RngStream::new(config.seed, StreamId::Selection);
    let mut train_rng = RngStream::new(config.seed, StreamId::RepTrain);

    let differentiable = task.differentiable();
    let use_gradient_op = config.algorithm.uses_gradient_variation() && differentiable;
    if config.algorithm.uses_gradient_variation() && !differentiable {
        log::warn!(
            "task {} has no analytic gradient; every offspring uses the line operator",
            task.name()
        );
    }

    let mut history: Vec<RunRecord<F>> = Vec::with_capacity(config.generations);
    let mut evaluations = 0usize;

    for t in 1..=config.generations {
        let candidates: Vec<ParamVector<F>> = if t == 1 {
            (0..config.batch_size)
                .map(|_| {
                    if shared {
                        task.init_decision(&mut init_rng)
                    } else {
                        task.init_representation(&mut init_rng)
                            .concat(&task.init_decision(&mut init_rng))
                    }
                })
                .collect()
        } else {
            if config.algorithm.shares_representation() && differentiable && !archive.is_empty() {
                train_representation(
                    &mut representation,
                    greedy.as_mut().expect("shared algorithms keep a greedy part"),
                    &archive,
                    task,
                    config,
                    t,
                    &mut train_rng,
                )?;
            }
            make_offspring(
                config,
                task,
                &archive,
                &representation,
                shared,
                use_gradient_op,
                t,
                &mut select_rng,
            )?
        };

        let mut batch = Vec::with_capacity(candidates.len() + 1);
        for decision in candidates {
            let eval = eval_candidate(task, shared, &representation, &decision)?;
            evaluations += 1;
            batch.push(Candidate {
                decision,
                eval,
                birth_iteration: t,
            });
        }
        if let Some(g) = &greedy {
            let eval = eval_candidate(task, shared, &representation, g)?;
            evaluations += 1;
            batch.push(Candidate {
                decision: g.clone(),
                eval,
                birth_iteration: t,
            });
        }
        archive.dda_select(batch)?;

        // The generation counter is incremented before the periodic check, so
        // the first pass lands after generation reeval_period - 1.
        let mut reeval_fired = false;
        if let Some(period) = config.reeval_period {
            if (t + 1) % period == 0 {
                let touched = reevaluate_with_counter(
                    &mut archive,
                    &representation,
                    task,
                    config.reeval_top_k,
                    shared,
                    &mut evaluations,
                )?;
                reeval_fired = true;
                on_reeval(ReevalEvent {
                    counter: t + 1,
                    touched,
                    archive: &archive,
                    representation: &representation,
                });
            }
        }

        let metrics = archive.metrics(task.fitness_offset());
        let resources = resource_report_for(
            &archive,
            &representation,
            greedy.as_ref(),
            config.batch_size,
            candidate_len,
            layout.full_len(),
        );
        history.push(RunRecord {
            generation: t,
            qd_score: metrics.qd_score,
            coverage: metrics.coverage,
            max_fitness: metrics.max_fitness,
            evaluations_so_far: evaluations,
            live_params: resources.live_params,
            archive_params: resources.archive_params,
            compression_ratio: F::cast_from(resources.compression_ratio),
            lr: config.lr.lr_at(t as u64),
            reeval_fired,
        });

        debug_assert!(structure_ok(&archive, &representation, greedy.as_ref(), candidate_len));
    }

    Ok(RunOutput {
        state: EngineState {
            representation,
            greedy_decision: greedy,
            archive,
            generation: config.generations,
            evaluations,
        },
        history,
    })
}

/// The archive must hold only candidate-sized vectors; representation-sized
/// parameters live in exactly one place.
fn structure_ok<F: Scalar>(
    archive: &DeepDecisionArchive<F>,
    _representation: &ParamVector<F>,
    greedy: Option<&ParamVector<F>>,
    candidate_len: usize,
) -> bool {
    archive
        .slots()
        .all(|(_, _, slot)| slot.decision.len() == candidate_len)
        && greedy.is_none_or(|g| g.len() == candidate_len)
        && archive.check_invariants().is_ok()
}

#[allow(clippy::too_many_arguments)]
fn make_offspring<F: Scalar>(
    config: &EngineConfig<F>,
    task: &dyn Task<F>,
    archive: &DeepDecisionArchive<F>,
    representation: &ParamVector<F>,
    shared: bool,
    use_gradient_op: bool,
    t: usize,
    select_rng: &mut RngStream,
) -> Result<Vec<ParamVector<F>>> {
    let n = config.batch_size;
    let n_iso = if use_gradient_op {
        config.mix.isoline_count(n)
    } else {
        n
    };
    let primaries = select_parents(archive, n, config.parent_source, select_rng)?;
    let secondaries = select_parents(archive, n_iso, config.parent_source, select_rng)?;
    let mut out = Vec::with_capacity(n);
    for (i, primary) in primaries.iter().enumerate() {
        if i < n_iso {
            let mut rng =
                RngStream::fork(config.seed, StreamId::Variation, t as u64, i as u64);
            out.push(isoline_dd(primary, &secondaries[i], &config.iso, &mut rng)?);
        } else {
            let (rep, dec) = if shared {
                (representation.clone(), primary.clone())
            } else {
                primary.split_at(task.layout().rep_len())?
            };
            let improved = gradient_variation(
                task,
                &rep,
                &dec,
                config.variation_steps,
                config.variation_step_size,
            )?;
            out.push(if shared { improved } else { rep.concat(&improved) });
        }
    }
    Ok(out)
}

/// Gradient ascent on the shared representation: each step samples decision
/// parts from level 1, sums the fitness gradients of those compositions plus
/// the greedy one, and climbs; the greedy part then takes its own step
/// against the fresh representation. Non-finite updates skip the step and
/// keep the previous parameters.
fn train_representation<F: Scalar>(
    representation: &mut ParamVector<F>,
    greedy: &mut ParamVector<F>,
    archive: &DeepDecisionArchive<F>,
    task: &dyn Task<F>,
    config: &EngineConfig<F>,
    t: usize,
    rng: &mut RngStream,
) -> Result<()> {
    let lr = config.lr.lr_at(t as u64);
    for _ in 0..config.rep_train_steps {
        let sampled = select_parents(archive, config.rep_train_batch, ParentSource::Level1, rng)?;
        let mut total = ParamVector::zeros(representation.len());
        let mut finite = true;
        for decision in sampled.iter().chain(std::iter::once(&*greedy)) {
            let grad = match task.gradient(representation, decision, Part::Representation) {
                Ok(g) => g,
                Err(e) if matches!(e, Error::NonFinite(_)) => {
                    finite = false;
                    break;
                }
                Err(e) => return Err(e),
            };
            match total.add_scaled(&grad, F::one()) {
                Ok(next) => total = next,
                Err(_) => {
                    finite = false;
                    break;
                }
            }
        }
        if !finite {
            log::warn!("non-finite representation gradient at generation {t}; step skipped");
            continue;
        }
        match representation.add_scaled(&total, lr) {
            Ok(next) => *representation = next,
            Err(_) => {
                log::warn!("representation update overflowed at generation {t}; step skipped");
                continue;
            }
        }
        let greedy_step = task
            .gradient(representation, greedy, Part::Decision)
            .and_then(|g| greedy.add_scaled(&g, config.greedy_step_size));
        match greedy_step {
            Ok(next) => *greedy = next,
            Err(e) if matches!(e, Error::NonFinite(_)) => {
                log::warn!("non-finite greedy update at generation {t}; part kept");
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Composes a stored candidate with the shared representation (or splits a
/// full genome) and evaluates it.
pub fn eval_candidate<F: Scalar>(
    task: &dyn Task<F>,
    shared: bool,
    representation: &ParamVector<F>,
    candidate: &ParamVector<F>,
) -> Result<EvalResult<F>> {
    if shared {
        task.evaluate(representation, candidate)
    } else {
        let (rep, dec) = candidate.split_at(task.layout().rep_len())?;
        task.evaluate(&rep, &dec)
    }
}

/// Pulls the top `top_k` levels, re-scores every pulled slot against the
/// current representation, and inserts the results back. Birth iterations
/// are preserved; descriptors may move slots to different cells. Returns the
/// number of slots touched.
pub fn reevaluate<F: Scalar>(
    archive: &mut DeepDecisionArchive<F>,
    representation: &ParamVector<F>,
    task: &dyn Task<F>,
    top_k: usize,
    shared: bool,
) -> Result<usize> {
    let mut scratch = 0;
    reevaluate_with_counter(archive, representation, task, top_k, shared, &mut scratch)
}

fn reevaluate_with_counter<F: Scalar>(
    archive: &mut DeepDecisionArchive<F>,
    representation: &ParamVector<F>,
    task: &dyn Task<F>,
    top_k: usize,
    shared: bool,
    evaluations: &mut usize,
) -> Result<usize> {
    let extracted = archive.take_levels(top_k)?;
    let touched = extracted.len();
    let mut batch = Vec::with_capacity(touched);
    for slot in extracted {
        let eval = eval_candidate(task, shared, representation, &slot.decision)?;
        *evaluations += 1;
        batch.push(Candidate {
            decision: slot.decision,
            eval,
            birth_iteration: slot.birth_iteration,
        });
    }
    archive.dda_select(batch)?;
    Ok(touched)
}

/// Recorded fitness versus a fresh evaluation against the given
/// representation, for every slot in the top levels.
#[derive(Debug, Clone, PartialEq)]
pub struct MismatchDelta<F: Scalar> {
    pub cell: usize,
    /// 1-based archive level.
    pub level: usize,
    pub recorded: F,
    pub fresh: F,
}

impl<F: Scalar> MismatchDelta<F> {
    pub fn delta(&self) -> F {
        self.fresh - self.recorded
    }
}

/// Probes the mismatch between recorded fitness values and what the stored
/// decision parts actually score against `representation` now. Does not
/// modify the archive.
pub fn mismatch_deltas<F: Scalar>(
    archive: &DeepDecisionArchive<F>,
    representation: &ParamVector<F>,
    task: &dyn Task<F>,
    shared: bool,
    top_k: usize,
) -> Result<Vec<MismatchDelta<F>>> {
    let mut out = Vec::new();
    for (cell, level, slot) in archive.slots() {
        if level >= top_k {
            continue;
        }
        let eval = eval_candidate(task, shared, representation, &slot.decision)?;
        out.push(MismatchDelta {
            cell,
            level: level + 1,
            recorded: slot.recorded_fitness,
            fresh: eval.fitness,
        });
    }
    Ok(out)
}

/// Metrics the archive actually earns at deployment time: every level-1
/// decision part is re-evaluated against the given representation and
/// re-binned by the descriptor it exhibits NOW. Solutions whose behavior
/// drifted into the same cell collide, so stale archives score lower here
/// than their recorded values suggest.
pub fn deployment_metrics<F: Scalar>(
    archive: &DeepDecisionArchive<F>,
    representation: &ParamVector<F>,
    task: &dyn Task<F>,
    shared: bool,
) -> Result<QDMetrics<F>> {
    let mut honest = DeepDecisionArchive::new(archive.grid().clone(), 1)?;
    let batch = archive
        .level1_slots()
        .into_iter()
        .map(|slot| {
            let eval = eval_candidate(task, shared, representation, &slot.decision)?;
            Ok(Candidate {
                decision: slot.decision.clone(),
                eval,
                birth_iteration: slot.birth_iteration,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    honest.dda_select(batch)?;
    Ok(honest.metrics(task.fitness_offset()))
}

/// Exact parameter accounting for a run in progress or finished.
pub fn resource_report<F: Scalar>(
    state: &EngineState<F>,
    config: &EngineConfig<F>,
    task: &dyn Task<F>,
) -> ResourceReport {
    let layout = task.layout();
    let candidate_len = if config.algorithm.shares_representation() {
        layout.dec_len()
    } else {
        layout.full_len()
    };
    resource_report_for(
        &state.archive,
        &state.representation,
        state.greedy_decision.as_ref(),
        config.batch_size,
        candidate_len,
        layout.full_len(),
    )
}

fn resource_report_for<F: Scalar>(
    archive: &DeepDecisionArchive<F>,
    representation: &ParamVector<F>,
    greedy: Option<&ParamVector<F>>,
    batch_size: usize,
    candidate_len: usize,
    full_len: usize,
) -> ResourceReport {
    let stored: usize = archive.slots().map(|(_, _, s)| s.decision.len()).sum();
    let live_params =
        representation.len() + batch_size * candidate_len + greedy.map_or(0, ParamVector::len);
    let archive_params = stored + representation.len();
    let baseline_archive_params = archive.occupied_level1() * full_len;
    let compression_ratio = if baseline_archive_params == 0 {
        1.0
    } else {
        archive_params as f64 / baseline_archive_params as f64
    };
    ResourceReport {
        live_params,
        archive_params,
        baseline_archive_params,
        compression_ratio,
    }
}
