//! Run configuration files.
//!
//! The format is sectioned key-value text (TOML syntax): a `[task]` table
//! naming the benchmark and its dimensions, and an `[engine]` table with the
//! algorithm and its knobs. Every key is optional except `task.name` and
//! `engine.algorithm`; omitted keys take the documented defaults. Unknown
//! keys are fatal so a typo can never silently fall back to a default, and
//! keys that an algorithm pins to a fixed value are rejected when set to
//! anything else.

use std::path::Path;

use crate::engine::{Algorithm, EngineConfig};
use crate::error::{Error, Result};
use crate::rng::{RngStream, StreamId};
use crate::tasks::{ArmTask, NeuralArmTask, RastriginProjTask, Task};
use crate::variation::{IsoLineParams, LrSchedule, OperatorMix, ParentSource};
use crate::Real;

/// A validated config plus the task it names.
pub struct LoadedRun {
    pub config: EngineConfig<Real>,
    pub task: Box<dyn Task<Real>>,
}

impl std::fmt::Debug for LoadedRun {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LoadedRun")
            .field("task", &self.task.name())
            .field("config", &self.config)
            .finish()
    }
}

pub fn load_config(path: &Path, seed_override: Option<u64>) -> Result<LoadedRun> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, &path.display().to_string(), seed_override)
}

pub fn parse_config(text: &str, origin: &str, seed_override: Option<u64>) -> Result<LoadedRun> {
    let root: toml::Table = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    check_keys(&root, &["task", "engine"], "the top level")?;
    let task_table = get_table(&root, "task")?;
    let engine_table = get_table(&root, "engine")?;

    let raw = RawEngine::from_table(engine_table)?;
    let algorithm = Algorithm::parse(&raw.algorithm)?;
    check_pinned_keys(algorithm, &raw)?;

    let seed = seed_override.or(raw.seed).unwrap_or(42);
    let task = build_task(task_table, seed)?;

    let mut config = EngineConfig::<Real>::defaults(algorithm);
    config.seed = seed;
    if let Some(v) = raw.generations {
        config.generations = v;
    }
    if let Some(v) = raw.batch_size {
        config.batch_size = v;
    }
    if let Some(v) = raw.grid_resolution {
        config.grid_resolution = v;
    }
    if let Some(v) = raw.dda_levels {
        config.dda_levels = v;
    }
    if let Some(v) = raw.reeval_period {
        config.reeval_period = Some(v);
    }
    if let Some(v) = raw.reeval_top_k {
        config.reeval_top_k = v;
    }
    if let Some(v) = raw.ga_fraction {
        config.mix = OperatorMix::new(v)?;
    }
    let sigma1 = raw.sigma1.unwrap_or(config.iso.sigma1);
    let sigma2 = raw.sigma2.unwrap_or(config.iso.sigma2);
    config.iso = IsoLineParams::new(sigma1, sigma2)?;
    let lr_initial = raw.lr_initial.unwrap_or(1e-3);
    let pinned_constant = matches!(
        algorithm,
        Algorithm::VanillaRefQd | Algorithm::VanillaRefQdReSs
    );
    let lr_decay = raw
        .lr_decay
        .unwrap_or(if pinned_constant { 1.0 } else { 0.999 });
    let lr_floor = raw.lr_floor.unwrap_or(lr_initial / 100.0);
    if lr_floor > lr_initial {
        return Err(Error::config(format!(
            "lr_floor ({lr_floor}) must not exceed lr_initial ({lr_initial})"
        )));
    }
    config.lr = LrSchedule::new(lr_initial, lr_decay, lr_floor)?;
    if let Some(v) = raw.rep_train_batch {
        config.rep_train_batch = v;
    }
    if let Some(v) = raw.rep_train_steps {
        config.rep_train_steps = v;
    }
    if let Some(v) = raw.variation_steps {
        config.variation_steps = v;
    }
    if let Some(v) = raw.variation_step_size {
        config.variation_step_size = v;
    }
    if let Some(v) = raw.greedy_step_size {
        config.greedy_step_size = v;
    }
    if let Some(v) = &raw.parent_source {
        config.parent_source = match v.as_str() {
            "level1" => ParentSource::Level1,
            "all_levels" => ParentSource::AllLevels,
            other => {
                return Err(Error::config(format!(
                    "parent_source must be \"level1\" or \"all_levels\", got {other:?}"
                )))
            }
        };
    }

    config.validate_for(task.as_ref())?;
    Ok(LoadedRun { config, task })
}

/// Raw `[engine]` values exactly as present in the file, so pinned-knob
/// contradictions can be told apart from defaults.
struct RawEngine {
    algorithm: String,
    generations: Option<usize>,
    batch_size: Option<usize>,
    grid_resolution: Option<Vec<usize>>,
    dda_levels: Option<usize>,
    reeval_period: Option<usize>,
    reeval_top_k: Option<usize>,
    ga_fraction: Option<f64>,
    sigma1: Option<f64>,
    sigma2: Option<f64>,
    lr_initial: Option<f64>,
    lr_decay: Option<f64>,
    lr_floor: Option<f64>,
    rep_train_batch: Option<usize>,
    rep_train_steps: Option<usize>,
    variation_steps: Option<usize>,
    variation_step_size: Option<f64>,
    greedy_step_size: Option<f64>,
    parent_source: Option<String>,
    seed: Option<u64>,
}

const ENGINE_KEYS: &[&str] = &[
    "algorithm",
    "generations",
    "batch_size",
    "grid_resolution",
    "dda_levels",
    "reeval_period",
    "reeval_top_k",
    "ga_fraction",
    "sigma1",
    "sigma2",
    "lr_initial",
    "lr_decay",
    "lr_floor",
    "rep_train_batch",
    "rep_train_steps",
    "variation_steps",
    "variation_step_size",
    "greedy_step_size",
    "parent_source",
    "seed",
];

impl RawEngine {
    fn from_table(table: &toml::Table) -> Result<Self> {
        check_keys(table, ENGINE_KEYS, "[engine]")?;
        Ok(RawEngine {
            algorithm: req_string(table, "algorithm", "[engine]")?,
            generations: opt_count(table, "generations")?,
            batch_size: opt_count(table, "batch_size")?,
            grid_resolution: opt_count_array(table, "grid_resolution")?,
            dda_levels: opt_count(table, "dda_levels")?,
            reeval_period: opt_count(table, "reeval_period")?,
            reeval_top_k: opt_count(table, "reeval_top_k")?,
            ga_fraction: opt_real(table, "ga_fraction")?,
            sigma1: opt_real(table, "sigma1")?,
            sigma2: opt_real(table, "sigma2")?,
            lr_initial: opt_real(table, "lr_initial")?,
            lr_decay: opt_real(table, "lr_decay")?,
            lr_floor: opt_real(table, "lr_floor")?,
            rep_train_batch: opt_count(table, "rep_train_batch")?,
            rep_train_steps: opt_count(table, "rep_train_steps")?,
            variation_steps: opt_count(table, "variation_steps")?,
            variation_step_size: opt_real(table, "variation_step_size")?,
            greedy_step_size: opt_real(table, "greedy_step_size")?,
            parent_source: opt_string(table, "parent_source")?,
            seed: opt_seed(table, "seed")?,
        })
    }
}

/// Rejects explicit settings that contradict what the algorithm pins.
fn check_pinned_keys(algorithm: Algorithm, raw: &RawEngine) -> Result<()> {
    let pin = |key: &str, why: &str| -> Error {
        Error::config(format!("{} pins {key}: {why}", algorithm.name()))
    };
    match algorithm {
        Algorithm::RefQd => {}
        Algorithm::VanillaRefQd => {
            if raw.dda_levels.is_some_and(|v| v != 1) {
                return Err(pin("dda_levels", "this variant keeps a single level"));
            }
            if raw.reeval_period.is_some() {
                return Err(pin("reeval_period", "this variant never re-evaluates"));
            }
            if raw.reeval_top_k.is_some_and(|v| v != 1) {
                return Err(pin("reeval_top_k", "this variant keeps a single level"));
            }
            if raw.lr_decay.is_some_and(|v| v != 1.0) {
                return Err(pin("lr_decay", "this variant keeps the learning rate constant"));
            }
        }
        Algorithm::VanillaRefQdReSs => {
            if raw.dda_levels.is_some_and(|v| v != 1) {
                return Err(pin("dda_levels", "this variant keeps a single level"));
            }
            if raw.reeval_top_k.is_some_and(|v| v != 1) {
                return Err(pin("reeval_top_k", "this variant keeps a single level"));
            }
            if raw.lr_decay.is_some_and(|v| v != 1.0) {
                return Err(pin("lr_decay", "this variant keeps the learning rate constant"));
            }
        }
        Algorithm::ClassicMe | Algorithm::PgaLite => {
            if raw.dda_levels.is_some_and(|v| v != 1) {
                return Err(pin("dda_levels", "full-genome baselines keep a single level"));
            }
            if raw.reeval_period.is_some() {
                return Err(pin("reeval_period", "full-genome baselines never re-evaluate"));
            }
            if raw.reeval_top_k.is_some_and(|v| v != 1) {
                return Err(pin("reeval_top_k", "full-genome baselines keep a single level"));
            }
            for (key, set) in [
                ("lr_initial", raw.lr_initial.is_some()),
                ("lr_decay", raw.lr_decay.is_some()),
                ("lr_floor", raw.lr_floor.is_some()),
                ("rep_train_batch", raw.rep_train_batch.is_some()),
                ("rep_train_steps", raw.rep_train_steps.is_some()),
                ("greedy_step_size", raw.greedy_step_size.is_some()),
            ] {
                if set {
                    return Err(Error::config(format!(
                        "{key} only applies to algorithms that share a representation, not {}",
                        algorithm.name()
                    )));
                }
            }
            if algorithm == Algorithm::ClassicMe {
                if raw.ga_fraction.is_some_and(|v| v != 1.0) {
                    return Err(pin("ga_fraction", "every offspring uses the line operator"));
                }
                for (key, set) in [
                    ("variation_steps", raw.variation_steps.is_some()),
                    ("variation_step_size", raw.variation_step_size.is_some()),
                ] {
                    if set {
                        return Err(Error::config(format!(
                            "{key} has no effect under classic_me, which never uses gradient \
                             variation"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

fn build_task(table: &toml::Table, seed: u64) -> Result<Box<dyn Task<Real>>> {
    let name = req_string(table, "name", "[task]")?;
    match name.as_str() {
        "arm" => {
            check_keys(table, &["name", "joints"], "[task] for arm")?;
            let joints = opt_count(table, "joints")?.unwrap_or(8);
            Ok(Box::new(ArmTask::new(joints)?))
        }
        "neural_arm" => {
            check_keys(
                table,
                &["name", "joints", "context_dim", "hidden", "split_index"],
                "[task] for neural_arm",
            )?;
            let joints = opt_count(table, "joints")?.unwrap_or(8);
            let context_dim = opt_count(table, "context_dim")?.unwrap_or(16);
            let hidden = opt_count_array(table, "hidden")?.unwrap_or_else(|| vec![256, 256]);
            let split_index = opt_count(table, "split_index")?.unwrap_or(hidden.len());
            let mut rng = RngStream::new(seed, StreamId::Task);
            Ok(Box::new(NeuralArmTask::new(
                joints,
                context_dim,
                &hidden,
                split_index,
                &mut rng,
            )?))
        }
        "rastrigin_proj" => {
            check_keys(table, &["name", "dim"], "[task] for rastrigin_proj")?;
            let dim = opt_count(table, "dim")?.unwrap_or(8);
            Ok(Box::new(RastriginProjTask::new(dim)?))
        }
        other => Err(Error::config(format!(
            "unknown task {other:?}; expected one of arm, neural_arm, rastrigin_proj"
        ))),
    }
}

fn check_keys(table: &toml::Table, known: &[&str], where_: &str) -> Result<()> {
    for key in table.keys() {
        if !known.contains(&key.as_str()) {
            let hint = match nearest(key, known) {
                Some(best) => format!(" (did you mean {best:?}?)"),
                None => String::new(),
            };
            return Err(Error::config(format!(
                "unknown key {key:?} in {where_}{hint}"
            )));
        }
    }
    Ok(())
}

/// Closest known key by edit distance, if anything is plausibly close.
fn nearest<'a>(key: &str, known: &[&'a str]) -> Option<&'a str> {
    known
        .iter()
        .map(|k| (edit_distance(key, k), *k))
        .min()
        .filter(|(d, k)| *d <= (k.len().max(key.len()) + 2) / 3)
        .map(|(_, k)| k)
}

fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

fn get_table<'a>(root: &'a toml::Table, name: &str) -> Result<&'a toml::Table> {
    match root.get(name) {
        Some(toml::Value::Table(t)) => Ok(t),
        Some(_) => Err(Error::config(format!("[{name}] must be a section"))),
        None => Err(Error::config(format!("missing required section [{name}]"))),
    }
}

fn req_string(table: &toml::Table, key: &str, where_: &str) -> Result<String> {
    opt_string(table, key)?
        .ok_or_else(|| Error::config(format!("missing required key {key:?} in {where_}")))
}

fn opt_string(table: &toml::Table, key: &str) -> Result<Option<String>> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::String(s)) => Ok(Some(s.clone())),
        Some(other) => Err(Error::config(format!(
            "{key} must be a string, got {}",
            other.type_str()
        ))),
    }
}

fn opt_count(table: &toml::Table, key: &str) -> Result<Option<usize>> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::Integer(v)) if *v >= 0 => Ok(Some(*v as usize)),
        Some(other) => Err(Error::config(format!(
            "{key} must be a non-negative integer, got {other}"
        ))),
    }
}

fn opt_seed(table: &toml::Table, key: &str) -> Result<Option<u64>> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::Integer(v)) if *v >= 0 => Ok(Some(*v as u64)),
        Some(other) => Err(Error::config(format!(
            "{key} must be a non-negative integer, got {other}"
        ))),
    }
}

fn opt_real(table: &toml::Table, key: &str) -> Result<Option<f64>> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::Float(v)) => Ok(Some(*v)),
        Some(toml::Value::Integer(v)) => Ok(Some(*v as f64)),
        Some(other) => Err(Error::config(format!(
            "{key} must be a number, got {}",
            other.type_str()
        ))),
    }
}

fn opt_count_array(table: &toml::Table, key: &str) -> Result<Option<Vec<usize>>> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::Array(items)) => items
            .iter()
            .map(|v| match v {
                toml::Value::Integer(n) if *n >= 0 => Ok(*n as usize),
                other => Err(Error::config(format!(
                    "{key} must hold non-negative integers, got {other}"
                ))),
            })
            .collect::<Result<Vec<usize>>>()
            .map(Some),
        Some(other) => Err(Error::config(format!(
            "{key} must be an array, got {}",
            other.type_str()
        ))),
    }
}
