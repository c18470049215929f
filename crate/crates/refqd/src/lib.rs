//! Quality-diversity optimization with a shared representation.
//!
//! Instead of storing one full network per archive cell, runs keep a single
//! shared representation (the front layers) and per-cell decision parts (the
//! output layers), cutting archive memory by roughly the ratio of decision
//! size to full genome size. The price is a mismatch risk: stored decision
//! parts were recorded against an older representation. The engine counters
//! that with a multi-level archive, periodic re-evaluation of the top levels,
//! and learning-rate decay on the representation.
//!
//! The numeric core is generic over the floating-point type; the `f64`
//! aliases below are what the CLI and the persisted formats use.

pub mod archive;
pub mod behavior;
pub mod engine;
pub mod error;
pub mod genome;
pub mod grid;
pub mod io;
pub mod params;
pub mod rng;
pub mod scalar;
pub mod tasks;
pub mod variation;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default scalar type for runs and persisted data.
pub type Real = f64;

pub type Params = params::ParamVector<Real>;
pub type Genome = genome::DecomposedGenome<Real>;
pub type Descriptor = behavior::BehaviorDescriptor<Real>;
pub type Evaluation = behavior::EvalResult<Real>;
pub type Grid = grid::GridSpec<Real>;
pub type Archive = archive::DeepDecisionArchive<Real>;
pub type Slot = archive::ArchiveSlot<Real>;
pub type Metrics = archive::QDMetrics<Real>;
