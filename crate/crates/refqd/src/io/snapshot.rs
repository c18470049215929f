//! Archive snapshots: single-file JSON artifacts that capture a run's final
//! state (grid, every occupied slot, the shared representation, and enough
//! metadata to re-open the run against the right task).
//!
//! Decision parameters are stored inline; archives at this scale are small
//! and a self-contained file keeps the offline `reeval` workflow trivial.
//! Loads are all-or-nothing: any parse or validation failure leaves no
//! partial state behind.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::archive::{ArchiveSlot, DeepDecisionArchive};
use crate::behavior::BehaviorDescriptor;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::params::ParamVector;
use crate::Real;

pub const SNAPSHOT_SCHEMA_VERSION: u32 = 1;

/// Everything a snapshot file holds, in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub task_name: String,
    pub seed: u64,
    /// Whether the run kept one shared representation outside the archive.
    pub shared: bool,
    pub fitness_offset: f64,
    pub archive: DeepDecisionArchive<Real>,
    pub representation: ParamVector<Real>,
}

#[derive(Serialize, Deserialize)]
struct SnapshotDoc {
    schema_version: u32,
    task: String,
    seed: u64,
    shared: bool,
    fitness_offset: f64,
    grid: GridDoc,
    levels: usize,
    representation: Vec<f64>,
    slots: Vec<SlotDoc>,
}

#[derive(Serialize, Deserialize)]
struct GridDoc {
    lower: Vec<f64>,
    upper: Vec<f64>,
    resolution: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SlotDoc {
    cell: usize,
    /// 1-based in the file: level 1 is the deployed front.
    level: usize,
    fitness: f64,
    descriptor: Vec<f64>,
    decision: Vec<f64>,
    birth_iteration: usize,
}

pub fn snapshot_archive(snapshot: &Snapshot, path: &Path) -> Result<()> {
    let archive = &snapshot.archive;
    let grid = archive.grid();
    let slots = archive
        .slots()
        .map(|(cell, level, slot)| {
            if !slot.recorded_fitness.is_finite() {
                return Err(Error::NonFinite(format!(
                    "fitness of cell {cell} level {} is not finite",
                    level + 1
                )));
            }
            Ok(SlotDoc {
                cell,
                level: level + 1,
                fitness: slot.recorded_fitness,
                descriptor: slot.recorded_descriptor.coords().to_vec(),
                decision: slot.decision.as_slice().to_vec(),
                birth_iteration: slot.birth_iteration,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let doc = SnapshotDoc {
        schema_version: SNAPSHOT_SCHEMA_VERSION,
        task: snapshot.task_name.clone(),
        seed: snapshot.seed,
        shared: snapshot.shared,
        fitness_offset: snapshot.fitness_offset,
        grid: GridDoc {
            lower: grid.lower().to_vec(),
            upper: grid.upper().to_vec(),
            resolution: grid.resolution().to_vec(),
        },
        levels: archive.levels(),
        representation: snapshot.representation.as_slice().to_vec(),
        slots,
    };
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Data {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_snapshot(path: &Path) -> Result<Snapshot> {
    let origin = path.display().to_string();
    let data_err = |message: String| Error::Data {
        path: origin.clone(),
        message,
    };
    let text = std::fs::read_to_string(path)?;
    // Read the version out of a generic parse first so a snapshot written by
    // a future layout still reports a clean version mismatch.
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| data_err(e.to_string()))?;
    let found = value
        .get("schema_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| data_err("missing schema_version".to_string()))? as u32;
    if found != SNAPSHOT_SCHEMA_VERSION {
        return Err(Error::Schema {
            found,
            expected: SNAPSHOT_SCHEMA_VERSION,
        });
    }
    let doc: SnapshotDoc = serde_json::from_value(value).map_err(|e| data_err(e.to_string()))?;

    let grid = GridSpec::new(doc.grid.lower, doc.grid.upper, doc.grid.resolution)?;
    let mut slots = Vec::with_capacity(doc.slots.len());
    for s in doc.slots {
        if s.level == 0 {
            return Err(data_err(format!("cell {}: slot levels start at 1", s.cell)));
        }
        if !s.fitness.is_finite() {
            return Err(data_err(format!(
                "cell {} level {}: fitness is not finite",
                s.cell, s.level
            )));
        }
        slots.push((
            s.cell,
            s.level - 1,
            ArchiveSlot {
                decision: ParamVector::new(s.decision)?,
                recorded_fitness: s.fitness,
                recorded_descriptor: BehaviorDescriptor::new(s.descriptor)?,
                birth_iteration: s.birth_iteration,
            },
        ));
    }
    let archive = DeepDecisionArchive::from_slots(grid, doc.levels, slots)?;
    Ok(Snapshot {
        task_name: doc.task,
        seed: doc.seed,
        shared: doc.shared,
        fitness_offset: doc.fitness_offset,
        archive,
        representation: ParamVector::new(doc.representation)?,
    })
}
