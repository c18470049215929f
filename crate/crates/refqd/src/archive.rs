//! Deep decision archive: a grid archive with K stacked levels per cell.
//!
//! Level 1 of every cell holds the best known decision part for that cell;
//! deeper levels keep the runners-up so that solutions displaced after the
//! shared representation moves are not lost forever. Occupied levels always
//! form a prefix and fitness never increases with depth.

use crate::behavior::{BehaviorDescriptor, EvalResult};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::params::ParamVector;
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// One stored solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "F: Scalar", deserialize = "F: Scalar"))]
pub struct ArchiveSlot<F: Scalar> {
    pub decision: ParamVector<F>,
    pub recorded_fitness: F,
    pub recorded_descriptor: BehaviorDescriptor<F>,
    /// Generation whose evaluation first put this solution into the archive.
    pub birth_iteration: usize,
}

/// An evaluated solution waiting to be offered to the archive.
#[derive(Debug, Clone)]
pub struct Candidate<F: Scalar> {
    pub decision: ParamVector<F>,
    pub eval: EvalResult<F>,
    pub birth_iteration: usize,
}

impl<F: Scalar> Candidate<F> {
    fn into_slot(self) -> ArchiveSlot<F> {
        ArchiveSlot {
            decision: self.decision,
            recorded_fitness: self.eval.fitness,
            recorded_descriptor: self.eval.descriptor,
            birth_iteration: self.birth_iteration,
        }
    }
}

/// Aggregate quality/diversity measurements over level 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QDMetrics<F: Scalar> {
    /// Sum over occupied level-1 cells of `max(fitness + offset, 0)`.
    pub qd_score: F,
    /// Occupied level-1 cells divided by total cells.
    pub coverage: F,
    /// Best level-1 fitness, reported without the offset. `None` when empty.
    pub max_fitness: Option<F>,
}

/// Grid archive with `levels` stacked slots per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DeepDecisionArchive<F: Scalar> {
    grid: GridSpec<F>,
    levels: usize,
    cells: Vec<Vec<ArchiveSlot<F>>>,
}

impl<F: Scalar> DeepDecisionArchive<F> {
    pub fn new(grid: GridSpec<F>, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::config("archive needs at least one level"));
        }
        let cells = vec![Vec::new(); grid.cell_count()];
        Ok(DeepDecisionArchive {
            grid,
            levels,
            cells,
        })
    }

    pub fn grid(&self) -> &GridSpec<F> {
        &self.grid
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn cell(&self, index: usize) -> &[ArchiveSlot<F>] {
        &self.cells[index]
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(Vec::is_empty)
    }

    /// Occupied slots across all levels.
    pub fn occupied_slots(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    /// Occupied level-1 cells.
    pub fn occupied_level1(&self) -> usize {
        self.cells.iter().filter(|c| !c.is_empty()).count()
    }

    /// All slots in (cell, level) order.
    pub fn slots(&self) -> impl Iterator<Item = (usize, usize, &ArchiveSlot<F>)> {
        self.cells
            .iter()
            .enumerate()
            .flat_map(|(j, cell)| cell.iter().enumerate().map(move |(l, s)| (j, l, s)))
    }

    /// Level-1 occupants in cell order.
    pub fn level1_slots(&self) -> Vec<&ArchiveSlot<F>> {
        self.cells.iter().filter_map(|c| c.first()).collect()
    }

    /// Occupants of every level in (cell, level) order.
    pub fn all_slots(&self) -> Vec<&ArchiveSlot<F>> {
        self.cells.iter().flatten().collect()
    }

    /// Offers a batch of evaluated solutions to the archive, in batch order.
    ///
    /// Each candidate walks its cell's levels from the top: an empty level
    /// is occupied, a strictly worse incumbent is pushed down one level and
    /// the walk continues with it, and whatever falls past the last level is
    /// discarded. Equal fitness never displaces an incumbent.
    pub fn dda_select(&mut self, batch: impl IntoIterator<Item = Candidate<F>>) -> Result<()> {
        for candidate in batch {
            let j = self.grid.cell_index(&candidate.eval.descriptor)?;
            self.insert_one(j, candidate.into_slot());
        }
        debug_assert!(self.check_invariants().is_ok());
        Ok(())
    }

    fn insert_one(&mut self, j: usize, mut incoming: ArchiveSlot<F>) {
        let cell = &mut self.cells[j];
        for level in 0..self.levels {
            if level == cell.len() {
                cell.push(incoming);
                return;
            }
            if cell[level].recorded_fitness < incoming.recorded_fitness {
                std::mem::swap(&mut cell[level], &mut incoming);
            }
        }
        // Fell past the deepest level: discarded.
    }

    /// Removes the top `k` levels of every cell and returns the extracted
    /// slots in (cell, level) order. Deeper survivors shift up.
    pub fn take_levels(&mut self, k: usize) -> Result<Vec<ArchiveSlot<F>>> {
        if k == 0 || k > self.levels {
            return Err(Error::config(format!(
                "cannot take {k} levels from an archive with {} levels",
                self.levels
            )));
        }
        let mut extracted = Vec::new();
        for cell in &mut self.cells {
            let take = k.min(cell.len());
            extracted.extend(cell.drain(0..take));
        }
        Ok(extracted)
    }

    /// Computes level-1 metrics. The offset is applied at metric time only;
    /// stored fitness stays raw.
    pub fn metrics(&self, fitness_offset: F) -> QDMetrics<F> {
        let mut qd_score = F::zero();
        let mut occupied = 0usize;
        let mut max_fitness: Option<F> = None;
        for cell in &self.cells {
            if let Some(top) = cell.first() {
                occupied += 1;
                let shifted = top.recorded_fitness + fitness_offset;
                qd_score = qd_score + shifted.max(F::zero());
                max_fitness = Some(match max_fitness {
                    Some(m) => m.max(top.recorded_fitness),
                    None => top.recorded_fitness,
                });
            }
        }
        QDMetrics {
            qd_score,
            coverage: F::cast_from(occupied as f64) / F::cast_from(self.grid.cell_count() as f64),
            max_fitness,
        }
    }

    /// Rebuilds an archive from persisted slots. Slots must arrive in
    /// (cell, level) order with contiguous levels.
    pub fn from_slots(
        grid: GridSpec<F>,
        levels: usize,
        slots: Vec<(usize, usize, ArchiveSlot<F>)>,
    ) -> Result<Self> {
        let mut archive = Self::new(grid, levels)?;
        for (j, level, slot) in slots {
            if j >= archive.cells.len() {
                return Err(Error::config(format!(
                    "slot cell index {j} out of range for {} cells",
                    archive.cells.len()
                )));
            }
            if level != archive.cells[j].len() {
                return Err(Error::config(format!(
                    "slot levels for cell {j} are not contiguous (found level {level}, expected {})",
                    archive.cells[j].len()
                )));
            }
            archive.cells[j].push(slot);
        }
        archive.check_invariants()?;
        Ok(archive)
    }

    /// Verifies prefix occupancy, level capacity, fitness monotonicity, and
    /// that every slot's descriptor maps to the cell holding it.
    pub fn check_invariants(&self) -> Result<()> {
        for (j, cell) in self.cells.iter().enumerate() {
            if cell.len() > self.levels {
                return Err(Error::config(format!(
                    "cell {j} holds {} slots but the archive has {} levels",
                    cell.len(),
                    self.levels
                )));
            }
            for w in cell.windows(2) {
                if w[0].recorded_fitness < w[1].recorded_fitness {
                    return Err(Error::config(format!(
                        "cell {j} fitness increases with depth"
                    )));
                }
            }
            for slot in cell {
                if self.grid.cell_index(&slot.recorded_descriptor)? != j {
                    return Err(Error::config(format!(
                        "cell {j} holds a slot whose descriptor maps elsewhere"
                    )));
                }
            }
        }
        Ok(())
    }
}
