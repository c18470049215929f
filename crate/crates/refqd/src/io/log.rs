//! Per-generation run log, written as CSV.
//!
//! Reals are rendered with 17 significant digits so that reading the file
//! back reproduces every value bit for bit.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One row of the run log.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord<F: Scalar> {
    pub generation: usize,
    pub qd_score: F,
    pub coverage: F,
    /// Best level-1 fitness, absent while the archive is empty.
    pub max_fitness: Option<F>,
    /// Task evaluations performed since the start of the run.
    pub evaluations_so_far: usize,
    pub live_params: usize,
    pub archive_params: usize,
    pub compression_ratio: F,
    /// Learning-rate schedule value at this generation (meaningful only for
    /// algorithms that train the shared representation).
    pub lr: F,
    pub reeval_fired: bool,
}

pub const LOG_HEADER: &str = "generation,qd_score,coverage,max_fitness,evaluations_so_far,\
live_params,archive_params,compression_ratio,lr,reeval_fired";

fn fmt_real<F: Scalar>(v: F) -> String {
    format!("{:.16e}", v.as_f64())
}

/// Writes the records as CSV: header row, one row per generation, LF line
/// endings, reals in round-trip-exact scientific notation.
pub fn write_log<F: Scalar>(records: &[RunRecord<F>], path: &Path) -> Result<()> {
    debug_assert!(
        records.windows(2).all(|w| w[0].generation < w[1].generation),
        "record generations must be strictly increasing"
    );
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(LOG_HEADER);
    out.push('\n');
    for r in records {
        let max_fit = match r.max_fitness {
            Some(v) => fmt_real(v),
            None => "nan".to_string(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.generation,
            fmt_real(r.qd_score),
            fmt_real(r.coverage),
            max_fit,
            r.evaluations_so_far,
            r.live_params,
            r.archive_params,
            fmt_real(r.compression_ratio),
            fmt_real(r.lr),
            r.reeval_fired,
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

fn data_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Data {
        path: path.display().to_string(),
        message: format!("line {line}: {}", message.into()),
    }
}

fn parse_real<F: Scalar>(field: &str, name: &str, path: &Path, line: usize) -> Result<F> {
    field
        .parse::<f64>()
        .map(F::cast_from)
        .map_err(|_| data_err(path, line, format!("bad real in column {name}: {field:?}")))
}

fn parse_count(field: &str, name: &str, path: &Path, line: usize) -> Result<usize> {
    field
        .parse::<usize>()
        .map_err(|_| data_err(path, line, format!("bad count in column {name}: {field:?}")))
}

/// Reads a log written by [`write_log`], validating the header and the
/// strictly-increasing generation invariant.
pub fn read_log<F: Scalar>(path: &Path) -> Result<Vec<RunRecord<F>>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == LOG_HEADER => {}
        Some((_, header)) => {
            return Err(data_err(
                path,
                1,
                format!("unexpected header {header:?}; expected {LOG_HEADER:?}"),
            ))
        }
        None => return Err(data_err(path, 1, "empty file")),
    }
    let mut records = Vec::new();
    let mut last_gen: Option<usize> = None;
    for (idx, row) in lines {
        let line = idx + 1;
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 10 {
            return Err(data_err(
                path,
                line,
                format!("expected 10 columns, found {}", fields.len()),
            ));
        }
        let generation = parse_count(fields[0], "generation", path, line)?;
        if let Some(prev) = last_gen {
            if generation <= prev {
                return Err(data_err(
                    path,
                    line,
                    format!("generation {generation} does not increase past {prev}"),
                ));
            }
        }
        last_gen = Some(generation);
        let max_fitness = if fields[3] == "nan" {
            None
        } else {
            Some(parse_real(fields[3], "max_fitness", path, line)?)
        };
        let reeval_fired = match fields[9] {
            "true" => true,
            "false" => false,
            other => {
                return Err(data_err(
                    path,
                    line,
                    format!("bad flag in column reeval_fired: {other:?}"),
                ))
            }
        };
        records.push(RunRecord {
            generation,
            qd_score: parse_real(fields[1], "qd_score", path, line)?,
            coverage: parse_real(fields[2], "coverage", path, line)?,
            max_fitness,
            evaluations_so_far: parse_count(fields[4], "evaluations_so_far", path, line)?,
            live_params: parse_count(fields[5], "live_params", path, line)?,
            archive_params: parse_count(fields[6], "archive_params", path, line)?,
            compression_ratio: parse_real(fields[7], "compression_ratio", path, line)?,
            lr: parse_real(fields[8], "lr", path, line)?,
            reeval_fired,
        });
    }
    Ok(records)
}
